"""Wire format for the two provisioning transactions.

Messages are positional, colon-separated fields drawn from the QR
alphanumeric charset so a whole message fits the densest text mode.
Numbers travel base-36; times are quantized (milliseconds for message
timestamps and ttl, whole seconds for the state-vector age). The full
grammar lives in docs/wire-format.md and is enforced here exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..algedonic import AlgedonicVector
from ..qr.tables import ALPHANUMERIC_CHARSET

T1_TAG = "U1"
T2_TAG = "U2"
SYMBOL_BUDGET = 70  # alphanumeric symbols per message

SEPARATOR = ":"
ESCAPE = "%"
_ESCAPES = {":": "%C", "%": "%P"}
_UNESCAPES = {"C": ":", "P": "%"}

_CHARSET = set(ALPHANUMERIC_CHARSET)
_B36 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class WireError(Exception):
    """Base class for wire-format failures."""


class BudgetExceeded(WireError):
    """Serialized message would not fit the symbol budget; nothing is emitted."""


class MalformedWire(WireError):
    """Text does not follow the field grammar."""


class UnknownTag(WireError):
    """Leading protocol tag is not one this revision understands."""


class BadEscape(WireError):
    """Escape introducer followed by an unknown code."""


def _check_field(name: str, value: str) -> str:
    bad = set(value) - _CHARSET
    if bad:
        raise ValueError(f"{name} contains characters outside the "
                         f"alphanumeric charset: {sorted(bad)!r}")
    return value


def escape(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def unescape(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == ESCAPE:
            if i + 1 >= len(value) or value[i + 1] not in _UNESCAPES:
                raise BadEscape(f"bad escape at offset {i} in {value!r}")
            out.append(_UNESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def to_b36(n: int) -> str:
    if n < 0:
        raise ValueError("wire numbers are unsigned")
    if n == 0:
        return "0"
    digits = []
    while n:
        n, r = divmod(n, 36)
        digits.append(_B36[r])
    return "".join(reversed(digits))


def from_b36(text: str) -> int:
    if not text or any(c not in _B36 for c in text):
        raise MalformedWire(f"not a base-36 number: {text!r}")
    return int(text, 36)


def _ms(seconds: float) -> int:
    return round(seconds * 1000)


def quantize_time(seconds: float) -> float:
    """Snap to the 1 ms wire grid; message builders apply this."""
    return _ms(seconds) / 1000.0


def snapshot_state(state: AlgedonicVector, issued_at: float) -> AlgedonicVector:
    """Re-stamp a vector so its age from issued_at is whole seconds."""
    age = max(0, round(issued_at - state.updated_at))
    return AlgedonicVector(bits=state.bits, updated_at=issued_at - age)


@dataclass(frozen=True)
class NetworkAccess:
    """Credentials a scanning device needs to join the high-speed network."""

    network_name: str
    credential: str
    endpoint: str  # host:port

    def __post_init__(self) -> None:
        _check_field("network_name", self.network_name)
        _check_field("credential", self.credential)
        _check_field("endpoint", self.endpoint)


@dataclass(frozen=True)
class Transaction1Msg:
    """First transaction: how to join, plus the state vector as last known."""

    display_id: str
    txn_id: int
    issued_at: float  # seconds, 1 ms grid
    ttl: float        # seconds, 1 ms grid, > 0
    access: NetworkAccess
    prior_state: AlgedonicVector
    protocol_tag: str = T1_TAG

    def __post_init__(self) -> None:
        _check_field("display_id", self.display_id)
        if self.protocol_tag != T1_TAG:
            raise ValueError(f"protocol_tag must be {T1_TAG!r}")
        if self.ttl <= 0:
            raise ValueError("ttl must be positive")
        if self.txn_id < 0:
            raise ValueError("txn_id must be non-negative")
        _require_grid(self)


@dataclass(frozen=True)
class Transaction2Msg:
    """Second transaction: updated vector, registration, resource manifest."""

    display_id: str
    txn_id: int
    issued_at: float
    updated_state: AlgedonicVector
    registration_token: str
    manifest: tuple[str, ...] = ()
    protocol_tag: str = T2_TAG

    def __post_init__(self) -> None:
        _check_field("display_id", self.display_id)
        _check_field("registration_token", self.registration_token)
        for item in self.manifest:
            _check_field("manifest item", item)
        if self.protocol_tag != T2_TAG:
            raise ValueError(f"protocol_tag must be {T2_TAG!r}")
        if self.txn_id < 0:
            raise ValueError("txn_id must be non-negative")
        _require_grid(self)
        object.__setattr__(self, "manifest", tuple(self.manifest))


def _require_grid(msg) -> None:
    if msg.issued_at != quantize_time(msg.issued_at):
        raise ValueError("issued_at must sit on the 1 ms wire grid")
    ttl = getattr(msg, "ttl", None)
    if ttl is not None and ttl != quantize_time(ttl):
        raise ValueError("ttl must sit on the 1 ms wire grid")
    state = getattr(msg, "prior_state", None) or getattr(msg, "updated_state")
    age = msg.issued_at - state.updated_at
    if age < 0:
        raise ValueError("state vector postdates the message")
    if round(age) != age:
        raise ValueError("state vector age must be whole seconds")


def _state_fields(state: AlgedonicVector, issued_at: float) -> tuple[str, str]:
    bits = "".join("1" if b else "0" for b in state.bits)
    return bits, to_b36(int(issued_at - state.updated_at))


def _parse_state(bits: str, age: str, issued_at: float) -> AlgedonicVector:
    if not bits or set(bits) - {"0", "1"}:
        raise MalformedWire(f"not a bit vector: {bits!r}")
    if len(bits) < 4:
        raise MalformedWire("state vector needs at least 4 components")
    return AlgedonicVector(
        bits=tuple(int(b) for b in bits),
        updated_at=issued_at - from_b36(age),
    )


def serialize_t1(msg: Transaction1Msg) -> str:
    bits, age = _state_fields(msg.prior_state, msg.issued_at)
    fields = [
        msg.protocol_tag,
        escape(msg.display_id),
        to_b36(msg.txn_id),
        to_b36(_ms(msg.issued_at)),
        to_b36(_ms(msg.ttl)),
        escape(msg.access.network_name),
        escape(msg.access.credential),
        escape(msg.access.endpoint),
        bits,
        age,
    ]
    return _emit(fields)


def serialize_t2(msg: Transaction2Msg) -> str:
    bits, age = _state_fields(msg.updated_state, msg.issued_at)
    fields = [
        msg.protocol_tag,
        escape(msg.display_id),
        to_b36(msg.txn_id),
        to_b36(_ms(msg.issued_at)),
        bits,
        age,
        escape(msg.registration_token),
        *[escape(item) for item in msg.manifest],
    ]
    return _emit(fields)


def _emit(fields: list[str]) -> str:
    text = SEPARATOR.join(fields)
    if len(text) > SYMBOL_BUDGET:
        raise BudgetExceeded(
            f"serialized message is {len(text)} symbols; budget is {SYMBOL_BUDGET}"
        )
    return text


def _split(text: str, expected_tag: str, min_fields: int) -> list[str]:
    bad = set(text) - _CHARSET
    if bad:
        raise MalformedWire(f"characters outside the charset: {sorted(bad)!r}")
    fields = text.split(SEPARATOR)
    if fields[0] in (T1_TAG, T2_TAG) and fields[0] != expected_tag:
        raise UnknownTag(f"expected {expected_tag!r}, found {fields[0]!r}")
    if fields[0] != expected_tag:
        raise UnknownTag(f"unknown protocol tag {fields[0]!r}")
    if len(fields) < min_fields:
        raise MalformedWire(
            f"{expected_tag} needs >= {min_fields} fields, found {len(fields)}"
        )
    return fields


def parse_t1(text: str) -> Transaction1Msg:
    fields = _split(text, T1_TAG, 10)
    if len(fields) != 10:
        raise MalformedWire(f"T1 takes exactly 10 fields, found {len(fields)}")
    issued_at = from_b36(fields[3]) / 1000.0
    try:
        return Transaction1Msg(
            display_id=unescape(fields[1]),
            txn_id=from_b36(fields[2]),
            issued_at=issued_at,
            ttl=from_b36(fields[4]) / 1000.0,
            access=NetworkAccess(
                network_name=unescape(fields[5]),
                credential=unescape(fields[6]),
                endpoint=unescape(fields[7]),
            ),
            prior_state=_parse_state(fields[8], fields[9], issued_at),
        )
    except ValueError as exc:
        raise MalformedWire(str(exc)) from exc


def parse_t2(text: str) -> Transaction2Msg:
    fields = _split(text, T2_TAG, 7)
    issued_at = from_b36(fields[3]) / 1000.0
    try:
        return Transaction2Msg(
            display_id=unescape(fields[1]),
            txn_id=from_b36(fields[2]),
            issued_at=issued_at,
            updated_state=_parse_state(fields[4], fields[5], issued_at),
            registration_token=unescape(fields[6]),
            manifest=tuple(unescape(item) for item in fields[7:]),
        )
    except ValueError as exc:
        raise MalformedWire(str(exc)) from exc
