"""Two-transaction provisioning protocol: wire format and handshake machine."""

from .handshake import (
    DISPLAYED,
    TERMINAL,
    Action,
    Event,
    HandshakeState,
    IllegalTransition,
    Phase,
    step_handshake,
)
from .wire import (
    SYMBOL_BUDGET,
    BadEscape,
    BudgetExceeded,
    MalformedWire,
    NetworkAccess,
    Transaction1Msg,
    Transaction2Msg,
    UnknownTag,
    WireError,
    parse_t1,
    parse_t2,
    quantize_time,
    serialize_t1,
    serialize_t2,
    snapshot_state,
)

__all__ = [
    "Action",
    "BadEscape",
    "BudgetExceeded",
    "DISPLAYED",
    "Event",
    "HandshakeState",
    "IllegalTransition",
    "MalformedWire",
    "NetworkAccess",
    "Phase",
    "SYMBOL_BUDGET",
    "TERMINAL",
    "Transaction1Msg",
    "Transaction2Msg",
    "UnknownTag",
    "WireError",
    "parse_t1",
    "parse_t2",
    "quantize_time",
    "serialize_t1",
    "serialize_t2",
    "snapshot_state",
    "step_handshake",
]
