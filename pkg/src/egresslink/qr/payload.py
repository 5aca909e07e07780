"""Payload and module-matrix value types shared by the encoder and decoder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import layout, tables
from .tables import EcLevel, Mode

NUMERIC_CHARSET = "0123456789"


class QrError(Exception):
    """Base class for codec failures."""


class OversizePayload(QrError):
    """Payload does not fit the requested version/level."""


class IllegalSymbol(QrError):
    """Character outside the legal set for the chosen mode."""


class UnrecoverableCorruption(QrError):
    """Error correction could not repair the data codewords."""


class MalformedFormatInfo(QrError):
    """Neither format-information copy decodes to a valid word."""


class MalformedMatrix(QrError):
    """Grid is not a version 1-3 symbol."""


@dataclass(frozen=True)
class Payload:
    """A single-segment message: mode plus raw octets.

    For text modes the octets are the ASCII characters; byte mode carries
    arbitrary data.
    """

    mode: Mode
    data: bytes

    def __post_init__(self) -> None:
        if self.mode is Mode.NUMERIC:
            bad = [c for c in self.data if chr(c) not in NUMERIC_CHARSET]
        elif self.mode is Mode.ALPHANUMERIC:
            bad = [c for c in self.data if chr(c) not in tables.ALPHANUMERIC_INDEX]
        else:
            bad = []
        if bad:
            raise IllegalSymbol(
                f"illegal {self.mode.value} character {chr(bad[0])!r}"
            )

    @classmethod
    def numeric(cls, text: str) -> "Payload":
        return cls(Mode.NUMERIC, text.encode("ascii"))

    @classmethod
    def alphanumeric(cls, text: str) -> "Payload":
        return cls(Mode.ALPHANUMERIC, text.encode("ascii"))

    @classmethod
    def bytes_(cls, data: bytes) -> "Payload":
        return cls(Mode.BYTE, bytes(data))

    @property
    def text(self) -> str:
        return self.data.decode("latin-1")

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class QrMatrix:
    """Square module grid (1 = dark) without the quiet zone.

    The quiet zone width is carried separately and applied by renderers.
    """

    version: int
    modules: np.ndarray = field(repr=False)
    quiet_zone: int = tables.QUIET_ZONE

    def __post_init__(self) -> None:
        side = tables.side_length(self.version)
        if self.modules.shape != (side, side):
            raise MalformedMatrix(
                f"version {self.version} needs a {side}x{side} grid, "
                f"got {self.modules.shape}"
            )

    @property
    def side(self) -> int:
        return self.modules.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QrMatrix):
            return NotImplemented
        return (
            self.version == other.version
            and self.quiet_zone == other.quiet_zone
            and bool(np.array_equal(self.modules, other.modules))
        )

    def validate_structure(self) -> None:
        """Check the fixed-pattern invariants; raises MalformedMatrix."""
        base, fn = layout.base_layout(self.version)
        static = fn.copy()
        for copy in layout.format_positions(self.side):
            for r, c in copy:
                static[r, c] = False
        static[self.side - 8, 8] = True  # dark module is fixed
        if not np.array_equal(self.modules[static], base[static]):
            raise MalformedMatrix("function patterns do not match the layout")
        words = layout.read_format(self.modules)
        if words[0] != words[1] or words[0] not in tables.FORMAT_DECODE:
            raise MalformedMatrix("format information copies inconsistent")
