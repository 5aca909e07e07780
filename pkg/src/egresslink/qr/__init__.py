"""QR symbol codec for versions 1-3 at the module-matrix level.

Covers single-segment numeric/alphanumeric/byte payloads with full
Reed-Solomon error correction, standard masking, and format information.
"""

from .decoder import decode, decode_details
from .encoder import encode, penalty_score
from .payload import (
    IllegalSymbol,
    MalformedFormatInfo,
    MalformedMatrix,
    OversizePayload,
    Payload,
    QrError,
    QrMatrix,
    UnrecoverableCorruption,
)
from .render import parse_pbm, parse_text, render_pbm, render_text
from .tables import ALPHANUMERIC_CHARSET, EcLevel, Mode, capacity

__all__ = [
    "ALPHANUMERIC_CHARSET",
    "EcLevel",
    "IllegalSymbol",
    "MalformedFormatInfo",
    "MalformedMatrix",
    "Mode",
    "OversizePayload",
    "Payload",
    "QrError",
    "QrMatrix",
    "UnrecoverableCorruption",
    "capacity",
    "decode",
    "decode_details",
    "encode",
    "parse_pbm",
    "parse_text",
    "penalty_score",
    "render_pbm",
    "render_text",
]
