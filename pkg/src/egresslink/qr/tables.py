"""Constant tables for QR symbol versions 1-3 (ISO/IEC 18004).

Only the small versions the display hardware can drive are covered;
anything else is rejected up front.
"""

from __future__ import annotations

from enum import Enum

MIN_VERSION = 1
MAX_VERSION = 3

QUIET_ZONE = 4  # standard minimum width, in modules


class EcLevel(Enum):
    L = "L"
    M = "M"
    Q = "Q"
    H = "H"


class Mode(Enum):
    NUMERIC = "numeric"
    ALPHANUMERIC = "alphanumeric"
    BYTE = "byte"


MODE_INDICATOR = {Mode.NUMERIC: 0b0001, Mode.ALPHANUMERIC: 0b0010, Mode.BYTE: 0b0100}

# character-count field width for versions 1..9
COUNT_BITS = {Mode.NUMERIC: 10, Mode.ALPHANUMERIC: 9, Mode.BYTE: 8}

ALPHANUMERIC_CHARSET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"
ALPHANUMERIC_INDEX = {c: i for i, c in enumerate(ALPHANUMERIC_CHARSET)}

# (block_count, total_codewords_per_block, data_codewords_per_block)
RS_BLOCKS: dict[tuple[int, EcLevel], tuple[int, int, int]] = {
    (1, EcLevel.L): (1, 26, 19),
    (1, EcLevel.M): (1, 26, 16),
    (1, EcLevel.Q): (1, 26, 13),
    (1, EcLevel.H): (1, 26, 9),
    (2, EcLevel.L): (1, 44, 34),
    (2, EcLevel.M): (1, 44, 28),
    (2, EcLevel.Q): (1, 44, 22),
    (2, EcLevel.H): (1, 44, 16),
    (3, EcLevel.L): (1, 70, 55),
    (3, EcLevel.M): (1, 70, 44),
    (3, EcLevel.Q): (2, 35, 17),
    (3, EcLevel.H): (2, 35, 13),
}

# single alignment pattern centre for v2/v3; v1 has none
ALIGNMENT_CENTER = {1: None, 2: 18, 3: 22}

# format info: 2 level bits as placed in the symbol
EC_LEVEL_BITS = {EcLevel.L: 0b01, EcLevel.M: 0b00, EcLevel.Q: 0b11, EcLevel.H: 0b10}

FORMAT_GENERATOR = 0b10100110111  # BCH(15,5)
FORMAT_MASK = 0b101010000010010

# mask predicates over (row, col); true means flip the data module
MASK_PREDICATES = (
    lambda i, j: (i + j) % 2 == 0,
    lambda i, j: i % 2 == 0,
    lambda i, j: j % 3 == 0,
    lambda i, j: (i + j) % 3 == 0,
    lambda i, j: (i // 2 + j // 3) % 2 == 0,
    lambda i, j: (i * j) % 2 + (i * j) % 3 == 0,
    lambda i, j: ((i * j) % 2 + (i * j) % 3) % 2 == 0,
    lambda i, j: ((i + j) % 2 + (i * j) % 3) % 2 == 0,
)

# mask evaluation penalty weights
PENALTY_RUN = 3
PENALTY_BOX = 3
PENALTY_FINDERLIKE = 40
PENALTY_BALANCE = 10

PAD_CODEWORDS = (0xEC, 0x11)


def side_length(version: int) -> int:
    return 17 + 4 * version


def check_version(version: int) -> None:
    if not MIN_VERSION <= version <= MAX_VERSION:
        raise ValueError(f"unsupported version {version!r}: must be 1..3")


def total_codewords(version: int) -> int:
    count, total, _ = RS_BLOCKS[(version, EcLevel.L)]
    return count * total


def data_codewords(version: int, ec: EcLevel) -> int:
    count, _, data = RS_BLOCKS[(version, ec)]
    return count * data


def block_structure(version: int, ec: EcLevel) -> list[tuple[int, int]]:
    """List of (data_len, ec_len) per block, in transmission order."""
    count, total, data = RS_BLOCKS[(version, ec)]
    return [(data, total - data)] * count


def format_bits(ec: EcLevel, mask: int) -> int:
    """15-bit format word: 5 data bits BCH-extended, then xor-masked."""
    data = (EC_LEVEL_BITS[ec] << 3) | mask
    d = data << 10
    while d.bit_length() >= 11:
        d ^= FORMAT_GENERATOR << (d.bit_length() - 11)
    return ((data << 10) | d) ^ FORMAT_MASK


FORMAT_DECODE = {format_bits(ec, m): (ec, m) for ec in EcLevel for m in range(8)}


def capacity(version: int, ec: EcLevel, mode: Mode) -> int:
    """Maximum character count for a single-segment symbol."""
    check_version(version)
    avail = data_codewords(version, ec) * 8 - 4 - COUNT_BITS[mode]
    if avail < 0:
        return 0
    if mode is Mode.NUMERIC:
        groups, rem = divmod(avail, 10)
        chars = groups * 3
        if rem >= 7:
            chars += 2
        elif rem >= 4:
            chars += 1
        return chars
    if mode is Mode.ALPHANUMERIC:
        pairs, rem = divmod(avail, 11)
        return pairs * 2 + (1 if rem >= 6 else 0)
    return avail // 8
