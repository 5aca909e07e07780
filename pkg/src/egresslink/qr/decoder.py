"""Symbol decoder: module matrix -> corrected codewords -> payload.

Decoding starts from a clean module grid; image sampling and geometry
recovery are someone else's problem.
"""

from __future__ import annotations

import numpy as np

from . import layout, tables
from .bitstream import BitReader
from .gf256 import DecodeFailure, rs_decode_block
from .payload import (
    MalformedFormatInfo,
    MalformedMatrix,
    Payload,
    QrMatrix,
    UnrecoverableCorruption,
)
from .tables import EcLevel, Mode


def version_for_side(side: int) -> int:
    if (side - 17) % 4 == 0 and tables.MIN_VERSION <= (side - 17) // 4 <= tables.MAX_VERSION:
        return (side - 17) // 4
    raise MalformedMatrix(f"side length {side} is not a version 1-3 symbol")


def decode(matrix: QrMatrix | np.ndarray) -> Payload:
    """Recover the payload, correcting up to the per-block parity radius."""
    mat = matrix.modules if isinstance(matrix, QrMatrix) else np.asarray(matrix)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise MalformedMatrix(f"expected a square grid, got shape {mat.shape}")
    version = version_for_side(mat.shape[0])

    ec, mask = _format_info(mat)
    rows, cols = layout.data_traversal(version)
    bits = (mat[rows, cols].astype(np.uint8) ^ layout.mask_vector(version, mask))
    n_codewords = tables.total_codewords(version)
    codewords = np.packbits(bits[: n_codewords * 8]).tolist()

    data = _deinterleave_and_correct(codewords, version, ec)
    return _parse_stream(bytes(data), version)


def decode_details(matrix: QrMatrix | np.ndarray) -> tuple[Payload, EcLevel, int, int]:
    """decode() plus (ec level, mask id, corrected codeword count)."""
    mat = matrix.modules if isinstance(matrix, QrMatrix) else np.asarray(matrix)
    version = version_for_side(mat.shape[0])
    ec, mask = _format_info(mat)
    rows, cols = layout.data_traversal(version)
    bits = (mat[rows, cols].astype(np.uint8) ^ layout.mask_vector(version, mask))
    codewords = np.packbits(bits[: tables.total_codewords(version) * 8]).tolist()
    data, corrected = _deinterleave_and_correct(codewords, version, ec, with_count=True)
    return _parse_stream(bytes(data), version), ec, mask, corrected


def _format_info(mat: np.ndarray) -> tuple[EcLevel, int]:
    """Try both copies; accept the closest valid word within distance 3."""
    best: tuple[int, EcLevel, int] | None = None
    for word in layout.read_format(mat):
        if word in tables.FORMAT_DECODE:
            return tables.FORMAT_DECODE[word]
        for valid, (ec, mask) in tables.FORMAT_DECODE.items():
            dist = (word ^ valid).bit_count()
            if dist <= 3 and (best is None or dist < best[0]):
                best = (dist, ec, mask)
    if best is None:
        raise MalformedFormatInfo("both format-information copies unreadable")
    return best[1], best[2]


def _deinterleave_and_correct(codewords, version, ec, with_count=False):
    structure = tables.block_structure(version, ec)
    n_blocks = len(structure)
    data_lens = [d for d, _ in structure]
    ec_lens = [e for _, e in structure]

    blocks: list[list[int]] = [[] for _ in range(n_blocks)]
    it = iter(codewords)
    for i in range(max(data_lens)):
        for b in range(n_blocks):
            if i < data_lens[b]:
                blocks[b].append(next(it))
    parities: list[list[int]] = [[] for _ in range(n_blocks)]
    for i in range(max(ec_lens)):
        for b in range(n_blocks):
            if i < ec_lens[b]:
                parities[b].append(next(it))

    data: list[int] = []
    corrected = 0
    for b in range(n_blocks):
        try:
            fixed, n = rs_decode_block(blocks[b] + parities[b], ec_lens[b])
        except DecodeFailure as exc:
            raise UnrecoverableCorruption(f"block {b}: {exc}") from exc
        corrected += n
        data.extend(fixed[: data_lens[b]])
    if with_count:
        return data, corrected
    return data


def _parse_stream(data: bytes, version: int) -> Payload:
    r = BitReader(data)
    try:
        indicator = r.take(4)
        mode = {v: k for k, v in tables.MODE_INDICATOR.items()}.get(indicator)
        if mode is None:
            raise UnrecoverableCorruption(f"unknown mode indicator {indicator:#06b}")
        count = r.take(tables.COUNT_BITS[mode])
        if mode is Mode.NUMERIC:
            out = []
            remaining = count
            while remaining >= 3:
                out.append(f"{r.take(10):03d}")
                remaining -= 3
            if remaining == 2:
                out.append(f"{r.take(7):02d}")
            elif remaining == 1:
                out.append(f"{r.take(4):d}")
            text = "".join(out)
            if len(text) != count:
                raise UnrecoverableCorruption("numeric length mismatch")
            return Payload.numeric(text)
        if mode is Mode.ALPHANUMERIC:
            chars = []
            remaining = count
            while remaining >= 2:
                pair = r.take(11)
                hi, lo = divmod(pair, 45)
                if hi >= 45:
                    raise UnrecoverableCorruption("alphanumeric pair out of range")
                chars.append(tables.ALPHANUMERIC_CHARSET[hi])
                chars.append(tables.ALPHANUMERIC_CHARSET[lo])
                remaining -= 2
            if remaining:
                idx = r.take(6)
                if idx >= 45:
                    raise UnrecoverableCorruption("alphanumeric symbol out of range")
                chars.append(tables.ALPHANUMERIC_CHARSET[idx])
            return Payload.alphanumeric("".join(chars))
        return Payload.bytes_(bytes(r.take(8) for _ in range(count)))
    except ValueError as exc:  # bit stream exhausted
        raise UnrecoverableCorruption(str(exc)) from exc
