"""Symbol encoder: payload -> codewords -> masked module matrix."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import layout, tables
from .bitstream import BitWriter
from .gf256 import rs_encode_block
from .payload import OversizePayload, Payload, QrMatrix
from .tables import EcLevel, Mode

_FINDERLIKE = np.array([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=np.uint8)
_FINDERLIKE_REV = _FINDERLIKE[::-1].copy()


def encode(
    payload: Payload,
    version: int,
    ec: EcLevel,
    mask: int | None = None,
) -> QrMatrix:
    """Encode a payload into a version 1-3 symbol.

    mask forces a specific data mask 0..7; by default the mask with the
    lowest penalty score wins (ties to the lowest id).
    """
    tables.check_version(version)
    cap = tables.capacity(version, ec, payload.mode)
    if len(payload) > cap:
        raise OversizePayload(
            f"{len(payload)} {payload.mode.value} symbols exceed "
            f"capacity {cap} of v{version}-{ec.value}"
        )
    codewords = _codewords(payload, version, ec)
    interleaved = _interleave(codewords, version, ec)

    rows, cols = layout.data_traversal(version)
    bits = np.unpackbits(np.frombuffer(interleaved, dtype=np.uint8))
    if len(bits) < len(rows):  # remainder bits stay light before masking
        bits = np.concatenate([bits, np.zeros(len(rows) - len(bits), dtype=np.uint8)])

    candidates = _candidate_matrices(bits, version, ec)
    if mask is not None:
        if not 0 <= mask <= 7:
            raise ValueError(f"mask id {mask!r} out of range 0..7")
        return QrMatrix(version, candidates[mask])
    chosen = int(np.argmin(penalty_scores(candidates)))  # first min: lowest id
    return QrMatrix(version, candidates[chosen])


def _candidate_matrices(bits: np.ndarray, version: int, ec: EcLevel) -> np.ndarray:
    """All eight masked symbols, format info included, as one (8,S,S) array."""
    base, _ = layout.base_layout(version)
    rows, cols = layout.data_traversal(version)
    mats = np.repeat(base[None, :, :], 8, axis=0)
    mats[:, rows, cols] = bits[None, :] ^ _mask_stack(version)
    fr, fc, vals = _format_scatter(version, ec)
    mats[:, fr, fc] = vals
    return mats


@lru_cache(maxsize=None)
def _mask_stack(version: int) -> np.ndarray:
    return np.stack([layout.mask_vector(version, m) for m in range(8)])


@lru_cache(maxsize=None)
def _format_scatter(version: int, ec: EcLevel):
    """(rows, cols, per-mask values) covering both format copies."""
    side = tables.side_length(version)
    copy_a, copy_b = layout.format_positions(side)
    positions = copy_a + copy_b
    fr = np.array([r for r, _ in positions], dtype=np.intp)
    fc = np.array([c for _, c in positions], dtype=np.intp)
    vals = np.zeros((8, len(positions)), dtype=np.uint8)
    for m in range(8):
        word = tables.format_bits(ec, m)
        bitvals = [(word >> i) & 1 for i in range(15)]
        vals[m] = bitvals + bitvals
    return fr, fc, vals


def _codewords(payload: Payload, version: int, ec: EcLevel) -> bytes:
    w = BitWriter()
    w.put(tables.MODE_INDICATOR[payload.mode], 4)
    w.put(len(payload), tables.COUNT_BITS[payload.mode])
    data = payload.data
    if payload.mode is Mode.NUMERIC:
        for i in range(0, len(data), 3):
            group = data[i:i + 3]
            w.put(int(group.decode("ascii")), {3: 10, 2: 7, 1: 4}[len(group)])
    elif payload.mode is Mode.ALPHANUMERIC:
        idx = tables.ALPHANUMERIC_INDEX
        for i in range(0, len(data), 2):
            pair = data[i:i + 2]
            if len(pair) == 2:
                w.put(idx[chr(pair[0])] * 45 + idx[chr(pair[1])], 11)
            else:
                w.put(idx[chr(pair[0])], 6)
    else:
        for byte in data:
            w.put(byte, 8)

    total_bits = tables.data_codewords(version, ec) * 8
    w.put(0, min(4, total_bits - len(w)))  # terminator
    if len(w) % 8:
        w.put(0, 8 - len(w) % 8)
    out = bytearray(w.to_bytes())
    pad = 0
    while len(out) * 8 < total_bits:
        out.append(tables.PAD_CODEWORDS[pad])
        pad ^= 1
    return bytes(out)


def _interleave(data: bytes, version: int, ec: EcLevel) -> bytes:
    blocks = []
    offset = 0
    for data_len, ec_len in tables.block_structure(version, ec):
        chunk = list(data[offset:offset + data_len])
        offset += data_len
        blocks.append((chunk, rs_encode_block(chunk, ec_len)[data_len:]))
    out = bytearray()
    for i in range(max(len(b[0]) for b in blocks)):
        for chunk, _ in blocks:
            if i < len(chunk):
                out.append(chunk[i])
    for i in range(max(len(b[1]) for b in blocks)):
        for _, parity in blocks:
            if i < len(parity):
                out.append(parity[i])
    return bytes(out)


def penalty_score(mat: np.ndarray) -> int:
    """Standard four-rule mask evaluation (weights 3/3/40/10)."""
    return int(penalty_scores(mat[None, :, :])[0])


def penalty_scores(mats: np.ndarray) -> np.ndarray:
    """Penalty per symbol for a stack of candidate matrices (K,S,S)."""
    k, side, _ = mats.shape
    scores = _runs(mats) + _runs(mats.swapaxes(1, 2))

    a = mats[:, :-1, :-1]
    boxes = (a == mats[:, 1:, :-1]) & (a == mats[:, :-1, 1:]) & (a == mats[:, 1:, 1:])
    scores += tables.PENALTY_BOX * boxes.sum(axis=(1, 2))

    scores += _finderlike(mats) + _finderlike(mats.swapaxes(1, 2))

    dark = mats.sum(axis=(1, 2), dtype=np.int64)
    scores += tables.PENALTY_BALANCE * (np.abs(100 * dark // (side * side) - 50) // 5)
    return scores


def _runs(mats: np.ndarray) -> np.ndarray:
    """Rule 1: runs of >= 5 equal modules, per matrix, along the last axis."""
    k, side, _ = mats.shape
    stride = side * (side + 1)
    sep = np.full((k, side, 1), 2, dtype=np.uint8)
    flat = np.concatenate([mats, sep], axis=2).ravel()
    edges = np.flatnonzero(np.diff(flat))
    starts = np.concatenate([[0], edges + 1])
    lengths = np.diff(np.concatenate([starts, [len(flat)]]))
    keep = (flat[starts] != 2) & (lengths >= 5)
    out = np.zeros(k, dtype=np.int64)
    np.add.at(out, starts[keep] // stride, lengths[keep] - 5 + tables.PENALTY_RUN)
    return out


def _finderlike(mats: np.ndarray) -> np.ndarray:
    """Rule 3: 1:1:3:1:1 pattern flanked by four light modules."""
    if mats.shape[2] < len(_FINDERLIKE):
        return np.zeros(mats.shape[0], dtype=np.int64)
    win = sliding_window_view(mats, len(_FINDERLIKE), axis=2)
    hits = (win == _FINDERLIKE).all(axis=3).sum(axis=(1, 2)) \
        + (win == _FINDERLIKE_REV).all(axis=3).sum(axis=(1, 2))
    return tables.PENALTY_FINDERLIKE * hits
