"""Module-grid layout: function patterns, format placement, data traversal.

Everything here is pure geometry, cached per version. Matrices are numpy
uint8 arrays with 1 = dark, indexed [row, col].
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import tables
from .tables import EcLevel


@lru_cache(maxsize=None)
def base_layout(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(base matrix with function patterns set, function-module mask).

    Format areas are reserved in the mask but left light in the base;
    the dark module is set. Returned arrays are read-only.
    """
    tables.check_version(version)
    side = tables.side_length(version)
    mat = np.zeros((side, side), dtype=np.uint8)
    fn = np.zeros((side, side), dtype=bool)

    def finder(r0: int, c0: int) -> None:
        # 7x7 pattern plus one-module light separator on the inner sides
        for dr in range(-1, 8):
            for dc in range(-1, 8):
                r, c = r0 + dr, c0 + dc
                if not (0 <= r < side and 0 <= c < side):
                    continue
                fn[r, c] = True
                if 0 <= dr <= 6 and 0 <= dc <= 6:
                    ring = max(abs(dr - 3), abs(dc - 3))
                    mat[r, c] = 1 if ring in (0, 1, 3) else 0

    finder(0, 0)
    finder(0, side - 7)
    finder(side - 7, 0)

    # timing patterns
    for k in range(8, side - 8):
        mat[6, k] = mat[k, 6] = (k + 1) % 2
        fn[6, k] = fn[k, 6] = True
    fn[6, :] = True
    fn[:, 6] = True

    # alignment pattern (single, absent on v1)
    center = tables.ALIGNMENT_CENTER[version]
    if center is not None:
        for dr in range(-2, 3):
            for dc in range(-2, 3):
                r, c = center + dr, center + dc
                ring = max(abs(dr), abs(dc))
                mat[r, c] = 1 if ring != 1 else 0
                fn[r, c] = True

    # format information areas (both copies) + dark module
    for r, c in format_positions(side)[0] + format_positions(side)[1]:
        fn[r, c] = True
    mat[side - 8, 8] = 1
    fn[side - 8, 8] = True

    mat.setflags(write=False)
    fn.setflags(write=False)
    return mat, fn


def format_positions(side: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Module coordinates of the two format-info copies, bit 0 first."""
    copy_a = []
    for i in range(15):
        if i < 6:
            copy_a.append((i, 8))
        elif i < 8:
            copy_a.append((i + 1, 8))
        else:
            copy_a.append((side - 15 + i, 8))
    copy_b = []
    for i in range(15):
        if i < 8:
            copy_b.append((8, side - 1 - i))
        elif i < 9:
            copy_b.append((8, 7))
        else:
            copy_b.append((8, 14 - i))
    return copy_a, copy_b


def write_format(mat: np.ndarray, ec: EcLevel, mask: int) -> None:
    side = mat.shape[0]
    bits = tables.format_bits(ec, mask)
    for positions in format_positions(side):
        for i, (r, c) in enumerate(positions):
            mat[r, c] = (bits >> i) & 1


def read_format(mat: np.ndarray) -> list[int]:
    """Raw 15-bit words from both format copies (may be corrupted)."""
    side = mat.shape[0]
    words = []
    for positions in format_positions(side):
        w = 0
        for i, (r, c) in enumerate(positions):
            w |= int(mat[r, c]) << i
        words.append(w)
    return words


@lru_cache(maxsize=None)
def data_traversal(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) index arrays for data modules in placement order."""
    _, fn = base_layout(version)
    side = tables.side_length(version)
    rows, cols = [], []
    col = side - 1
    upward = True
    while col > 0:
        if col == 6:  # timing column: the two-module band skips it entirely
            col -= 1
        rng = range(side - 1, -1, -1) if upward else range(side)
        for row in rng:
            for c in (col, col - 1):
                if not fn[row, c]:
                    rows.append(row)
                    cols.append(c)
        upward = not upward
        col -= 2
    return np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp)


@lru_cache(maxsize=None)
def mask_vector(version: int, mask: int) -> np.ndarray:
    """Mask predicate evaluated along the data traversal (uint8)."""
    rows, cols = data_traversal(version)
    pred = tables.MASK_PREDICATES[mask]
    return np.fromiter(
        (pred(int(r), int(c)) for r, c in zip(rows, cols)),
        dtype=np.uint8,
        count=len(rows),
    )


