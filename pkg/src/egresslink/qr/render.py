"""Deterministic text and portable-bitmap rendering of module matrices."""

from __future__ import annotations

import numpy as np

from .decoder import version_for_side
from .payload import MalformedMatrix, QrMatrix

DARK = "#"
LIGHT = "."


def render_text(matrix: QrMatrix) -> str:
    """Text art, one character per module, quiet zone included."""
    grid = _with_quiet(matrix)
    lines = ["".join(DARK if m else LIGHT for m in row) for row in grid]
    return "\n".join(lines) + "\n"


def render_pbm(matrix: QrMatrix) -> str:
    """Plain PBM (P1); 1 = dark, quiet zone included."""
    grid = _with_quiet(matrix)
    h, w = grid.shape
    rows = ["".join(str(int(m)) for m in row) for row in grid]
    return f"P1\n{w} {h}\n" + "\n".join(rows) + "\n"


def parse_text(text: str) -> QrMatrix:
    rows = [line for line in text.splitlines() if line]
    if not rows:
        raise MalformedMatrix("empty rendering")
    if len(set(map(len, rows))) != 1:
        raise MalformedMatrix("ragged rendering")
    bad = set("".join(rows)) - {DARK, LIGHT}
    if bad:
        raise MalformedMatrix(f"unexpected characters {sorted(bad)!r}")
    grid = np.array([[1 if ch == DARK else 0 for ch in row] for row in rows],
                    dtype=np.uint8)
    return _strip_quiet(grid)

def parse_pbm(text: str) -> QrMatrix:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise MalformedMatrix("not a plain PBM (P1) file")
    try:
        w, h = int(tokens[1]), int(tokens[2])
        cells = [int(t) for t in "".join(tokens[3:])]
    except (IndexError, ValueError) as exc:
        raise MalformedMatrix("unparseable PBM header or cells") from exc
    if len(cells) != w * h or any(c not in (0, 1) for c in cells):
        raise MalformedMatrix("PBM cell data does not match its header")
    grid = np.array(cells, dtype=np.uint8).reshape(h, w)
    return _strip_quiet(grid)


def _with_quiet(matrix: QrMatrix) -> np.ndarray:
    q = matrix.quiet_zone
    return np.pad(matrix.modules, q, mode="constant")


def _strip_quiet(grid: np.ndarray) -> QrMatrix:
    """Locate the symbol by its dark bounding box (finder corners are dark)."""
    dark_rows = np.flatnonzero(grid.any(axis=1))
    dark_cols = np.flatnonzero(grid.any(axis=0))
    if not len(dark_rows):
        raise MalformedMatrix("blank grid")
    r0, r1 = int(dark_rows[0]), int(dark_rows[-1])
    c0, c1 = int(dark_cols[0]), int(dark_cols[-1])
    if r1 - r0 != c1 - c0:
        raise MalformedMatrix("dark bounding box is not square")
    side = r1 - r0 + 1
    version = version_for_side(side)
    quiet = min(r0, c0, grid.shape[0] - 1 - r1, grid.shape[1] - 1 - c1)
    return QrMatrix(version, grid[r0:r1 + 1, c0:c1 + 1].copy(), quiet_zone=quiet)
