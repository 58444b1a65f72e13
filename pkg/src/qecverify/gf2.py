"""Small GF(2) linear algebra toolkit on numpy uint8 arrays."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np


def as_gf2(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def rref(a: np.ndarray) -> Tuple[np.ndarray, list]:
    """Reduced row echelon form; returns (matrix, pivot column list)."""
    m = as_gf2(a).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot_rows = np.nonzero(m[r:, c])[0]
        if pivot_rows.size == 0:
            continue
        p = r + pivot_rows[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    _, pivots = rref(a)
    return len(pivots)


def solve(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """One solution x of A x = b over GF(2), or None."""
    a = as_gf2(a)
    b = as_gf2(b).reshape(-1)
    rows, cols = a.shape
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    m, pivots = rref(aug)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = m[r, cols]
    return x


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis of the right null space, rows are basis vectors."""
    a = as_gf2(a)
    rows, cols = a.shape
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for r, c in enumerate(pivots):
            if m[r, f]:
                v[c] = 1
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.uint8)
    return np.array(basis, dtype=np.uint8)


def in_rowspace(a: np.ndarray, v: np.ndarray) -> bool:
    return solve(as_gf2(a).T, v) is not None
