"""Exact linear algebra over a prime field F_p.

Matrices are stored sparsely (:class:`FpMatrix`) but reduced densely with
numpy int64 row operations; at the sizes met here (a few thousand columns at
most) that is both simpler and faster than sparse elimination.

Pivoting is deterministic: the lowest available column, then the lowest row.
"""
from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .errors import UsageError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p: int) -> int:
    """Validate ``p`` as an odd prime and return it."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise UsageError(f"p={p!r} is not a prime")
    if p == 2:
        raise UsageError("p=2 is not supported; odd primes only")
    return int(p)


class FpMatrix:
    """Immutable sparse matrix over F_p; no stored zeros."""

    __slots__ = ("p", "rows", "cols", "_entries", "_dense")

    def __init__(self, p: int, rows: int, cols: int, entries=None):
        self.p = p
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise UsageError(f"entry ({r},{c}) outside {rows}x{cols}")
            v %= p
            if v:
                clean[(r, c)] = v
        self._entries = clean
        self._dense = None

    @classmethod
    def from_dense(cls, p: int, a) -> "FpMatrix":
        a = np.asarray(a, dtype=np.int64)
        if a.ndim != 2:
            if a.size:
                raise UsageError("from_dense expects a 2-d array")
            a = a.reshape(0, 0)
        rows, cols = a.shape
        r_idx, c_idx = np.nonzero(a % p)
        entries = {(int(r), int(c)): int(a[r, c]) for r, c in zip(r_idx, c_idx)}
        return cls(p, rows, cols, entries)

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls(p, n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, rows, cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self):
        return dict(self._entries)

    def nnz(self) -> int:
        return len(self._entries)

    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            a = np.zeros((self.rows, self.cols), dtype=np.int64)
            for (r, c), v in self._entries.items():
                a[r, c] = v
            a.setflags(write=False)
            self._dense = a
        return self._dense.copy()

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            return FpMatrix.from_dense(self.p, (self.to_dense() @ other.to_dense()) % self.p)
        v = np.asarray(other, dtype=np.int64)
        return (self.to_dense() @ v) % self.p

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.p, self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (self.p, self.rows, self.cols, self._entries) == (
            other.p, other.rows, other.cols, other._entries)

    def __hash__(self):
        return hash((self.p, self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# dense kernels


def rref(a: np.ndarray, p: int):
    """Reduced row echelon form of a dense array. Returns (R, pivots)."""
    a = np.array(a, dtype=np.int64) % p
    if a.ndim != 2:
        raise UsageError("rref expects a 2-d array")
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of {v : a v = 0}, one row per free column."""
    a = np.asarray(a, dtype=np.int64)
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    r, pivots = rref(a, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = (-r[i, f]) % p
    return out


def row_space(vectors: np.ndarray, p: int) -> np.ndarray:
    """RREF basis (nonzero rows only) of the span of the given rows."""
    vectors = np.asarray(vectors, dtype=np.int64)
    if vectors.shape[0] == 0:
        return vectors.reshape(0, vectors.shape[1] if vectors.ndim == 2 else 0)
    r, pivots = rref(vectors, p)
    return r[: len(pivots)]


def solve(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Some x with a x = b, or None."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    nrows, ncols = a.shape
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    r, pivots = rref(aug, p)
    if pivots and pivots[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, ncols]
    return x


class Subquotient:
    """ker(d_out) / im(d_in) inside a fixed coordinate space F_p^dim.

    ``d_in`` maps into the space (shape dim x *), ``d_out`` maps out of it
    (shape * x dim); either may be None for the zero map.  Representatives are
    canonical: they vanish on boundary pivots and are in RREF among
    themselves.
    """

    def __init__(self, p: int, dim: int, d_in=None, d_out=None, check=True):
        self.p = p
        self.dim = dim
        if d_in is not None and np.size(d_in):
            self.boundaries = row_space(np.asarray(d_in).T, p)
        else:
            self.boundaries = np.zeros((0, dim), dtype=np.int64)
        self.b_pivots = [int(np.flatnonzero(row)[0]) for row in self.boundaries]
        if d_out is not None and np.size(d_out):
            cycles = nullspace(d_out, p)
        else:
            cycles = np.eye(dim, dtype=np.int64)
        if check and self.boundaries.shape[0] and d_out is not None and np.size(d_out):
            if np.any((np.asarray(d_out) @ self.boundaries.T) % p):
                raise ArithmeticError("d_out . d_in != 0")
        cycles = self._reduce(cycles)
        reps = row_space(cycles, p) if cycles.shape[0] else cycles
        self.reps = reps
        self.h_pivots = [int(np.flatnonzero(row)[0]) for row in reps]

    @property
    def rank(self) -> int:
        return self.reps.shape[0]

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.int64) % self.p
        if self.boundaries.shape[0]:
            v = (v - v[..., self.b_pivots] @ self.boundaries) % self.p
        return v

    def coords(self, v) -> np.ndarray:
        """Coordinates of cycle(s) ``v`` in the homology basis.

        Raises ArithmeticError if some row is not a cycle.
        """
        v = np.asarray(v, dtype=np.int64)
        single = v.ndim == 1
        v = self._reduce(v.reshape(-1, self.dim))
        c = v[:, self.h_pivots] if self.h_pivots else np.zeros((v.shape[0], 0), dtype=np.int64)
        resid = (v - c @ self.reps) % self.p if self.h_pivots else v
        if np.any(resid):
            raise ArithmeticError("vector is not a cycle of this subquotient")
        return c[0] if single else c

    def is_boundary(self, v) -> bool:
        return not np.any(self._reduce(np.asarray(v).reshape(1, -1)))


# ---------------------------------------------------------------------------
# FpMatrix-level API


def row_reduce(m: FpMatrix):
    """Return (reduced, rank, pivots) with ``reduced`` in RREF."""
    if m.rows == 0 or m.cols == 0:
        return FpMatrix.zero(m.p, m.rows, m.cols), 0, []
    r, pivots = rref(m.to_dense(), m.p)
    return FpMatrix.from_dense(m.p, r), len(pivots), pivots


def matrix_rank(m: FpMatrix) -> int:
    return row_reduce(m)[1]


def kernel_basis(m: FpMatrix) -> list:
    """Basis of ker(m) as tuples of residues; length cols - rank."""
    if m.cols == 0:
        return []
    if m.rows == 0:
        ns = np.eye(m.cols, dtype=np.int64)
    else:
        ns = nullspace(m.to_dense(), m.p)
    return [tuple(int(x) for x in row) for row in ns]


def preimage(m: FpMatrix, target: Iterable[int]):
    """Some v with m v = target, or None when target is not in the image."""
    target = np.asarray(list(target), dtype=np.int64)
    if target.shape[0] != m.rows:
        raise UsageError(f"target length {target.shape[0]} != rows {m.rows}")
    if m.cols == 0:
        return () if not np.any(target % m.p) else None
    x = solve(m.to_dense(), target, m.p)
    return None if x is None else tuple(int(v) for v in x)
