"""Reduced cobar complex of E(n)_* with coefficients in a comodule.

C^s = Ebar^{(x)s} (x) M, where Ebar is spanned by taubar_S for nonempty
S in {0..n}, and

    d(a_1|...|a_s|m) = sum_i (-1)^i a_1|..|Dbar(a_i)|..|m + (-1)^{s+1} a_1|...|a_s|alphabar(m).

Used only to certify the Koszul engine in small windows.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np

from ..comodule import Comodule, abstract_comodule, e_deg, trivial_comodule
from ..errors import ConsistencyError, TruncationError, WindowTooLargeError
from ..fp_linalg import Subquotient, rank
from .koszul import ExtChart

MAX_CELLS = 20_000_000


@lru_cache(maxsize=None)
def reduced_basis(p: int, n: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    """(S, degree) for the nonempty subsets S of {0..n}."""
    out = []
    for r in range(1, n + 2):
        for S in combinations(range(n + 1), r):
            out.append((S, sum(e_deg(p, i) for i in S)))
    return tuple(out)


@lru_cache(maxsize=None)
def reduced_coproduct(S: Tuple[int, ...]) -> Tuple[Tuple[int, Tuple[int, ...], Tuple[int, ...]], ...]:
    """Dbar(taubar_S) as (sign, A, B) with A, B nonempty and A u B = S.

    Each taubar_i is primitive; the sign counts the odd elements of B that
    pass odd elements of A when the product of (t (x) 1 + 1 (x) t) is expanded.
    """
    out = []
    k = len(S)
    for mask in range(1, (1 << k) - 1):
        A = tuple(S[j] for j in range(k) if mask >> j & 1)
        B = tuple(S[j] for j in range(k) if not mask >> j & 1)
        inv = sum(1 for a in A for b in B if b < a)
        out.append((-1 if inv % 2 else 1, A, B))
    return tuple(out)


class CobarComplex:
    def __init__(self, c: Comodule, n: int = None, max_cells: int = MAX_CELLS):
        self.c = c
        self.p = c.p
        self.n = c.n if n is None else n
        self.bar = reduced_basis(self.p, self.n)
        self.max_cells = max_cells
        self._basis = {}
        self._d = {}

    def basis(self, s: int, t: int) -> Tuple[list, dict]:
        key = (s, t)
        if key not in self._basis:
            lo = min(self.c.basis) if self.c.basis else 0
            labels = []
            for word in self._words(s, t - lo):
                tt = t - sum(d for _, d in word)
                for k in range(self.c.dim(tt)):
                    labels.append((tuple(S for S, _ in word), tt, k))
            self._basis[key] = (labels, {lab: j for j, lab in enumerate(labels)})
        return self._basis[key]

    def _words(self, s: int, budget: int):
        if s == 0:
            yield ()
            return
        for S, d in self.bar:
            if d <= budget:
                for rest in self._words(s - 1, budget - d):
                    yield ((S, d),) + rest

    def dim(self, s: int, t: int) -> int:
        return len(self.basis(s, t)[0])

    def d(self, s: int, t: int) -> np.ndarray:
        key = (s, t)
        if key in self._d:
            return self._d[key]
        src, _ = self.basis(s, t)
        _, where = self.basis(s + 1, t)
        if len(src) * len(where) > self.max_cells:
            raise WindowTooLargeError(f"cobar C^{s + 1},{t} x C^{s},{t} exceeds {self.max_cells} entries")
        mat = np.zeros((len(where), len(src)), dtype=np.int64)
        for col, (word, tt, k) in enumerate(src):
            for i, S in enumerate(word, start=1):
                sign = -1 if i % 2 else 1
                for sg, A, B in reduced_coproduct(S):
                    new = word[:i - 1] + (A, B) + word[i:]
                    mat[where[(new, tt, k)], col] += sign * sg
            last = 1 if (s + 1) % 2 == 0 else -1
            for S, _ in self.bar:
                tt2 = tt - sum(e_deg(self.p, i) for i in S)
                if not self.c.dim(tt2):
                    continue
                comp = self.c.coaction_component(S, tt)[:, k]
                for r in np.flatnonzero(comp):
                    mat[where[(word + (S,), tt2, int(r))], col] += last * int(comp[r])
        mat %= self.p
        self._d[key] = mat
        return mat

    def check_d_squared(self, s: int, t: int):
        if np.any((self.d(s + 1, t) @ self.d(s, t)) % self.p):
            raise ConsistencyError(f"cobar d^2 != 0 at ({s},{t})")

    def homology(self, s: int, t: int) -> Subquotient:
        d_in = self.d(s - 1, t) if s > 0 else None
        return Subquotient(self.p, self.dim(s, t), d_in, self.d(s, t))

    def ext_dim(self, s: int, t: int) -> int:
        r_out = rank(self.d(s, t), self.p) if self.dim(s, t) and self.dim(s + 1, t) else 0
        r_in = rank(self.d(s - 1, t), self.p) if s > 0 and self.dim(s, t) and self.dim(s - 1, t) else 0
        return self.dim(s, t) - r_out - r_in


def cobar_ext_oracle(c: Comodule, s_max: int, t_max: int, n: int = None, check: bool = True,
                     max_cells: int = MAX_CELLS) -> ExtChart:
    """Ext dims from the reduced cobar complex; raises WindowTooLargeError past max_cells."""
    if t_max > c.complete_through:
        raise TruncationError(f"t={t_max} exceeds the completeness bound of {c.name}")
    cx = CobarComplex(c, n, max_cells)
    lo = min(c.basis) if c.basis else 0
    dims = {}
    for t in range(lo, t_max + 1):
        for s in range(s_max + 1):
            if check and s < s_max:
                cx.check_d_squared(s, t)
            dims[(s, t)] = cx.ext_dim(s, t)
    return ExtChart(c.p, c.name, cx.n, (s_max, t_max), dims)


def diff_charts(a: ExtChart, b: ExtChart) -> List[Tuple[int, int, int, int]]:
    """Cells (s, t, dim_a, dim_b) where two charts over the same window disagree."""
    keys = sorted(set(a.dims) | set(b.dims))
    return [(s, t, a.dim(s, t), b.dim(s, t)) for s, t in keys if a.dim(s, t) != b.dim(s, t)]


def exterior_on(p: int, n: int, i: int, free: bool = True) -> Comodule:
    """E(taubar_i) as an E(n)_*-comodule: free (Q_i taubar_i = 1) or trivial."""
    qi = {(i, "t%d" % i): {"1": 1}} if free else {}
    return abstract_comodule(p, n, {0: ["1"], e_deg(p, i): ["t%d" % i]}, qi,
                             name=f"E(t{i})" + ("" if free else " trivial"))


@dataclass
class ConnectingMapReport:
    cells: Dict[Tuple[int, int], bool]
    injective: Dict[Tuple[int, int], bool]

    @property
    def ok(self) -> bool:
        return all(self.cells.values()) and all(self.injective.values())


def connecting_map_check(p: int, n: int, i: int, s_max: int, t_max: int) -> ConnectingMapReport:
    """Connecting map of 0 -> F_p -> E(taubar_i) -> Sigma^{e_i} F_p -> 0 in the cobar complex.

    For each class x in Ext^{s,t}(F_p) the lift x|taubar_i is pushed through d;
    the result must equal (-1)^{s+1} [x | taubar_i], i.e. v_i times x, and v_i
    must act injectively.
    """
    e = e_deg(p, i)
    fp = CobarComplex(trivial_comodule(p, n))
    ext = CobarComplex(exterior_on(p, n, i))
    Si = (i,)
    cells, inj = {}, {}
    for t in range(0, t_max - e + 1):
        for s in range(s_max):
            h = fp.homology(s, t)
            if not h.rank:
                continue
            src, _ = fp.basis(s, t)
            _, lift_where = ext.basis(s, t + e)
            _, tgt_where = fp.basis(s + 1, t + e)
            dext = ext.d(s, t + e)
            ext_labels, _ = ext.basis(s + 1, t + e)
            images = []
            for rep in h.reps:
                lift = np.zeros(ext.dim(s, t + e), dtype=np.int64)
                for col in np.flatnonzero(rep):
                    word, _, _ = src[col]
                    lift[lift_where[(word, e, 0)]] = rep[col]
                up = (dext @ lift) % p
                delta = np.zeros(fp.dim(s + 1, t + e), dtype=np.int64)
                for r in np.flatnonzero(up):
                    word, tt, k = ext_labels[r]
                    if tt != 0:
                        raise ConsistencyError("connecting map left the subcomodule")
                    delta[tgt_where[(word, 0, 0)]] = up[r]
                expect = np.zeros_like(delta)
                sign = 1 if (s + 1) % 2 == 0 else -1
                for col in np.flatnonzero(rep):
                    word, _, _ = src[col]
                    expect[tgt_where[(word + (Si,), 0, 0)]] = sign * rep[col]
                cells[(s, t)] = cells.get((s, t), True) and not np.any((delta - expect) % p)
                images.append(delta)
            target = fp.homology(s + 1, t + e)
            coords = target.coords(np.array(images))
            inj[(s, t)] = rank(coords, p) == h.rank if coords.size else False
    return ConnectingMapReport(cells, inj)
