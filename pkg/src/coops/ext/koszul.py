"""Ext over E(n)_* as homology of M (x) F_p[v_0..v_n] with d = sum_i v_i Q_i.

v_i sits in bidegree (s, t) = (1, 2p^i - 1) and d preserves t, so
C^{s,t} = sum over a_0 + ... + a_n = s of M_{t - sum a_i e_i} v^a.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..comodule import Comodule, e_deg
from ..errors import ConsistencyError, TruncationError, UsageError
from ..fp_linalg import Subquotient


@lru_cache(maxsize=None)
def exponent_vectors(k: int, s: int) -> Tuple[Tuple[int, ...], ...]:
    """All length-k tuples of non-negative ints summing to s, v_0-heavy first."""
    if k == 1:
        return ((s,),)
    out = []
    for a in range(s, -1, -1):
        out.extend((a,) + rest for rest in exponent_vectors(k - 1, s - a))
    return tuple(out)


def format_v(alpha) -> str:
    parts = []
    for i, a in enumerate(alpha):
        if a == 1:
            parts.append(f"v{i}")
        elif a > 1:
            parts.append(f"v{i}^{a}")
    return " ".join(parts)


def term_name(alpha, label) -> str:
    v = format_v(alpha)
    m = str(label)
    if not v:
        return m
    return v if m == "1" else f"{v} {m}"


class KoszulComplex:
    """The complex computing Ext_{E(n)_*}(F_p, c); n defaults to c.n."""

    def __init__(self, c: Comodule, n: Optional[int] = None):
        self.c = c
        self.p = c.p
        self.n = c.n if n is None else n
        if not 0 <= self.n <= c.n:
            raise UsageError(f"n={n} outside 0..{c.n}")
        self.e = [e_deg(self.p, i) for i in range(self.n + 1)]
        self._layout = {}
        self._d = {}
        self._h = {}

    @property
    def top(self) -> float:
        return self.c.complete_through

    def check_window(self, t_max: int):
        if t_max > self.top:
            raise TruncationError(f"t={t_max} exceeds the completeness bound {self.top} of {self.c.name}")

    def layout(self, s: int, t: int):
        """Blocks (alpha, degree of m, start column, size) making up C^{s,t}."""
        key = (s, t)
        if key not in self._layout:
            blocks, start = [], 0
            for alpha in exponent_vectors(self.n + 1, s):
                tt = t - sum(a * e for a, e in zip(alpha, self.e))
                size = self.c.dim(tt)
                if size:
                    blocks.append((alpha, tt, start, size))
                    start += size
            self._layout[key] = (blocks, start, {b[0]: b for b in blocks})
        return self._layout[key]

    def dim(self, s: int, t: int) -> int:
        return self.layout(s, t)[1] if s >= 0 else 0

    def labels(self, s: int, t: int) -> List[Tuple[tuple, object]]:
        out = []
        for alpha, tt, _, size in self.layout(s, t)[0]:
            out.extend((alpha, lab) for lab in self.c.basis[tt])
        return out

    def d(self, s: int, t: int) -> np.ndarray:
        """Matrix of d: C^{s,t} -> C^{s+1,t}."""
        key = (s, t)
        if key not in self._d:
            blocks, dim, _ = self.layout(s, t)
            _, dim2, where = self.layout(s + 1, t)
            mat = np.zeros((dim2, dim), dtype=np.int64)
            for alpha, tt, start, size in blocks:
                for i in range(self.n + 1):
                    beta = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1:]
                    if beta not in where:
                        continue
                    _, _, start2, size2 = where[beta]
                    mat[start2:start2 + size2, start:start + size] += self.c.q_matrix(i, tt)
            mat %= self.p
            self._d[key] = mat
        return self._d[key]

    def check_d_squared(self, s: int, t: int):
        if np.any((self.d(s + 1, t) @ self.d(s, t)) % self.p):
            raise ConsistencyError(f"d^2 != 0 at (s,t)=({s},{t}) for {self.c.name}")

    def homology(self, s: int, t: int) -> Subquotient:
        key = (s, t)
        if key not in self._h:
            d_in = self.d(s - 1, t) if s > 0 else None
            self._h[key] = Subquotient(self.p, self.dim(s, t), d_in, self.d(s, t))
        return self._h[key]

    def vector(self, s: int, t: int, terms: Dict[Tuple[tuple, object], int]) -> np.ndarray:
        """Coordinates of sum c * (v^alpha m) for terms {(alpha, label): c}."""
        _, dim, where = self.layout(s, t)
        vec = np.zeros(dim, dtype=np.int64)
        for (alpha, lab), coeff in terms.items():
            alpha = tuple(alpha) + (0,) * (self.n + 1 - len(alpha))
            if alpha not in where:
                raise UsageError(f"{term_name(alpha, lab)} does not lie in C^{s},{t}")
            _, tt, start, _ = where[alpha]
            idx = self.c.index[tt].get(lab)
            if idx is None:
                raise UsageError(f"{lab} is not a basis element of {self.c.name} in degree {tt}")
            vec[start + idx] += coeff
        return vec % self.p

    def times_v(self, i: int, s: int, t: int, vec) -> np.ndarray:
        """Multiply by v_i: C^{s,t} -> C^{s+1,t+e_i}."""
        vec = np.asarray(vec, dtype=np.int64)
        blocks, _, _ = self.layout(s, t)
        _, dim2, where = self.layout(s + 1, t + self.e[i])
        out = np.zeros(vec.shape[:-1] + (dim2,), dtype=np.int64)
        for alpha, tt, start, size in blocks:
            beta = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1:]
            start2 = where[beta][2]
            out[..., start2:start2 + size] = vec[..., start:start + size]
        return out

    def format_vector(self, s: int, t: int, vec) -> str:
        labs = self.labels(s, t)
        parts = []
        for k, c in enumerate(np.asarray(vec) % self.p):
            if c:
                name = term_name(*labs[k])
                parts.append(name if c == 1 else f"{c} {name}")
        return " + ".join(parts) if parts else "0"

    def leading_name(self, s: int, t: int, vec) -> str:
        k = int(np.flatnonzero(np.asarray(vec) % self.p)[0])
        return term_name(*self.labels(s, t)[k])


def build_koszul(c: Comodule, n: Optional[int] = None, check_window: Optional[Tuple[int, int]] = None) -> KoszulComplex:
    """The Koszul complex of c; with check_window=(s_max, t_max) verify d^2 = 0 there."""
    k = KoszulComplex(c, n)
    if check_window is not None:
        s_max, t_max = check_window
        for t in range(t_max + 1):
            for s in range(s_max):
                k.check_d_squared(s, t)
    return k


@dataclass
class ExtChart:
    p: int
    module: str
    n: int
    window: Tuple[int, int]
    dims: Dict[Tuple[int, int], int]
    generators: Dict[Tuple[int, int], List[str]] = field(default_factory=dict)
    v_mult: Dict[int, Dict[Tuple[int, int], np.ndarray]] = field(default_factory=dict)
    complex: Optional[KoszulComplex] = None

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def in_window(self, s: int, t: int) -> bool:
        return 0 <= s <= self.window[0] and t <= self.window[1]

    def v_image(self, i: int, s: int, t: int) -> Optional[np.ndarray]:
        """Matrix whose row r is v_i times class r of (s,t), in target coordinates."""
        return self.v_mult.get(i, {}).get((s, t))

    def format_class(self, s: int, t: int, coords) -> str:
        names = self.generators.get((s, t), [])
        parts = []
        for k, c in enumerate(np.asarray(coords) % self.p):
            if c:
                parts.append(names[k] if c == 1 else f"{c} {names[k]}")
        return " + ".join(parts) if parts else "0"


def ext_dims(k: KoszulComplex, s_max: int, t_max: int, names: bool = True, check: bool = True) -> ExtChart:
    """Ext^{s,t} for s <= s_max, t <= t_max."""
    k.check_window(t_max)
    lo = min(k.c.basis) if k.c.basis else 0
    dims, gens = {}, {}
    for t in range(lo, t_max + 1):
        for s in range(s_max + 1):
            if check:
                k.check_d_squared(s, t)
            h = k.homology(s, t)
            dims[(s, t)] = h.rank
            if names and h.rank:
                gens[(s, t)] = [k.leading_name(s, t, r) for r in h.reps]
    return ExtChart(k.p, k.c.name, k.n, (s_max, t_max), dims, gens, {}, k)


def v_multiplication(chart: ExtChart, i: int) -> ExtChart:
    """Fill chart.v_mult[i] for every class whose v_i multiple stays in the window."""
    k = chart.complex
    if k is None or not 0 <= i <= k.n:
        raise UsageError(f"v_{i} is not available on this chart")
    e = k.e[i]
    out = {}
    for (s, t), dim in chart.dims.items():
        if not dim or not chart.in_window(s + 1, t + e):
            continue
        reps = k.homology(s, t).reps
        out[(s, t)] = k.homology(s + 1, t + e).coords(k.times_v(i, s, t, reps)).reshape(dim, -1)
    chart.v_mult[i] = out
    return chart


def torsion_report(chart: ExtChart, i: int) -> Dict[Tuple[int, int, int], object]:
    """For class r at (s,t): least k with v_i^k x = 0, or "free in window"."""
    if i not in chart.v_mult:
        v_multiplication(chart, i)
    e = chart.complex.e[i]
    report = {}
    for (s, t), dim in chart.dims.items():
        for r in range(dim):
            vec = np.zeros(dim, dtype=np.int64)
            vec[r] = 1
            ss, tt, order = s, t, None
            while True:
                mat = chart.v_image(i, ss, tt)
                if mat is None:
                    break
                vec = (vec @ mat) % chart.p if mat.size else np.zeros(0, dtype=np.int64)
                ss, tt = ss + 1, tt + e
                if not vec.any():
                    order = ss - s
                    break
            report[(s, t, r)] = order if order is not None else "free in window"
    return report


def is_zero_in_ext(k: KoszulComplex, s: int, t: int, terms: Dict[Tuple[tuple, object], int]) -> bool:
    """Whether sum c * (v^alpha m) is a cycle that bounds."""
    vec = k.vector(s, t, terms)
    if np.any((k.d(s, t) @ vec) % k.p):
        raise ConsistencyError("element is not a cycle")
    return k.homology(s, t).is_boundary(vec)
