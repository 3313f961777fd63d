"""v_0-inverted Ext and Adams covers.

Setting v_0 = 1 in the Koszul complex and grading by stem t - s gives

    D_N = sum over b of M_{N - sum b_i (2p^i - 2)} v_1^{b_1} ... v_n^{b_n},
    d = Q_0 + v_1 Q_1 + ... + v_n Q_n : D_N -> D_{N-1},

whose homology is v_0^{-1}Ext in stem N.  Reducing mod v_1 leaves (M, Q_0), so
H/v_1 H embeds in the Q_0-Margolis homology of M: generators over
F_p[v_0^{+-1}, v_1] live in stems at most the top degree of M, which makes the
generator count exact rather than a tower-stabilization guess.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..comodule import Comodule, e_deg
from ..errors import TruncationError, UsageError
from ..fp_linalg import Subquotient, nullspace, rank
from ..milnor import Monomial, sort_key
from .koszul import build_koszul, ext_dims, format_v


def _vectors_below(weights: Tuple[int, ...], budget: int):
    """Exponent tuples b with sum b_i w_i <= budget, ordered by total then lex."""
    out = [()]
    for w in weights:
        out = [b + (k,) for b in out for k in range((budget - sum(x * y for x, y in zip(b, weights))) // w + 1)]
    return sorted(out, key=lambda b: (sum(b), tuple(-x for x in b)))


class LocalizedComplex:
    """D = c[v_1..v_n] with d = Q_0 + sum v_i Q_i, graded by stem."""

    def __init__(self, c: Comodule, n: Optional[int] = None):
        if c.top is not None:
            raise TruncationError("v_0-localization needs a finite comodule")
        self.c = c
        self.p = c.p
        self.n = c.n if n is None else n
        if not 1 <= self.n <= c.n:
            raise UsageError("need 1 <= n <= c.n")
        self.w = tuple(e_deg(self.p, i) - 1 for i in range(1, self.n + 1))
        self.lo = min(c.basis) if c.basis else 0
        self.hi = c.max_degree
        self._layout, self._d, self._h = {}, {}, {}

    def layout(self, N: int):
        if N not in self._layout:
            blocks, start = [], 0
            if N >= self.lo:
                for b in _vectors_below(self.w, N - self.lo):
                    tt = N - sum(x * y for x, y in zip(b, self.w))
                    size = self.c.dim(tt)
                    if size:
                        blocks.append((b, tt, start, size))
                        start += size
            self._layout[N] = (blocks, start, {blk[0]: blk for blk in blocks})
        return self._layout[N]

    def dim(self, N: int) -> int:
        return self.layout(N)[1]

    def labels(self, N: int):
        out = []
        for b, tt, _, _ in self.layout(N)[0]:
            out.extend((b, lab) for lab in self.c.basis[tt])
        return out

    def d(self, N: int) -> np.ndarray:
        """d: D_N -> D_{N-1}."""
        if N not in self._d:
            blocks, dim, _ = self.layout(N)
            _, dim2, where = self.layout(N - 1)
            mat = np.zeros((dim2, dim), dtype=np.int64)
            for b, tt, start, size in blocks:
                for i in range(self.n + 1):
                    bb = b if i == 0 else b[:i - 1] + (b[i - 1] + 1,) + b[i:]
                    if bb in where:
                        _, _, s2, z2 = where[bb]
                        mat[s2:s2 + z2, start:start + size] += self.c.q_matrix(i, tt)
            self._d[N] = mat % self.p
        return self._d[N]

    def homology(self, N: int) -> Subquotient:
        if N not in self._h:
            self._h[N] = Subquotient(self.p, self.dim(N), self.d(N + 1), self.d(N))
        return self._h[N]

    def times_v(self, i: int, N: int, vec) -> np.ndarray:
        """Multiply by v_i (i >= 1): D_N -> D_{N + 2p^i - 2}."""
        vec = np.asarray(vec, dtype=np.int64)
        blocks, _, _ = self.layout(N)
        _, dim2, where = self.layout(N + self.w[i - 1])
        out = np.zeros(vec.shape[:-1] + (dim2,), dtype=np.int64)
        for b, tt, start, size in blocks:
            bb = b[:i - 1] + (b[i - 1] + 1,) + b[i:]
            s2 = where[bb][2]
            out[..., s2:s2 + size] = vec[..., start:start + size]
        return out

    def vector(self, N: int, terms: Dict[Tuple[tuple, object], int]) -> np.ndarray:
        _, dim, where = self.layout(N)
        vec = np.zeros(dim, dtype=np.int64)
        for (b, lab), coeff in terms.items():
            b = tuple(b) + (0,) * (self.n - len(b))
            _, tt, start, _ = where[b]
            vec[start + self.c.index[tt][lab]] += coeff
        return vec % self.p

    def name(self, N: int, vec) -> str:
        k = int(np.flatnonzero(np.asarray(vec) % self.p)[0])
        b, lab = self.labels(N)[k]
        v = format_v((0,) + b)
        m = str(lab)
        if not v:
            return m
        return v if m == "1" else f"{v} {m}"

    def v1_cokernel(self, N: int) -> Subquotient:
        """H_N / v_1 H_{N - 2p + 2}, with canonical representatives."""
        w = self.w[0]
        cols = [self.d(N + 1)]
        if self.dim(N - w):
            z = nullspace(self.d(N - w), self.p) if self.dim(N - w - 1) else np.eye(self.dim(N - w), dtype=np.int64)
            if z.shape[0]:
                cols.append(self.times_v(1, N - w, z).T)
        d_in = np.hstack(cols) if cols else None
        return Subquotient(self.p, self.dim(N), d_in, self.d(N), check=False)


@dataclass
class LocalizedExt:
    p: int
    module: str
    generators: List[Tuple[str, int]]
    free: bool
    checked_stems: Tuple[int, int]
    notes: List[str] = field(default_factory=list)

    @property
    def names(self) -> List[str]:
        return [g for g, _ in self.generators]


def v0_inverted_ext(c: Comodule, margin: int = 2) -> LocalizedExt:
    """Generators of v_0^{-1}Ext_{E(1)_*}(c) over F_p[v_0^{+-1}, v_1].

    Generators come from stems lo..hi (see module docstring).  Freeness is
    checked by comparing dim H_N with the count predicted by the generators
    for margin extra v_1-periods past hi.
    """
    lc = LocalizedComplex(c, 1)
    gens = []
    for N in range(lc.lo, lc.hi + 1):
        for rep in lc.v1_cokernel(N).reps:
            gens.append((lc.name(N, rep), N))
    w = lc.w[0]
    free = True
    last = lc.hi + margin * w
    for N in range(lc.lo, last + 1):
        expect = sum(1 for _, g in gens if g <= N and (N - g) % w == 0)
        if lc.homology(N).rank != expect:
            free = False
    return LocalizedExt(c.p, c.name, gens, free, (lc.lo, last))


def expected_bp2_generators(p: int, j: int) -> List[str]:
    """{zeta_1^i zeta_2^k : i + pk <= j} in the text syntax."""
    out = []
    for k in range(j // p + 1):
        for i in range(j - p * k + 1):
            out.append(Monomial((i, k)))
    return [str(m) for m in sorted(out, key=lambda m: sort_key(m, p))]


# ---------------------------------------------------------------------------
# Adams covers


def digit_sum(k: int, p: int) -> int:
    s = 0
    while k:
        s += k % p
        k //= p
    return s


@dataclass
class AdamsCoverDescriptor:
    p: int
    k: int

    @property
    def alpha(self) -> int:
        return digit_sum(self.k, self.p)

    @property
    def index(self) -> int:
        return (self.k - self.alpha) // (self.p - 1)

    @property
    def suspension(self) -> int:
        return 2 * (self.p - 1) * self.k

    def predicted_dim(self, s: int, t: int) -> int:
        """Dim of Sigma^{2(p-1)k} of the index-th Adams cover of F_p[v_0, v_1].

        The cover keeps the classes v_0^a v_1^b with a + b >= index and moves them
        from (a+b, a+b(2p-1)) to (a+b-index, a+b(2p-1)-index).
        """
        n = self.index
        tt = t - self.suspension + n
        total = s + n
        count = 0
        for b in range(total + 1):
            if (total - b) + b * (2 * self.p - 1) == tt:
                count += 1
        return count


@dataclass
class AdamsCoverReport:
    descriptor: AdamsCoverDescriptor
    window: Tuple[int, int]
    mismatches: List[Tuple[int, int, int, int]]
    cells: int

    @property
    def ok(self) -> bool:
        return not self.mismatches


def adams_cover_check(p: int, k: int, s_max: int = 8, margin: int = 3, t_extra: int = 0) -> AdamsCoverReport:
    """Compare Ext_{E(1)_*}(M_1(k)) mod v_0-torsion with the predicted Adams cover.

    The torsion-free rank at (s,t) is the rank of v_0^{s_max - s} into the top
    row, read for s <= s_max - margin so that short v_0-torsion has died.
    """
    from ..browngitler import build_bg
    desc = AdamsCoverDescriptor(p, k)
    c = build_bg(p, 1, k, "M").comodule
    t_max = c.max_degree + (s_max + 1) * (2 * p - 1) + t_extra
    chart = ext_dims(build_koszul(c), s_max, t_max, names=False)
    kx = chart.complex
    mism, cells = [], 0
    for s in range(s_max - margin + 1):
        K = s_max - s
        for t in range(t_max - K + 1):
            h = kx.homology(s, t)
            if h.rank:
                vec = h.reps
                for _ in range(K):
                    vec = kx.times_v(0, s + _, t + _, vec)
                img = kx.homology(s_max, t + K).coords(vec)
                got = rank(img.reshape(h.rank, -1), p) if img.size else 0
            else:
                got = 0
            want = desc.predicted_dim(s, t)
            cells += 1
            if got != want:
                mism.append((s, t, got, want))
    return AdamsCoverReport(desc, (s_max - margin, t_max), mism, cells)
