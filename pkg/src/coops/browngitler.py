"""Weight filtrations of A//E(i): Brown-Gitler pieces and the four-term sequences.

N_i(j) is spanned by the A//E(i) monomials of weight <= pj and M_i(j) by those of
weight exactly pj; ell_j = N_1(j).  The index shift zeta_k -> zeta_{k-1},
taubar_k -> taubar_{k-1} (dropping zeta_1) identifies M_i(j) with a
suspension of N_{i-1}(j // p).

Suspensions are tracked as an integer beside each comodule, never folded into
the monomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .comodule import Comodule, a_mod_en_by_weight, direct_sum, e_deg, monomial_comodule, suspend, tensor
from .errors import ConsistencyError, ExactnessError, UsageError
from .fp_linalg import check_prime, rank
from .milnor import Monomial, sort_key


def pfloor(j: int, p: int) -> int:
    """The single place where j // p is taken for N/M reindexing."""
    if j < 0:
        raise UsageError("index must be >= 0")
    return j // p


def q_of(p: int) -> int:
    return 2 * (p - 1)


def shift_down(m: Monomial) -> Monomial:
    """Drop zeta_1 and lower every other index by one."""
    if 0 in m.tau:
        raise UsageError(f"cannot shift {m}: contains taubar_0")
    return Monomial(m.zeta[1:], tuple(k - 1 for k in m.tau), m.conj)


def shift_up(m: Monomial) -> Monomial:
    return Monomial((0,) + m.zeta, tuple(k + 1 for k in m.tau), m.conj)


def times_zeta1(m: Monomial, a: int) -> Monomial:
    z = list(m.zeta) or [0]
    z[0] += a
    return Monomial(tuple(z), m.tau, m.conj)


@dataclass
class BrownGitlerComodule:
    i: int
    j: int
    kind: str
    comodule: Comodule
    suspension: int = 0

    @property
    def basis(self) -> List[Monomial]:
        return [m for b in self.comodule.basis.values() for m in b]


def build_bg(p: int, i: int, j: int, kind: str = "N", coalgebra_n: Optional[int] = None) -> BrownGitlerComodule:
    """N_i(j) (kind "N") or M_i(j) (kind "M") as an E(coalgebra_n)-comodule."""
    check_prime(p)
    if j < 0 or i < 0:
        raise UsageError("need i, j >= 0")
    if kind not in ("N", "M"):
        raise UsageError("kind must be N or M")
    mons = a_mod_en_by_weight(p, i, p * j, exact=(kind == "M"))
    n = i if coalgebra_n is None else coalgebra_n
    name = f"{'N' if kind == 'N' else 'M'}_{i}({j})"
    return BrownGitlerComodule(i, j, kind, monomial_comodule(p, n, mons, name=name))


def ell(p: int, j: int, coalgebra_n: int = 1) -> Comodule:
    """ell_j = N_1(j), the j-th Brown-Gitler comodule of A//E(1)."""
    c = build_bg(p, 1, j, "N", coalgebra_n).comodule
    c.name = f"l_{j}"
    return c


# ---------------------------------------------------------------------------
# maps between comodules

@dataclass
class ComoduleMap:
    source: Comodule
    target: Comodule
    matrices: Dict[int, np.ndarray]   # source degree t -> (dim target_t x dim source_t)
    degree: int = 0

    def matrix(self, t: int) -> np.ndarray:
        m = self.matrices.get(t)
        if m is None:
            return np.zeros((self.target.dim(t + self.degree), self.source.dim(t)), dtype=np.int64)
        return m

    def check_q_compatible(self):
        """f Q_s = Q_s f on every degree, for every s both sides support."""
        p = self.source.p
        n = min(self.source.n, self.target.n)
        for t in self.source.basis:
            for s in range(n + 1):
                e = e_deg(p, s)
                lhs = self.matrix(t - e) @ self.source.q_matrix(s, t)
                rhs = self.target.q_matrix(s, t + self.degree) @ self.matrix(t)
                if np.any((lhs - rhs) % p):
                    raise ConsistencyError(
                        f"map {self.source.name} -> {self.target.name} does not commute with Q_{s} at t={t}")


def map_from_labels(source: Comodule, target: Comodule, image, degree: int = 0) -> ComoduleMap:
    """Build a map from ``image(label) -> {target label: coeff}``."""
    p = source.p
    mats = {}
    for t, b in source.basis.items():
        mat = np.zeros((target.dim(t + degree), len(b)), dtype=np.int64)
        for col, lab in enumerate(b):
            for tl, c in image(lab).items():
                row = target.index.get(t + degree, {}).get(tl)
                if row is None:
                    raise ConsistencyError(f"image {tl} of {lab} is not in degree {t + degree} of {target.name}")
                mat[row, col] = (mat[row, col] + c) % p
        mats[t] = mat
    return ComoduleMap(source, target, mats, degree)


# ---------------------------------------------------------------------------
# the isomorphisms

@dataclass
class PhiMap:
    """phi_i : M_i(j) -> Sigma^{qj} N_{i-1}(j // p) on bases."""
    p: int
    i: int
    j: int
    source: Comodule
    target: Comodule     # already suspended by qj
    forward: Dict[Monomial, Monomial]
    backward: Dict[Monomial, Monomial]
    shift: int


def phi(m: Monomial) -> Monomial:
    """phi on a basis monomial: drop the zeta_1 power and shift indices down."""
    return shift_down(m)


def phi_inverse(p: int, j: int, y: Monomial) -> Monomial:
    """Inverse of phi on M_i(j): shift up, then restore zeta_1^a with a = j - wt(y)."""
    a = j - y.weight(p)
    if a < 0:
        raise UsageError(f"{y} has weight above {j}")
    return times_zeta1(shift_up(y), a)


def phi_map(p: int, i: int, j: int) -> PhiMap:
    if i < 1:
        raise UsageError("phi_i needs i >= 1")
    src = build_bg(p, i, j, "M").comodule
    tgt_bg = build_bg(p, i - 1, pfloor(j, p), "N", coalgebra_n=i)
    shift = q_of(p) * j
    tgt = suspend(tgt_bg.comodule, shift, name=f"S^{shift} N_{i - 1}({pfloor(j, p)})")
    fwd, back = {}, {}
    for b in src.basis.values():
        for m in b:
            y = phi(m)
            if y in fwd.values():
                raise ConsistencyError(f"phi is not injective at {m}")
            fwd[m] = y
            back[y] = m
    if len(fwd) != tgt.total_dim():
        raise ConsistencyError("phi is not a bijection of bases")
    for y in (m for b in tgt.basis.values() for m in b):
        if phi_inverse(p, j, y) != back[y]:
            raise ConsistencyError(f"phi inverse formula fails on {y}")
    fmap = map_from_labels(src, tgt, lambda m: {fwd[m]: 1})
    fmap.check_q_compatible()
    return PhiMap(p, i, j, src, tgt, fwd, back, shift)


def zeta1_suspension(p: int, i: int, j: int, k: int) -> ComoduleMap:
    """Multiplication by zeta_1^k : Sigma^{qk} M_i(pj) -> M_i(pj + k), 0 <= k < p."""
    if not 0 <= k < p:
        raise UsageError("need 0 <= k < p")
    src = suspend(build_bg(p, i, p * j, "M").comodule, q_of(p) * k)
    tgt = build_bg(p, i, p * j + k, "M").comodule
    if src.total_dim() != tgt.total_dim():
        raise ConsistencyError("zeta_1 multiplication is not bijective")
    f = map_from_labels(src, tgt, lambda m: {times_zeta1(m, k): 1})
    if any(rank(f.matrix(t), p) != src.dim(t) for t in src.basis):
        raise ConsistencyError("zeta_1 multiplication is not bijective")
    f.check_q_compatible()
    return f


def decomposition_dims(p: int, t_max: int) -> List[int]:
    """Degreewise dims of the sum over k of Sigma^{qk} ell_{k // p}, through t_max."""
    out = [0] * (t_max + 1)
    q = q_of(p)
    k = 0
    while q * k <= t_max:
        piece = ell(p, pfloor(k, p))
        for t, b in piece.basis.items():
            if q * k + t <= t_max:
                out[q * k + t] += len(b)
        k += 1
    return out


# ---------------------------------------------------------------------------
# the filtration of A//E(1) and its quotients

def m_part(m: Monomial) -> Tuple[Monomial, int]:
    """Split an A//E(1) monomial as (m, eps) with m in A//E(2) and the taubar_2^eps factor."""
    if 2 in m.tau:
        return Monomial(m.zeta, tuple(k for k in m.tau if k != 2), m.conj), 1
    return m, 0


def filtration_degree(p: int, m: Monomial) -> int:
    """Largest j with m in F^j A//E(1): wt of the A//E(2) part is >= pj."""
    base, _ = m_part(m)
    return base.weight(p) // p


@dataclass
class FiltrationQuotient:
    j: int
    comodule: Comodule
    kappa: Dict[Monomial, Tuple[Monomial, int]]


def build_q_quotient(p: int, j: int) -> FiltrationQuotient:
    """Q^j A//E(1) = A//E(1) / F^{j+1}, an E(2)-comodule with basis m taubar_2^eps, wt(m) <= pj."""
    if j < 0:
        raise UsageError("need j >= 0")
    base = a_mod_en_by_weight(p, 2, p * j)
    mons = list(base) + [times_tau2(m) for m in base]
    kappa = {}
    for m in mons:
        kappa[m] = m_part(m)
    c = monomial_comodule(p, 2, mons, name=f"Q^{j}A//E(1)",
                          quotient_filter=lambda m: filtration_degree(p, m) > j)
    return FiltrationQuotient(j, c, kappa)


def times_tau2(m: Monomial) -> Monomial:
    return Monomial(m.zeta, tuple(sorted(m.tau + (2,))), m.conj)


# ---------------------------------------------------------------------------
# four-term sequences

def phi_shift(p: int, j: int, k: int) -> int:
    """Suspension of the k-th summand of the last term: q(p(j-1)+k) + |taubar_2|."""
    return q_of(p) * (p * (j - 1) + k) + 2 * p * p - 1


@dataclass
class FourTermSequence:
    p: int
    j: int
    i: int
    terms: List[Comodule]
    maps: List[ComoduleMap]
    shifts: List[int] = field(default_factory=list)
    exact_degrees: int = 0

    @property
    def short_exact(self) -> bool:
        return self.terms[3].total_dim() == 0

    @property
    def suspension(self) -> int:
        """The common suspension q p (pj + i) of the normalized form."""
        return q_of(self.p) * self.p * (self.p * self.j + self.i)


def build_four_term(p: int, j: int, i: int) -> FourTermSequence:
    """0 -> S^{qpj} l_j (x) l_i -> l_{pj+i} -> Q^{pj-1}A//E(1) -> sum_k S^{phi(j,k)} l_{j-1} -> 0."""
    check_prime(p)
    if j < 1 or not 0 <= i < p:
        raise UsageError("need j >= 1 and 0 <= i < p")
    q = q_of(p)
    lj = ell(p, j, coalgebra_n=2)
    li = ell(p, i, coalgebra_n=2)
    t1 = suspend(tensor(lj, li), q * p * j, name=f"S^{q * p * j} l_{j} (x) l_{i}")
    t2 = ell(p, p * j + i, coalgebra_n=2)
    t3 = build_q_quotient(p, p * j - 1).comodule
    lower = ell(p, j - 1, coalgebra_n=2)
    ks = list(range(i + 1, p))
    shifts = [phi_shift(p, j, k) for k in ks]
    t4 = direct_sum([suspend(lower, s) for s in shifts], name="last") if ks else \
        Comodule(p, 2, {}, {}, name="0")

    def f1(lab):
        x, y = lab
        k = y.exponent(1)
        a = p * j - x.weight(p)
        return {times_zeta1(shift_up(x), a + k): 1}

    def f2(m):
        return {m: 1} if filtration_degree(p, m) <= p * j - 1 else {}

    def f3(m):
        base, eps = m_part(m)
        w = base.weight(p)
        k = w // p - p * (j - 1)
        if not eps or k not in ks:
            return {}
        return {(ks.index(k), phi(base)): 1}

    maps = [map_from_labels(t1, t2, f1), map_from_labels(t2, t3, f2), map_from_labels(t3, t4, f3)]
    for f in maps:
        f.check_q_compatible()
    seq = FourTermSequence(p, j, i, [t1, t2, t3, t4], maps, shifts)
    seq.exact_degrees = verify_exactness(seq)
    return seq


def verify_exactness(seq: FourTermSequence) -> int:
    """Rank check of exactness at each term in every degree; returns #degrees checked."""
    p = seq.p
    degrees = sorted(set().union(*(c.basis for c in seq.terms)))
    for t in degrees:
        dims = [c.dim(t) for c in seq.terms]
        ranks = [rank(f.matrix(t), p) if f.matrix(t).size else 0 for f in seq.maps]
        # exact at T1 (injective), T2, T3, T4 (surjective)
        checks = [
            ranks[0] == dims[0],
            dims[1] - ranks[1] == ranks[0],
            dims[2] - ranks[2] == ranks[1],
            ranks[2] == dims[3],
        ]
        for f, g in zip(seq.maps, seq.maps[1:]):
            if np.any((g.matrix(t) @ f.matrix(t)) % p):
                raise ExactnessError(f"composite of consecutive maps is nonzero at t={t}")
        if not all(checks):
            raise ExactnessError(f"four-term sequence (p={p}, j={seq.j}, i={seq.i}) fails at t={t}: "
                                 f"dims {dims}, ranks {ranks}")
    return len(degrees)
