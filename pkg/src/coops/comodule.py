"""Finite graded E(n)_*-comodules and their Q_i actions.

A comodule is stored by its graded basis and, for each i <= n, the matrices of
Q_i : M_t -> M_{t - e_i} with e_i = 2p^i - 1.  The full coaction is recovered
from these: for S = {i_1 < ... < i_k} the coefficient of taubar_S in alpha(u)
is Q_{i_k} ... Q_{i_1} u.  Monomial comodules compute the coaction directly
from the coproduct and cross-check both descriptions.

Degree truncations carry ``top``: everything in degrees <= top is exact.
Finite comodules (weight-bounded pieces) use ``top = None``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConsistencyError, TruncationError, UsageError
from .fp_linalg import FpMatrix, Subquotient, row_space, rref
from .milnor import (
    AlgebraSpec, Element, Monomial, basis_up_to, enumerate_monomials, mono_mul, sort_key,
)


def e_deg(p: int, i: int) -> int:
    """Degree of taubar_i, which is also how far Q_i lowers degree."""
    return 2 * p ** i - 1


class Comodule:
    """Graded F_p basis with Q_0..Q_n matrices; degrees include any suspension."""

    def __init__(self, p: int, n: int, basis: Dict[int, list], q: Dict[Tuple[int, int], np.ndarray],
                 top: Optional[int] = None, name: str = "", shift: int = 0, check: bool = True):
        self.p = p
        self.n = n
        self.basis = {t: list(b) for t, b in sorted(basis.items()) if b}
        self.index = {t: {lab: k for k, lab in enumerate(b)} for t, b in self.basis.items()}
        self.top = top
        self.name = name
        self.shift = shift
        self.q = {}
        for (i, t), mat in q.items():
            mat = np.asarray(mat, dtype=np.int64) % p
            if i > n:
                raise UsageError(f"Q_{i} given for an E({n})-comodule")
            if mat.shape != (self.dim(t - e_deg(p, i)), self.dim(t)):
                raise UsageError(f"Q_{i} at t={t} has shape {mat.shape}")
            if mat.size and np.any(mat):
                mat.setflags(write=False)
                self.q[(i, t)] = mat
        if check:
            self.check_relations()

    # basic access -----------------------------------------------------------
    def dim(self, t: int) -> int:
        return len(self.basis.get(t, ()))

    def degrees(self) -> List[int]:
        return list(self.basis)

    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())

    @property
    def max_degree(self) -> int:
        return max(self.basis) if self.basis else 0

    @property
    def complete_through(self) -> float:
        return float("inf") if self.top is None else self.top

    def q_matrix(self, i: int, t: int) -> np.ndarray:
        mat = self.q.get((i, t))
        if mat is None:
            return np.zeros((self.dim(t - e_deg(self.p, i)), self.dim(t)), dtype=np.int64)
        return mat

    def q_fp(self, i: int, t: int) -> FpMatrix:
        return FpMatrix.from_dense(self.p, self.q_matrix(i, t))

    def labels(self, t: int) -> list:
        return self.basis.get(t, [])

    def check_relations(self):
        """Q_i Q_i = 0 and Q_i Q_j = -Q_j Q_i wherever both sides are defined."""
        p = self.p
        for t in self.basis:
            for i in range(self.n + 1):
                for j in range(i, self.n + 1):
                    a = self.q_matrix(j, t - e_deg(p, i)) @ self.q_matrix(i, t)
                    b = self.q_matrix(i, t - e_deg(p, j)) @ self.q_matrix(j, t)
                    bad = (a % p).any() if i == j else ((a + b) % p).any()
                    if bad:
                        raise ConsistencyError(f"Q relations fail for ({i},{j}) at t={t} in {self.name}")

    # elements ---------------------------------------------------------------
    def vector(self, t: int, element) -> np.ndarray:
        """Coordinates of an Element (or label) of degree t."""
        v = np.zeros(self.dim(t), dtype=np.int64)
        items = element.terms.items() if isinstance(element, Element) else [(element, 1)]
        for lab, c in items:
            try:
                v[self.index[t][lab]] += c
            except KeyError:
                raise UsageError(f"{lab} is not a basis element in degree {t} of {self.name}") from None
        return v % self.p

    def element(self, t: int, vec) -> Element:
        """Element with the given coordinates; labels must be Monomials."""
        terms = {}
        for k, c in enumerate(np.asarray(vec) % self.p):
            if c:
                terms[self.basis[t][k]] = int(c)
        return Element(self.p, terms)

    def format_vector(self, t: int, vec) -> str:
        labs = self.basis.get(t, [])
        parts = []
        for k, c in enumerate(np.asarray(vec) % self.p):
            if c:
                name = str(labs[k])
                parts.append(name if c == 1 else f"{c} {name}")
        return " + ".join(parts) if parts else "0"

    def apply_q(self, i: int, t: int, vec) -> np.ndarray:
        return (self.q_matrix(i, t) @ np.asarray(vec, dtype=np.int64)) % self.p

    def coaction_component(self, S: Sequence[int], t: int) -> np.ndarray:
        """Matrix of u -> (coefficient of taubar_S in alpha(u)), S increasing."""
        mat = np.eye(self.dim(t), dtype=np.int64)
        cur = t
        for i in S:
            mat = (self.q_matrix(i, cur) @ mat) % self.p
            cur -= e_deg(self.p, i)
        return mat

    def __repr__(self):
        return f"Comodule({self.name or '?'}, p={self.p}, n={self.n}, dim={self.total_dim()}, top={self.top})"


# ---------------------------------------------------------------------------
# monomial comodules

def coaction_of_monomial(p: int, n: int, u: Monomial) -> Dict[Tuple[int, ...], Dict[Monomial, int]]:
    """alpha(u) in E(n)_* (x) A_*, as {S: {right monomial: coeff}}.

    Computed multiplicatively from alpha(zeta_k) = 1 (x) zeta_k and
    alpha(taubar_k) = 1 (x) taubar_k + sum_{j <= min(n,k)} taubar_j (x) zeta_{k-j}^{p^j},
    which is the coproduct with its left factor projected to E(n)_*.
    """
    # state: (left index tuple, right monomial) -> coeff
    state = {((), Monomial(u.zeta)): 1}
    for k in u.tau:
        options = [((), Monomial((), (k,)))]
        for j in range(min(n, k) + 1):
            r = Monomial((0,) * (k - j - 1) + (p ** j,)) if k > j else Monomial()
            options.append(((j,), r))
        nxt: dict = {}
        for (left, right), c in state.items():
            for l, r in options:
                if l and l[0] in left:
                    continue
                sign = 1
                # Koszul: l passes the right factor accumulated so far
                if l and right.is_odd:
                    sign = -sign
                if l:
                    # sort l into the left exterior word
                    sign *= (-1) ** sum(1 for x in left if x > l[0])
                s, m = mono_mul(right, r)
                if not s:
                    continue
                key = (tuple(sorted(left + l)), m)
                nxt[key] = (nxt.get(key, 0) + sign * s * c) % p
        state = {k_: v for k_, v in nxt.items() if v}
    out: dict = {}
    for (left, right), c in state.items():
        out.setdefault(left, {})[right] = c
    return out


def q_by_derivation(p: int, i: int, u: Monomial) -> Dict[Monomial, int]:
    """Q_i u from Q_i zeta_k = 0, Q_i taubar_k = zeta_{k-i}^{p^i}, with signs."""
    out: dict = {}
    for pos, k in enumerate(u.tau):
        if k < i:
            continue
        rest = u.tau[:pos] + u.tau[pos + 1:]
        base = Monomial(u.zeta, rest)
        r = Monomial((0,) * (k - i - 1) + (p ** i,)) if k > i else Monomial()
        s, m = mono_mul(base, r)
        sign = -1 if pos % 2 else 1
        out[m] = (out.get(m, 0) + sign * s) % p
    return {m: c for m, c in out.items() if c}


def _apply_q_terms(p: int, i: int, terms: Dict[Monomial, int]) -> Dict[Monomial, int]:
    out: dict = {}
    for m, c in terms.items():
        for m2, c2 in q_by_derivation(p, i, m).items():
            out[m2] = (out.get(m2, 0) + c * c2) % p
    return {m: c for m, c in out.items() if c}


def monomial_comodule(p: int, n: int, monomials: Iterable[Monomial], *, name: str = "",
                      top: Optional[int] = None, quotient_filter=None, check: bool = True) -> Comodule:
    """Comodule spanned by monomials, with coaction restricted from A_*.

    ``quotient_filter(m)`` marks monomials belonging to a subcomodule that is
    being divided out; coaction terms on them are dropped.  Any other term
    outside the span is an error, since the span must be closed.
    """
    basis: Dict[int, list] = {}
    for m in sorted(set(monomials), key=lambda m: sort_key(m, p)):
        basis.setdefault(m.degree(p), []).append(m)
    index = {m: (t, k) for t, b in basis.items() for k, m in enumerate(b)}
    q: Dict[Tuple[int, int], np.ndarray] = {}
    for t, b in basis.items():
        comps = [coaction_of_monomial(p, n, u) for u in b]
        for i in range(n + 1):
            tt = t - e_deg(p, i)
            mat = np.zeros((len(basis.get(tt, ())), len(b)), dtype=np.int64)
            for col, u in enumerate(b):
                pairing = comps[col].get((i,), {})
                if check and pairing != q_by_derivation(p, i, u):
                    raise ConsistencyError(f"pairing and derivation disagree on Q_{i}({u})")
                for m, c in pairing.items():
                    if m not in index:
                        if quotient_filter is not None and quotient_filter(m):
                            continue
                        raise ConsistencyError(f"{m} in the coaction of {u} is outside {name}")
                    mat[index[m][1], col] = c
            if mat.any():
                q[(i, t)] = mat
    if check:
        _check_higher_components(p, n, basis)
    return Comodule(p, n, basis, q, top=top, name=name, check=check)


def _check_higher_components(p: int, n: int, basis, limit: int = 400):
    """alpha's taubar_S coefficient equals Q_{i_k}...Q_{i_1} u (spot check)."""
    count = 0
    for t, b in basis.items():
        for u in b:
            if len(u.tau) < 2:
                continue
            for S, terms in coaction_of_monomial(p, n, u).items():
                if len(S) < 2:
                    continue
                cur = {u: 1}
                for i in S:
                    cur = _apply_q_terms(p, i, cur)
                if cur != terms:
                    raise ConsistencyError(f"coaction component {S} of {u} is not the Q composite")
            count += 1
            if count >= limit:
                return


def build_a_mod_en(p: int, n: int, t_max: int, coalgebra_n: Optional[int] = None,
                   check: bool = True) -> Comodule:
    """Degree truncation of A//E(n) = H_* BP<n> as an E(m)_*-comodule (m = coalgebra_n or n)."""
    if n < 0 or t_max < 0:
        raise UsageError("need n >= 0 and t_max >= 0")
    m = n if coalgebra_n is None else coalgebra_n
    basis = basis_up_to(AlgebraSpec(p, "A//E(n)", n), t_max)
    return monomial_comodule(p, m, basis, name=f"A//E({n})", top=t_max, check=check)


def a_mod_en_by_weight(p: int, n: int, max_weight: int, exact: bool = False) -> List[Monomial]:
    """Monomials of A//E(n) with weight <= max_weight (or == when exact)."""
    poly = [k for k in range(1, 64) if p ** k <= max_weight]
    ext = [k for k in range(n + 1, 64) if p ** k <= max_weight]
    mons = enumerate_monomials(p, max_weight=max_weight, poly=poly, ext=ext)
    if exact:
        mons = [m for m in mons if m.weight(p) == max_weight]
    return mons


def derive_q_action(c: Comodule) -> Comodule:
    """Recompute and cross-check the Q_i matrices of a monomial comodule.

    Each matrix column is read off from the multiplicatively computed
    coaction (pairing with taubar_i) and compared with the derivation rule;
    disagreement raises ConsistencyError.
    """
    mons = [m for b in c.basis.values() for m in b]
    if not all(isinstance(m, Monomial) for m in mons):
        raise UsageError("derive_q_action needs a monomial comodule")
    fresh = monomial_comodule(c.p, c.n, mons, name=c.name, top=c.top, check=True,
                              quotient_filter=lambda m: True)
    for key in set(fresh.q) | set(c.q):
        if not np.array_equal(fresh.q_matrix(*key), c.q_matrix(*key)):
            raise ConsistencyError(f"stored Q_{key[0]} at t={key[1]} disagrees with the coaction")
    return fresh


def trivial_comodule(p: int, n: int, degree: int = 0, label="1") -> Comodule:
    return Comodule(p, n, {degree: [label]}, {}, name="F_p")


def abstract_comodule(p: int, n: int, basis: Dict[int, list], q_images: Dict[Tuple[int, object], Dict[object, int]],
                      name: str = "", top: Optional[int] = None) -> Comodule:
    """Comodule from explicit Q_i values on labeled generators: q_images[(i, label)] = {label: coeff}."""
    where = {lab: (t, k) for t, b in basis.items() for k, lab in enumerate(b)}
    q = {}
    for (i, lab), img in q_images.items():
        t, col = where[lab]
        tt = t - e_deg(p, i)
        mat = q.setdefault((i, t), np.zeros((len(basis.get(tt, ())), len(basis[t])), dtype=np.int64))
        for lab2, c in img.items():
            t2, row = where[lab2]
            if t2 != tt:
                raise UsageError(f"Q_{i}({lab}) = {lab2} has the wrong degree")
            mat[row, col] += c
    return Comodule(p, n, basis, q, top=top, name=name)


# ---------------------------------------------------------------------------
# constructions

def suspend(c: Comodule, k: int, name: Optional[str] = None) -> Comodule:
    """Sigma^k c; the suspension sits on the right, so Q matrices are unchanged."""
    q = {(i, t + k): m for (i, t), m in c.q.items()}
    top = None if c.top is None else c.top + k
    return Comodule(c.p, c.n, {t + k: b for t, b in c.basis.items()}, q, top=top,
                    name=name or f"S^{k} {c.name}", shift=c.shift + k, check=False)


def restrict(c: Comodule, n: int) -> Comodule:
    """The same comodule viewed over E(n)_* for n <= c.n."""
    if n > c.n:
        raise UsageError("can only restrict to a smaller exterior algebra")
    q = {key: m for key, m in c.q.items() if key[0] <= n}
    return Comodule(c.p, n, c.basis, q, top=c.top, name=c.name, shift=c.shift, check=False)


def direct_sum(parts: Sequence[Comodule], name: str = "") -> Comodule:
    p, n = parts[0].p, parts[0].n
    basis: Dict[int, list] = {}
    offsets: Dict[Tuple[int, int], int] = {}
    for k, c in enumerate(parts):
        for t, b in c.basis.items():
            offsets[(k, t)] = len(basis.get(t, ()))
            basis.setdefault(t, []).extend((k, lab) for lab in b)
    q = {}
    for k, c in enumerate(parts):
        for (i, t), mat in c.q.items():
            tt = t - e_deg(p, i)
            big = q.setdefault((i, t), np.zeros((len(basis.get(tt, ())), len(basis[t])), dtype=np.int64))
            r0, c0 = offsets[(k, tt)], offsets[(k, t)]
            big[r0:r0 + mat.shape[0], c0:c0 + mat.shape[1]] = mat
    tops = [c.top for c in parts if c.top is not None]
    return Comodule(p, n, basis, q, top=min(tops) if tops else None, name=name, check=False)


def tensor(a: Comodule, b: Comodule, name: str = "") -> Comodule:
    """a (x) b with the diagonal coaction: Q(x y) = Q(x) y + (-1)^{|x|} x Q(y)."""
    if a.p != b.p:
        raise UsageError("different primes")
    p, n = a.p, min(a.n, b.n)
    basis: Dict[int, list] = {}
    for ta, la in a.basis.items():
        for tb, lb in b.basis.items():
            basis.setdefault(ta + tb, []).extend((x, y) for x in la for y in lb)
    index = {t: {lab: k for k, lab in enumerate(bs)} for t, bs in basis.items()}
    q = {}
    for t, bs in basis.items():
        for i in range(n + 1):
            e = e_deg(p, i)
            tt = t - e
            mat = np.zeros((len(basis.get(tt, ())), len(bs)), dtype=np.int64)
            for col, (x, y) in enumerate(bs):
                tx, kx = _locate(a, x, t, b, y)
                ty = t - tx
                ky = b.index[ty][y]
                qa = a.q_matrix(i, tx)[:, kx]
                for r in np.flatnonzero(qa):
                    mat[index[tt][(a.basis[tx - e][r], y)], col] += qa[r]
                qb = b.q_matrix(i, ty)[:, ky]
                sign = -1 if tx % 2 else 1
                for r in np.flatnonzero(qb):
                    mat[index[tt][(x, b.basis[ty - e][r])], col] += sign * qb[r]
            if mat.any():
                q[(i, t)] = mat
    top = None
    if a.top is not None or b.top is not None:
        # every degree of the product is exact only while both factors are
        cands = []
        if a.top is not None:
            cands.append(a.top + min(b.basis, default=0))
        if b.top is not None:
            cands.append(b.top + min(a.basis, default=0))
        top = min(cands)
    return Comodule(p, n, basis, q, top=top, name=name or f"{a.name} (x) {b.name}")


def _locate(a: Comodule, x, t: int, b: Comodule, y):
    for ta in a.basis:
        k = a.index[ta].get(x)
        if k is not None and y in b.index.get(t - ta, {}):
            return ta, k
    raise UsageError("label not found")


@dataclass
class Subcomodule:
    """A Q-closed subspace of a parent: RREF rows per degree plus the induced comodule."""
    parent: Comodule
    rows: Dict[int, np.ndarray]
    comodule: Comodule
    top: Optional[int]


def submodule_closure(c: Comodule, gens: Dict[int, np.ndarray], name: str = "") -> Subcomodule:
    """Smallest Q-closed subspace containing the given row vectors (per degree)."""
    p = c.p
    rows: Dict[int, np.ndarray] = {}
    for t in sorted(c.basis, reverse=True):
        parts = [np.asarray(gens[t], dtype=np.int64).reshape(-1, c.dim(t))] if t in gens else []
        for i in range(c.n + 1):
            src = t + e_deg(p, i)
            if src in rows and rows[src].shape[0]:
                parts.append((c.q_matrix(i, src) @ rows[src].T).T % p)
        if parts:
            span = row_space(np.concatenate(parts, axis=0), p)
            if span.shape[0]:
                rows[t] = span
    top = None
    if c.top is not None:
        top = c.top - sum(e_deg(p, i) for i in range(c.n + 1))
    sub_basis, q = {}, {}
    pivots = {t: [int(np.flatnonzero(r)[0]) for r in m] for t, m in rows.items()}
    for t, m in rows.items():
        sub_basis[t] = [c.basis[t][k] for k in pivots[t]]
    for t, m in rows.items():
        for i in range(c.n + 1):
            tt = t - e_deg(p, i)
            img = (c.q_matrix(i, t) @ m.T) % p
            if not img.any():
                continue
            # coordinates in the RREF basis are the pivot entries
            coords = img[pivots[tt], :]
            if np.any((rows[tt].T @ coords - img) % p):
                raise ConsistencyError("closure is not Q-stable")
            q[(i, t)] = coords
    sub = Comodule(p, c.n, sub_basis, q, top=top, name=name or f"sub({c.name})", check=False)
    return Subcomodule(c, rows, sub, top)


def quotient(c: Comodule, sub: Subcomodule, name: str = "") -> Comodule:
    """c / sub, with basis the parent labels off the pivot columns of sub."""
    p = c.p
    keep: Dict[int, list] = {}
    for t, b in c.basis.items():
        piv = set()
        if t in sub.rows:
            piv = {int(np.flatnonzero(r)[0]) for r in sub.rows[t]}
        keep[t] = [k for k in range(len(b)) if k not in piv]
    basis = {t: [c.basis[t][k] for k in ks] for t, ks in keep.items()}
    q = {}
    for t, ks in keep.items():
        for i in range(c.n + 1):
            tt = t - e_deg(p, i)
            img = c.q_matrix(i, t)[:, ks] % p
            if not img.any():
                continue
            if tt in sub.rows:
                r = sub.rows[tt]
                piv = [int(np.flatnonzero(x)[0]) for x in r]
                img = (img - r.T @ img[piv, :]) % p
            q[(i, t)] = img[keep[tt], :]
    top = c.top if sub.top is None else min(c.top if c.top is not None else sub.top, sub.top)
    return Comodule(p, c.n, basis, q, top=top, name=name or f"{c.name}/sub", check=True)


# ---------------------------------------------------------------------------
# Margolis homology

@dataclass
class MargolisHomology:
    i: int
    window: Tuple[int, int]
    dims: Dict[int, int]
    representatives: Dict[int, List[str]]
    by_length: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def nonzero(self) -> Dict[int, int]:
        return {t: d for t, d in self.dims.items() if d}


def safe_margolis_top(c: Comodule, i: int) -> float:
    return c.complete_through - e_deg(c.p, i)


def margolis_homology(c: Comodule, i: int, t_range: Optional[Tuple[int, int]] = None,
                      lengths: bool = False) -> MargolisHomology:
    """ker Q_i / im Q_i degreewise.  Raises TruncationError past the safe window."""
    if not 0 <= i <= c.n:
        raise UsageError(f"Q_{i} is not in E({c.n})")
    p, e = c.p, e_deg(c.p, i)
    if t_range is None:
        hi = safe_margolis_top(c, i)
        hi = c.max_degree if hi == float("inf") else int(hi)
        t_range = (min(c.basis, default=0), hi)
    lo, hi = t_range
    if hi > safe_margolis_top(c, i):
        raise TruncationError(f"degree {hi} + |Q_{i}| = {hi + e} exceeds the truncation {c.top}")
    dims, reps, by_len = {}, {}, {}
    for t in range(lo, hi + 1):
        d = c.dim(t)
        if not d:
            continue
        h = Subquotient(p, d, d_in=c.q_matrix(i, t + e), d_out=c.q_matrix(i, t))
        dims[t] = h.rank
        reps[t] = [c.format_vector(t, r) for r in h.reps]
        if lengths:
            for ell, dd in _length_split(c, i, t).items():
                by_len[(t, ell)] = dd
    return MargolisHomology(i, (lo, hi), dims, reps, by_len)


def _length_split(c: Comodule, i: int, t: int) -> Dict[int, int]:
    p, e = c.p, e_deg(c.p, i)

    def cols(tt, ell):
        return [k for k, m in enumerate(c.basis.get(tt, ())) if m.length == ell]

    out = {}
    lens = {m.length for m in c.basis[t]}
    for ell in sorted(lens):
        here = cols(t, ell)
        below = cols(t - e, ell - 1)
        above = cols(t + e, ell + 1)
        qo = c.q_matrix(i, t)
        qi = c.q_matrix(i, t + e)
        # length homogeneity: Q_i maps length ell to ell - 1 exactly
        other = [r for r in range(qo.shape[0]) if r not in set(below)]
        if other and qo[np.ix_(other, here)].any():
            raise ConsistencyError(f"Q_{i} is not length-homogeneous at t={t}")
        d_out = qo[np.ix_(below, here)] if below else None
        d_in = qi[np.ix_(here, above)] if above else None
        out[ell] = Subquotient(p, len(here), d_in=d_in, d_out=d_out).rank
    return out


# ---------------------------------------------------------------------------
# splittings

@dataclass
class SplittingReport:
    summand_S: Subcomodule
    summand_Q: Comodule
    window: int
    dims_ok: bool
    margolis_S: Dict[int, Dict[int, int]]

    @property
    def S_is_free(self) -> bool:
        return all(not any(d.values()) for d in self.margolis_S.values())


def _length_generators(c: Comodule, pred) -> Dict[int, np.ndarray]:
    gens = {}
    for t, b in c.basis.items():
        ks = [k for k, m in enumerate(b) if pred(m.length)]
        if ks:
            g = np.zeros((len(ks), len(b)), dtype=np.int64)
            g[np.arange(len(ks)), ks] = 1
            gens[t] = g
    return gens


def _split(c: Comodule, pred, sname: str, qname: str) -> SplittingReport:
    sub = submodule_closure(c, _length_generators(c, pred), name=sname)
    quo = quotient(c, sub, name=qname)
    safe = int(sub.top) if sub.top is not None else c.max_degree
    dims_ok = all(sub.comodule.dim(t) + quo.dim(t) == c.dim(t) for t in range(0, safe + 1))
    marg = {}
    for i in range(c.n + 1):
        hi = int(min(safe_margolis_top(sub.comodule, i), safe))
        marg[i] = margolis_homology(sub.comodule, i, (0, max(hi, -1))).dims if hi >= 0 else {}
    return SplittingReport(sub, quo, safe, dims_ok, marg)


def split_s_q(c: Comodule) -> SplittingReport:
    """A//E(2) = S + Q with S generated by monomials of length >= 3."""
    if c.n != 2:
        raise UsageError("split_s_q expects an E(2)-comodule")
    return _split(c, lambda ell: ell >= 3, "S", "Q")


def split_sprime_qbar(q: Comodule) -> SplittingReport:
    """Q (over E(1)) = S' + Qbar with S' generated by the length-2 part."""
    if q.n != 1:
        q = restrict(q, 1)
    return _split(q, lambda ell: ell == 2, "S'", "Qbar")


def build_r(p: int, max_weight: int) -> Comodule:
    """R = P(zeta_2, zeta_3, ...) (x) E(taubar_3, ...) up to a weight bound, over E(1)."""
    poly = [k for k in range(2, 64) if p ** k <= max_weight]
    ext = [k for k in range(3, 64) if p ** k <= max_weight]
    mons = enumerate_monomials(p, max_weight=max_weight, poly=poly, ext=ext)
    return monomial_comodule(p, 1, mons, name="R")


def weight_pieces_w2(r: Comodule, k: int) -> Comodule:
    """W_2(k): the span of monomials of weight p^2 k inside R."""
    p = r.p
    w = p * p * k
    mons = [m for b in r.basis.values() for m in b if m.weight(p) == w]
    if not mons and k:
        raise UsageError(f"R was built below weight {w}")
    return monomial_comodule(p, r.n, mons, name=f"W_2({k})")
