"""Invariant suites shared by `coops verify` and the acceptance tests."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List

from .browngitler import build_four_term, phi_shift
from .comodule import build_a_mod_en, margolis_homology, safe_margolis_top, split_s_q
from .errors import CoopsError
from .fp_linalg import check_prime
from .milnor import (
    AlgebraSpec, Element, Monomial, basis_up_to, coassociativity_holds, conjugation, counit_holds, parse_monomial,
    tau, xi, zeta,
)


@dataclass
class Check:
    suite: str
    name: str
    status: str        # "pass", "fail" or "flagged"
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"{self.suite}\t{self.name}\t{self.status}\t{self.detail}"


def _run(suite: str, name: str, fn: Callable[[], object]) -> Check:
    t0 = time.perf_counter()
    try:
        res = fn()
    except CoopsError as exc:
        return Check(suite, name, "fail", f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
    ok, detail = res if isinstance(res, tuple) else (bool(res), "")
    return Check(suite, name, "pass" if ok else "fail", detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Hopf algebra

# top-range monomials checked individually at p=3 beyond the exhaustive range
HOPF_SAMPLE = ["z1^20 z2^2 t1 t2", "z1^3 z2^3 z3 t0 t3", "z1 z2 z3 z4 t0", "z1^40 z3 t1",
               "z2^7 z3 t0 t1 t2", "t0 t1 t2 t3 t4", "z1^70 t0", "z2^17 t1", "z3^5 z1^2 t2 t0",
               "z1^5 z2^4 z3 z4 t1"]


def exhaustive_limit(p: int, t_max: int) -> int:
    return t_max if p >= 5 else min(t_max, 110)


def _coassoc_range(p: int, t_max: int):
    cache = {}
    n = 0
    for m in basis_up_to(AlgebraSpec(p, "full"), t_max):
        if not (coassociativity_holds(p, m, cache) and counit_holds(p, m, cache)):
            return False, f"fails on {m}"
        n += 1
    return True, f"{n} monomials of degree <= {t_max}"


def _generator_powers(p: int, t_max: int):
    cache, n = {}, 0
    k = 1
    while 2 * (p ** k - 1) <= t_max:
        e = 1
        while e * 2 * (p ** k - 1) <= t_max:
            m = Monomial((0,) * (k - 1) + (e,))
            if not (coassociativity_holds(p, m, cache) and counit_holds(p, m, cache)):
                return False, f"fails on {m}"
            n += 1
            e += 1
        k += 1
    k = 0
    while 2 * p ** k - 1 <= t_max:
        m = Monomial((), (k,))
        if not (coassociativity_holds(p, m, cache) and counit_holds(p, m, cache)):
            return False, f"fails on {m}"
        n += 1
        k += 1
    return True, f"{n} generator powers of degree <= {t_max}"


def _sample(p: int, t_max: int):
    cache = {}
    for s in HOPF_SAMPLE:
        m = parse_monomial(s)[1]
        if m.degree(p) <= t_max and not (coassociativity_holds(p, m, cache) and counit_holds(p, m, cache)):
            return False, f"fails on {m}"
    return True, f"{len(HOPF_SAMPLE)} sampled monomials"


def _recursions(p: int, n_max: int = 4):
    one = Element.one(p, False)
    for n in range(1, n_max + 1):
        acc = Element(p)
        for i in range(n + 1):
            left = xi(p, n - i, p ** i) if n - i else one
            acc = acc + left * (conjugation(xi(p, i)) if i else one)
        if acc:
            return False, f"xi recursion residual at n={n}: {acc}"
    for n in range(n_max + 1):
        acc = tau(p, n)
        for i in range(n + 1):
            left = xi(p, n - i, p ** i) if n - i else one
            acc = acc + left * conjugation(tau(p, i))
        if acc:
            return False, f"tau recursion residual at n={n}: {acc}"
    return True, f"n <= {n_max}"


def _involution(p: int, n_max: int = 4):
    for n in range(n_max + 1):
        gens = [tau(p, n)] + ([xi(p, n), zeta(p, n)] if n else [])
        for g in gens:
            if conjugation(conjugation(g)) != g:
                return False, f"chi^2 != id on {g}"
    return True, f"n <= {n_max}"


def hopf_suite(p: int, t_max: int = 300) -> List[Check]:
    check_prime(p)
    ex = exhaustive_limit(p, t_max)
    out = [_run("hopf", f"p={p} coassociativity+counit exhaustive", lambda: _coassoc_range(p, ex))]
    if ex < t_max:
        out.append(_run("hopf", f"p={p} generator powers", lambda: _generator_powers(p, t_max)))
        out.append(_run("hopf", f"p={p} sampled monomials", lambda: _sample(p, t_max)))
    out.append(_run("hopf", f"p={p} chi recursions", lambda: _recursions(p)))
    out.append(_run("hopf", f"p={p} chi^2 = id", lambda: _involution(p)))
    return out


# ---------------------------------------------------------------------------
# four-term sequences


def sequences_suite(p: int, j_max: int) -> List[Check]:
    check_prime(p)
    out = []
    for j in range(1, j_max + 1):
        for i in range(p):
            def one(j=j, i=i):
                seq = build_four_term(p, j, i)
                return seq.exact_degrees > 0, f"exact in {seq.exact_degrees} degrees, shifts {seq.shifts}"
            out.append(_run("sequences", f"p={p} j={j} i={i}", one))
    if p == 3 and j_max >= 1:
        out.append(_run("sequences", "p=3 j=1 shifts 21, 25",
                        lambda: [phi_shift(3, 1, 1), phi_shift(3, 1, 2)] == [21, 25]))
    return out


# ---------------------------------------------------------------------------
# Margolis homology and splittings


def _series(t_max: int, factors):
    s = [0] * (t_max + 1)
    s[0] = 1
    for d, h in factors:
        new = [0] * (t_max + 1)
        for t in range(t_max + 1):
            if s[t]:
                e = 0
                while t + e * d <= t_max and (h is None or e < h):
                    new[t + e * d] += s[t]
                    e += 1
        s = new
    return s


def margolis_closed_forms(p: int, t_max: int):
    """Dimension series of F_p[z1,z2], F_p[z1] (x) T_1(z2,z3,..), T_2(z1,z2,..)."""
    deg = [2 * (p ** k - 1) for k in range(1, 12)]
    gens = [d for d in deg if d <= t_max]
    return {
        0: _series(t_max, [(deg[0], None), (deg[1], None)]),
        1: _series(t_max, [(deg[0], None)] + [(d, p) for d in gens[1:]]),
        2: _series(t_max, [(d, p * p) for d in gens]),
    }


def margolis_suite(p: int, t_max: int) -> List[Check]:
    c = build_a_mod_en(p, 2, t_max + e_top(p))
    closed = margolis_closed_forms(p, t_max)
    out = []
    for i in range(3):
        def one(i=i):
            h = margolis_homology(c, i, (0, t_max), lengths=True)
            got = [h.dims.get(t, 0) for t in range(t_max + 1)]
            if got != closed[i]:
                bad = next(t for t in range(t_max + 1) if got[t] != closed[i][t])
                return False, f"first mismatch at t={bad}: {got[bad]} vs {closed[i][bad]}"
            pos = [k for k, v in h.by_length.items() if k[1] > 0 and v]
            return not pos, f"t <= {t_max}" + (f"; positive length classes {pos[:3]}" if pos else "")
        out.append(_run("margolis", f"p={p} Q_{i} closed form", one))
    return out


def e_top(p: int) -> int:
    return 2 * p * p - 1


def splitting_suite(p: int, t_max: int) -> List[Check]:
    def one():
        # S is complete sum |Q_i| below the build cap, its Margolis homology |Q_2| below that
        extra = sum(2 * p ** i - 1 for i in range(3)) + e_top(p)
        c = build_a_mod_en(p, 2, t_max + extra)
        rep = split_s_q(c)
        S = rep.summand_S.comodule
        covered = all(safe_margolis_top(S, i) >= t_max for i in range(3))
        ok = rep.dims_ok and rep.S_is_free and rep.window >= t_max and covered
        return ok, f"dim S = {S.total_dim()} through t = {rep.window}; S has no Margolis homology"
    return [_run("splitting", f"p={p} S + Q = A//E(2)", one)]


# ---------------------------------------------------------------------------
# Ext checks


def tables_suite(p: int = 3, j_max: int = 9) -> List[Check]:
    from .ext.tables import (
        compare_with_golden, length_relations, load_golden, relation_chart, relation_monomials,
        extension_partners, verify_length_relation, verify_table_directly,
    )
    out = []
    for J in range(j_max + 1):
        def direct(J=J):
            r = verify_table_directly(p, J)
            detail = f"stems {r.stems[0]}..{r.stems[1]}"
            if not r.ok:
                detail += f"; bad stems {r.bad_stems[:5]} red {r.red_mismatches} shifts {r.shift_mismatches}"
            return r.ok, detail
        out.append(_run("tables", f"J={J} named basis", direct))
    if p == 3:
        try:
            golden = load_golden(p)
        except FileNotFoundError:
            golden = None
        if golden is not None:
            for d in compare_with_golden(p, j_max, golden):
                out.append(Check("tables", f"golden {d.target}", "flagged" if d.status == "flagged" else "fail",
                                 d.detail))
            out.append(Check("tables", "golden rows compared", "pass", f"j <= {j_max}"))

    def relations():
        n = 0
        for J in range(j_max + 1):
            chart = relation_chart(p, J)
            for m in relation_monomials(p, J):
                n += 1
                if not verify_length_relation(length_relations(p, m), chart):
                    return False, f"fails for {m} (J={J})"
        return True, f"{n} instances"
    out.append(_run("tables", "length relations", relations))

    def partners():
        bad = [(J, name) for J in range(j_max + 1) for name, a, b in extension_partners(p, J) if not (a and b)]
        return not bad, f"counterexamples {bad}" if bad else "no counterexample"
    out.append(_run("tables", "hidden-extension partners are generators", partners))
    return out


SUITES = ("hopf", "sequences", "splitting", "margolis", "tables")


def run_suite(name: str, p: int, t_max: int = 300, j_max: int = 3) -> List[Check]:
    if name == "hopf":
        return hopf_suite(p, t_max)
    if name == "sequences":
        return sequences_suite(p, j_max)
    if name == "splitting":
        return splitting_suite(p, min(t_max, 200))
    if name == "margolis":
        return margolis_suite(p, min(t_max, 200))
    if name == "tables":
        return tables_suite(p, j_max)
    raise ValueError(name)
