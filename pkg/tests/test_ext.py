import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coops.browngitler import build_bg, build_four_term, ell
from coops.comodule import (
    abstract_comodule, build_a_mod_en, restrict, split_sprime_qbar, suspend, trivial_comodule,
)
from coops.errors import TruncationError, UsageError, WindowTooLargeError
from coops.ext import (
    AdamsCoverDescriptor, adams_cover_check, build_koszul, chart_json, chart_svg, chart_tsv, cobar_ext_oracle,
    compare_with_golden, connecting_map_check, diff_charts, expected_bp2_generators, exterior_on, ext_dims,
    inductive_table, is_zero_in_ext, length_relations, load_golden, extension_partners, torsion_report,
    v0_inverted_ext, v_multiplication, verify_length_relation, verify_table_directly,
)
from coops.ext.koszul import exponent_vectors
from coops.ext.tables import relation_chart, relation_monomials
from coops.fp_linalg import rank
from coops.milnor import parse_monomial

P = 3


def mono(text):
    return parse_monomial(text)[1]


def poly_dims(p, n, s_max, t_max):
    """Closed form for F_p[v_0..v_n] with |v_i| = (1, 2p^i - 1)."""
    e = [2 * p ** i - 1 for i in range(n + 1)]
    out = {}
    for s in range(s_max + 1):
        for a in exponent_vectors(n + 1, s):
            t = sum(x * y for x, y in zip(a, e))
            if t <= t_max:
                out[(s, t)] = out.get((s, t), 0) + 1
    return out


def test_trivial_comodule_gives_polynomial_algebra():
    ch = ext_dims(build_koszul(trivial_comodule(P, 2)), 4, 60)
    assert ch.nonzero() == poly_dims(P, 2, 4, 60)
    assert ch.generators[(1, 1)] == ["v0"] and ch.generators[(1, 5)] == ["v1"] and ch.generators[(1, 17)] == ["v2"]


def test_free_e0_module():
    e = abstract_comodule(P, 0, {0: ["1"], 1: ["t0"]}, {(0, "t0"): {"1": 1}})
    ch = ext_dims(build_koszul(e), 5, 10)
    assert ch.nonzero() == {(0, 0): 1}


def test_exterior_on_taubar2_two_coactions():
    free = ext_dims(build_koszul(exterior_on(P, 2, 2)), 3, 40).nonzero()
    triv = ext_dims(build_koszul(exterior_on(P, 2, 2, free=False)), 3, 40).nonzero()
    assert free == poly_dims(P, 1, 3, 40)
    expect = dict(poly_dims(P, 2, 3, 40))
    for (s, t), d in poly_dims(P, 2, 3, 40 - 17).items():
        expect[(s, t + 17)] = expect.get((s, t + 17), 0) + d
    assert triv == expect


def test_d_squared_on_a_mod_e2():
    c = build_a_mod_en(P, 2, 80)
    build_koszul(c, check_window=(4, 80))


def test_truncation_guard():
    c = build_a_mod_en(P, 2, 50)
    with pytest.raises(TruncationError):
        ext_dims(build_koszul(c), 2, 60)
    with pytest.raises(UsageError):
        build_koszul(c, n=3)


@pytest.mark.parametrize("make", [
    lambda: trivial_comodule(P, 2),
    lambda: exterior_on(P, 2, 2),
    lambda: exterior_on(P, 2, 2, free=False),
    lambda: ell(P, 1, 2),
    lambda: ell(P, 2, 2),
    lambda: ell(P, 3, 2),
])
def test_cobar_agrees_with_koszul(make):
    c = make()
    a = ext_dims(build_koszul(c), 3, 50, names=False)
    b = cobar_ext_oracle(c, 3, 50)
    assert diff_charts(a, b) == []


def test_cobar_on_ell3_over_e1():
    c = ell(P, 3)
    assert diff_charts(ext_dims(build_koszul(c), 3, 40, names=False), cobar_ext_oracle(c, 3, 40)) == []


def test_cobar_window_cap():
    with pytest.raises(WindowTooLargeError):
        cobar_ext_oracle(ell(P, 3, 2), 3, 60, max_cells=1000)


def test_connecting_map_is_v2():
    rep = connecting_map_check(P, 2, 2, 3, 40)
    assert rep.cells and rep.ok


def test_v_multiplication_on_fp():
    ch = ext_dims(build_koszul(trivial_comodule(P, 2)), 6, 40)
    for i in range(3):
        v_multiplication(ch, i)
    # v0 v1^k != 0
    vec, s, t = np.array([1]), 1, 1
    for k in range(5):
        mat = ch.v_image(1, s, t)
        vec = (vec @ mat) % P
        s, t = s + 1, t + 5
        assert vec.any()
    rep = torsion_report(ch, 0)
    assert all(v == "free in window" for v in rep.values())


def test_v_multiplication_associative():
    ch = ext_dims(build_koszul(ell(P, 3, 2)), 4, 50)
    for i in range(3):
        v_multiplication(ch, i)
    e = [1, 5, 17]
    for (s, t), d in ch.nonzero().items():
        for i in range(3):
            for j in range(i + 1, 3):
                a = ch.v_image(i, s, t)
                b = ch.v_image(j, s, t)
                if a is None or b is None:
                    continue
                ab = ch.v_image(j, s + 1, t + e[i])
                ba = ch.v_image(i, s + 1, t + e[j])
                if ab is None or ba is None:
                    continue
                assert np.array_equal((a @ ab) % P, (b @ ba) % P)


def test_torsion_in_free_module():
    ch = ext_dims(build_koszul(exterior_on(P, 2, 0)), 4, 30)
    rep = torsion_report(ch, 2)
    assert set(rep.values()) == {"free in window"}


def test_relation_example_ell6():
    chart = relation_chart(P, 6)
    rel = length_relations(P, mono("z1^9 z3"))
    assert rel.text() == "v2 z1^9 z3 + v1 z2^3 z3 + v0 z3^2 = 0"
    assert verify_length_relation(rel, chart)
    # each term alone is nonzero, so the check is not vacuous
    k = chart.complex
    for i, m in rel.terms:
        alpha = tuple(1 if x == i else 0 for x in range(3))
        assert not is_zero_in_ext(k, 1, m.degree(P) + [1, 5, 17][i], {(alpha, m): 1})
    bad = length_relations(P, mono("z1^9 z3"))
    bad.terms[0] = (2, mono("z1^9 z3"))
    bad.terms[1] = (1, mono("z2^3 z3"))
    bad.terms.append((0, mono("z3^2")))
    assert not verify_length_relation(bad, chart)


def test_relation_example_ell3():
    rel = length_relations(P, mono("z1^9"))
    assert rel.text() == "v2 z1^9 + v1 z2^3 + v0 z3 = 0"
    assert verify_length_relation(rel, relation_chart(P, 3))


def test_relation_precondition():
    with pytest.raises(UsageError):
        length_relations(P, mono("z1^3"))
    with pytest.raises(UsageError):
        length_relations(P, mono("z1^9 t3"))


@pytest.mark.parametrize("J", range(10))
def test_all_relations_hold(J):
    chart = relation_chart(P, J)
    for m in relation_monomials(P, J):
        assert verify_length_relation(length_relations(P, m), chart)


@pytest.mark.parametrize("j", range(13))
def test_v0_inverted_generators(j):
    c = build_bg(P, 2, j, "N", coalgebra_n=1).comodule
    loc = v0_inverted_ext(c)
    assert loc.free
    assert sorted(loc.names) == sorted(expected_bp2_generators(P, j))


def test_v0_inverted_examples():
    assert expected_bp2_generators(P, 0) == ["1"]
    assert expected_bp2_generators(P, 2) == ["1", "z1", "z1^2"]
    assert expected_bp2_generators(P, 3) == ["1", "z1", "z1^2", "z1^3", "z2"]


def test_adams_cover_index():
    assert AdamsCoverDescriptor(P, 0).index == 0
    assert AdamsCoverDescriptor(P, P).index == 1
    assert AdamsCoverDescriptor(P, P * P).index == P + 1
    assert AdamsCoverDescriptor(5, 25).index == 6


@given(st.integers(0, 500), st.sampled_from([3, 5, 7]))
@settings(max_examples=50, deadline=None)
def test_adams_cover_index_nonnegative_integer(k, p):
    d = AdamsCoverDescriptor(p, k)
    assert d.index >= 0 and (k - d.alpha) % (p - 1) == 0


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5, 9, 10, 12])
def test_adams_cover(k):
    rep = adams_cover_check(P, k, s_max=7)
    assert rep.ok, rep.mismatches[:5]


def test_adams_cover_p5():
    for k in [0, 5, 6]:
        assert adams_cover_check(5, k, s_max=5).ok


def test_evenness_and_v2_injective_small():
    c = build_a_mod_en(P, 2, 90)
    ch = ext_dims(build_koszul(c), 5, 90)
    assert all(d == 0 for (s, t), d in ch.dims.items() if (t - s) % 2)
    v_multiplication(ch, 2)
    for mat in ch.v_mult[2].values():
        assert rank(mat, P) == mat.shape[0]


def test_free_summand_concentrated_in_s0():
    c = restrict(build_a_mod_en(P, 1, 90, coalgebra_n=1), 1)
    rep = split_sprime_qbar(c)
    S = rep.summand_S.comodule
    ch = ext_dims(build_koszul(S), 4, S.top)
    assert all(d == 0 for (s, t), d in ch.dims.items() if s > 0)
    assert sum(d for (s, t), d in ch.dims.items() if s == 0) > 0


def test_additivity_over_weight_pieces():
    tmax = 60
    whole = ext_dims(build_koszul(build_a_mod_en(P, 2, tmax)), 3, tmax, names=False)
    total = {}
    for k in range(tmax // 4 + 1):
        piece = suspend(ell(P, k // P, 2), 4 * k)
        ch = ext_dims(build_koszul(piece), 3, tmax, names=False)
        for key, d in ch.dims.items():
            total[key] = total.get(key, 0) + d
    assert {k: v for k, v in total.items() if v} == whole.nonzero()


@pytest.mark.parametrize("i", range(3))
def test_four_term_euler_characteristic(i):
    seq = build_four_term(P, 1, i)
    tmax = 30
    chi = {}
    for sign, c in zip([1, -1, 1, -1], seq.terms):
        if not c.basis:
            continue
        ch = ext_dims(build_koszul(c), tmax, tmax, names=False)
        for (s, t), d in ch.dims.items():
            chi[t] = chi.get(t, 0) + sign * (-1) ** s * d
    assert all(v == 0 for v in chi.values())


def test_chart_formats_deterministic():
    ch = ext_dims(build_koszul(ell(P, 3, 2)), 2, 30)
    for i in range(3):
        v_multiplication(ch, i)
    a, b = chart_tsv(ch), chart_json(ch)
    ch2 = ext_dims(build_koszul(ell(P, 3, 2)), 2, 30)
    for i in range(3):
        v_multiplication(ch2, i)
    assert a == chart_tsv(ch2) and b == chart_json(ch2)
    assert a.splitlines()[0] == "s\tt\tdim\tgenerators" and a.endswith("\n")
    assert "0\t12\t1\tz1^3" in a
    svg = chart_svg(ch)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


# ---------------------------------------------------------------------------
# generator tables


def _row(J, k):
    r = inductive_table(P, J)[k]
    return r.summand(), [g.text() for g in r.gens]


def test_table_ell3():
    assert _row(3, 0) == ("S^36 Q^2", ["z1^9", "*z1^6 z2", "*z1^3 z2^2"])
    assert _row(3, 1) == ("S^48 l_1", ["z2^3", "z3"])
    assert _row(3, 2) == ("S^57 l_0[1] + S^61 l_0[1]", ["*v2 z1^6 z2", "*v2 z1^3 z2^2"])


def test_table_ell6():
    summand, gens = _row(6, 0)
    assert summand == "S^72 Q^5" and "z1^9 z3" in gens
    assert _row(6, 1) == ("S^96 l_2", ["z2^6", "z2^3 z3", "z3^2"])


@pytest.mark.parametrize("J", range(10))
def test_table_matches_direct_computation(J):
    rep = verify_table_directly(P, J)
    assert rep.ok, (rep.bad_stems, rep.red_mismatches, rep.shift_mismatches)


def test_table_p5_small():
    for J in range(5, 8):
        assert verify_table_directly(5, J).ok


def test_golden_comparison_lists_only_suspension_cells():
    deltas = compare_with_golden(P, 9, load_golden(P))
    assert [d.status for d in deltas if d.target == "*"] == ["flagged"]
    assert ("flagged", "S^36 l_3", "suspension: golden S^62 computed S^61") in [
        (d.status, d.target, d.detail) for d in deltas]
    # everything else that differs is a suspension cell backed by the direct degree check
    others = [d for d in deltas if d.status == "delta"]
    assert all(d.detail.startswith("suspension") for d in others)


def test_extension_partners_are_generators():
    for J in range(10):
        for name, a, b in extension_partners(P, J):
            assert a and b, name
