"""Koszul lifting, quasiclassical data, quantization, residual reports."""

import random
from fractions import Fraction

import pytest

from ncunfold.errors import NotACycle, NotIsolated, QCInvalid
from ncunfold.parsing import parse_gelement, parse_polynomial
from ncunfold.poly import HSeries, Polynomial, RingContext
from ncunfold.polyvector import (
    GElement,
    ad_f,
    bivector_square,
    schouten_bracket,
)
from ncunfold.singularity import ADE_CONTEXT, a_k, ade_catalog, e_8, qc_subspace
from ncunfold.unfolding import (
    EXACT,
    MCSolution,
    ObstructionReport,
    koszul_lift,
    mc_verify,
    qc_normalize,
    qc_validate,
    quantize_general,
    quantize_n3,
)

from oracles import rand_poly, rand_trivector3

CTX3 = ADE_CONTEXT
CTX2 = RingContext(("x", "y"))


def g(text, ctx=CTX3):
    return parse_gelement(text, ctx)


def rand_w_element(rng, f):
    basis = qc_subspace(f)
    acc = Polynomial.zero(f.ctx)
    for exps in basis:
        acc = acc + Polynomial.monomial(f.ctx, exps, Fraction(rng.randint(-3, 3)))
    return acc


# -- koszul_lift ----------------------------------------------------------------


def test_lift_of_top_boundary():
    f = a_k(1)
    z = ad_f(f, g("D(1,2,3)"))
    assert koszul_lift(f, z) == g("D(1,2,3)")


def test_lift_zero():
    assert koszul_lift(a_k(1), GElement.zero(CTX3)).is_zero()


def test_lift_not_a_cycle_reported():
    f = a_k(1)
    with pytest.raises(NotACycle):
        koszul_lift(f, g("x*D(1,2)"))


def test_lift_not_isolated_reported():
    f = parse_polynomial("x^2*y", CTX2)
    with pytest.raises(NotIsolated):
        koszul_lift(f, GElement.zero(CTX2))


def test_lift_roundtrip_random_trivectors():
    rng = random.Random(71)
    for _, f in ade_catalog()[:4]:
        for _ in range(10):
            t = rand_trivector3(rng, CTX3)
            z = ad_f(f, t)
            lifted = koszul_lift(f, z)
            assert ad_f(f, lifted) == z


def test_lift_vector_to_bivector():
    # degree 1 -> 2 lifting: z = [f, S] for a bivector S is a 1-cycle
    rng = random.Random(73)
    f = a_k(2)
    s = ad_f(f, g("x*y*D(1,2,3)"))
    p = rand_poly(rng, CTX3, 2)
    z = schouten_bracket(GElement.from_polynomial(p), s)
    assert ad_f(f, z).is_zero()
    s2 = koszul_lift(f, z)
    assert ad_f(f, s2) == z


# -- qc_normalize ----------------------------------------------------------------


def test_normalize_examples():
    f = a_k(1)
    x = Polynomial.variable(CTX3, 1)
    norm = qc_normalize(f, x)
    assert norm.w_part.is_zero()
    assert norm.cofactors == (Polynomial.constant(CTX3, Fraction(1, 2)),
                              Polynomial.zero(CTX3), Polynomial.zero(CTX3))
    one = Polynomial.one(CTX3)
    assert qc_normalize(f, one).w_part == one


def test_normalize_idempotent_and_kernel():
    rng = random.Random(79)
    for _, f in ade_catalog()[:5]:
        partials = [f.partial(i) for i in (1, 2, 3)]
        for _ in range(5):
            p = rand_poly(rng, CTX3, 3)
            norm = qc_normalize(f, p)
            again = qc_normalize(f, norm.w_part)
            assert again.w_part == norm.w_part
            assert all(c.is_zero() for c in again.cofactors)
            # adding a Jacobian-ideal element does not change the W part
            j = sum(
                (rand_poly(rng, CTX3, 2) * q for q in partials),
                Polynomial.zero(CTX3),
            )
            assert qc_normalize(f, p + j).w_part == norm.w_part


def test_normalize_requires_isolated():
    with pytest.raises(NotIsolated):
        qc_normalize(parse_polynomial("x^2*y", CTX2), Polynomial.one(CTX2))


# -- qc_validate -----------------------------------------------------------------


def test_validate_boundary_datum():
    f = a_k(1)
    s = ad_f(f, g("D(1,2,3)"))
    datum = qc_validate(f, Polynomial.one(CTX3), s)
    assert not isinstance(datum, list)
    assert datum.p_normal == Polynomial.one(CTX3)
    assert ad_f(f, datum.extension_bivector) == schouten_bracket(
        GElement.from_polynomial(datum.p_raw), s
    )


def test_validate_rejects_non_cycle():
    f = a_k(1)
    viols = qc_validate(f, Polynomial.zero(CTX3), g("x*D(1,2)"))
    assert isinstance(viols, list)
    assert [v.kind for v in viols] == ["not_f_compatible"]


def test_validate_rejects_non_poisson_n4():
    ctx4 = RingContext(("x", "y", "z", "w"))
    f = parse_polynomial("x^2+y^2+z^2+w^2", ctx4)
    # sums of wedges of rotation fields kill f; this combination fails Jacobi
    rot = lambda t: parse_gelement(t, ctx4)
    s = rot("x*D(2) - y*D(1)") * rot("x*D(3) - z*D(1)") + rot(
        "x*D(4) - w*D(1)"
    ) * rot("y*D(4) - w*D(2)")
    assert ad_f(f, s).is_zero()
    assert not bivector_square(s).is_zero()
    viols = qc_validate(f, Polynomial.zero(ctx4), s)
    assert [v.kind for v in viols] == ["not_poisson"]


def test_validate_zero_bivector_any_p():
    f = a_k(1)
    x = Polynomial.variable(CTX3, 1)
    datum = qc_validate(f, x, GElement.zero(CTX3))
    assert not isinstance(datum, list)


def test_validate_wrong_degree():
    f = a_k(1)
    viols = qc_validate(f, Polynomial.zero(CTX3), g("D(1)"))
    assert [v.kind for v in viols] == ["wrong_degree"]


# -- quantize_n3 -----------------------------------------------------------------


def test_quantize_constant_p_stops_at_h1():
    f = a_k(1)
    s = ad_f(f, g("D(1,2,3)"))
    sol = quantize_n3(f, Polynomial.one(CTX3), s)
    assert sol.order == EXACT
    assert sol.h_degree() == 1
    assert sol.s_series.coeffs[1] == s
    assert sol.s_series.coeffs[2].is_zero()  # [1, T1] = 0
    assert mc_verify(f, sol).ok


def test_quantize_nonconstant_p_has_h2_correction():
    f = a_k(2)
    x = Polynomial.variable(CTX3, 1)
    t1 = GElement(CTX3, {(0, 0b111): x})
    s1 = ad_f(f, t1)
    sol = quantize_n3(f, x, s1)
    assert sol.order == EXACT
    assert sol.h_degree() == 2
    # S_2 = -[p1, T1], nonzero here
    expected = -schouten_bracket(GElement.from_polynomial(x), t1)
    assert sol.s_series.coeffs[2] == expected
    assert not expected.is_zero()
    assert mc_verify(f, sol).ok


def test_quantize_zero_bivector():
    f = a_k(1)
    one = Polynomial.one(CTX3)
    sol = quantize_n3(f, one, GElement.zero(CTX3))
    assert sol.h_degree() == 1
    assert all(c.is_zero() for c in sol.s_series.coeffs)
    assert mc_verify(f, sol).ok


def test_quantize_rejects_invalid_datum():
    f = a_k(1)
    with pytest.raises(QCInvalid):
        quantize_n3(f, Polynomial.zero(CTX3), g("x*D(1,2)"))


def test_quantize_requires_three_variables():
    f = parse_polynomial("x^2+y^2", CTX2)
    with pytest.raises(ValueError):
        quantize_n3(f, Polynomial.zero(CTX2), GElement.zero(CTX2))


# -- quantize_general ------------------------------------------------------------


def test_general_agrees_with_n3():
    rng = random.Random(83)
    for _, f in (("A2", a_k(2)), ("E8", e_8())):
        for _ in range(5):
            t = rand_trivector3(rng, CTX3)
            s1 = ad_f(f, t)
            p1 = rand_w_element(rng, f)
            exact = quantize_n3(f, p1, s1)
            general = quantize_general(f, p1, s1, max_order=6)
            assert isinstance(general, MCSolution)
            for k in range(7):
                expected = (
                    exact.s_series.coeffs[k] if k <= 2 else GElement.zero(CTX3)
                )
                assert general.s_series.coeffs[k] == expected


def test_general_constant_p_truncates():
    f = a_k(1)
    s = ad_f(f, g("D(1,2,3)"))
    sol = quantize_general(f, Polynomial.constant(CTX3, 2), s, max_order=5)
    assert isinstance(sol, MCSolution)
    for k in range(2, 6):
        assert sol.s_series.coeffs[k].is_zero()
    assert mc_verify(f, sol).ok


def test_general_n4_probe_records_outcome():
    # no expected value is asserted for n = 4; the probe must return a
    # well-formed result either way
    ctx4 = RingContext(("x", "y", "z", "w"))
    f = parse_polynomial("x^2+y^2+z^2+w^2", ctx4)
    t = parse_gelement("x*D(1,2,3) + w*D(2,3,4)", ctx4)
    s1 = ad_f(f, t)
    assert ad_f(f, s1).is_zero()
    if not bivector_square(s1).is_zero():
        pytest.skip("sampled datum is not quasiclassical")
    p1 = Polynomial.one(ctx4)
    result = quantize_general(f, p1, s1, max_order=4)
    if isinstance(result, ObstructionReport):
        assert result.kind in ("poisson_failure", "lift_failure")
        assert not result.obstruction.is_zero()
        assert 2 <= result.failing_order <= 4
    else:
        assert mc_verify(f, result).ok


def test_general_rejects_bad_first_order():
    f = a_k(1)
    with pytest.raises(QCInvalid):
        quantize_general(f, Polynomial.zero(CTX3), g("x*D(1,2)"), max_order=4)


def test_general_with_caller_p_series():
    f = a_k(2)
    x = Polynomial.variable(CTX3, 1)
    s1 = ad_f(f, GElement(CTX3, {(0, 0b111): x}))
    sol = quantize_general(f, x, s1, max_order=4, p_higher=[x * x])
    assert isinstance(sol, MCSolution)
    assert sol.p_series.coeffs[2] == x * x
    assert mc_verify(f, sol).ok


# -- mc_verify --------------------------------------------------------------------


def test_verify_flags_truncated_solution():
    # dropping the h^2 term of a nonconstant-p solution leaves a residual at h^2
    f = a_k(2)
    x = Polynomial.variable(CTX3, 1)
    t1 = GElement(CTX3, {(0, 0b111): x})
    s1 = ad_f(f, t1)
    good = quantize_n3(f, x, s1)
    zero_g = GElement.zero(CTX3)
    bad = MCSolution(
        order=4,
        p_series=good.p_series.padded(4, Polynomial.zero(CTX3)),
        s_series=HSeries([zero_g, s1, zero_g, zero_g, zero_g], 4),
        witness=None,
    )
    report = mc_verify(f, bad)
    assert not report.ok
    assert report.orders[1].is_zero()
    assert not report.orders[2].is_zero()


def test_verify_zero_solution():
    f = a_k(1)
    zero_sol = MCSolution(
        order=3,
        p_series=HSeries([Polynomial.zero(CTX3)] * 4, 3),
        s_series=HSeries([GElement.zero(CTX3)] * 4, 3),
        witness=None,
    )
    report = mc_verify(f, zero_sol)
    assert report.ok
    assert all(o.is_zero() for o in report.orders)


def test_verify_witness_consistency():
    f = a_k(2)
    x = Polynomial.variable(CTX3, 1)
    s1 = ad_f(f, GElement(CTX3, {(0, 0b111): x}))
    sol = quantize_n3(f, x, s1)
    assert mc_verify(f, sol).witness_consistent is True
    tampered = MCSolution(sol.order, sol.p_series, sol.s_series,
                          sol.witness.map(lambda c: c + c))
    bad = mc_verify(f, tampered)
    assert bad.witness_consistent is False and not bad.ok


def test_solution_json_roundtrip():
    f = a_k(2)
    x = Polynomial.variable(CTX3, 1)
    s1 = ad_f(f, GElement(CTX3, {(0, 0b111): x}))
    sol = quantize_n3(f, x, s1)
    blob = sol.to_json()
    back = MCSolution.from_json(CTX3, blob)
    assert back.p_series == sol.p_series
    assert back.s_series == sol.s_series
    assert back.witness == sol.witness
    assert mc_verify(f, back).ok
