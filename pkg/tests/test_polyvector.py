"""Graded algebra and bracket: products, Schouten bracket, differentials,
Maurer-Cartan residuals."""

import random
from fractions import Fraction

import pytest

from ncunfold.errors import ContextMismatch
from ncunfold.parsing import parse_gelement
from ncunfold.poly import HSeries, Polynomial, RingContext
from ncunfold.polyvector import (
    GElement,
    ad_f,
    bivector_square,
    g_differential,
    mc_residual,
    schouten_bracket,
)
from ncunfold.singularity import ADE_CONTEXT, a_k

from oracles import (
    commutator_oracle,
    cross_product_components,
    koszul_contraction_oracle,
    rand_bivector,
    rand_gelement,
    rand_homogeneous,
    rand_poly,
    schouten_oracle,
)

CTX3 = ADE_CONTEXT
CTX2 = RingContext(("x", "y"))


def g(text, ctx=CTX3):
    return parse_gelement(text, ctx)


# -- wedge product ------------------------------------------------------------


def test_wedge_repeated_odd_generator_vanishes():
    assert (g("D(1,2)") * g("D(1)")).is_zero()


def test_wedge_odd_swap_sign():
    assert g("D(2)") * g("D(1)") == -g("D(1,2)")


def test_eps_is_even_and_central():
    e = GElement.eps(CTX3)
    x = GElement.from_polynomial(Polynomial.variable(CTX3, 1))
    assert e * e * x == x * e * e
    assert e * g("D(1)") == g("D(1)") * e


def test_wedge_graded_commutativity_random():
    rng = random.Random(101)
    for _ in range(40):
        a = rand_homogeneous(rng, CTX3, rng.randint(0, 4))
        b = rand_homogeneous(rng, CTX3, rng.randint(0, 4))
        da, db = a.degree(), b.degree()
        lhs = a * b
        rhs = b * a
        if (da * db) & 1:
            rhs = -rhs
        assert lhs == rhs


def test_degree_accessors():
    t = g("x*E*D(1)")
    assert t.degree() == 3
    assert not g("E + D(1)").is_homogeneous()
    assert g("E + D(1,2)").is_homogeneous(2)


# -- bracket ------------------------------------------------------------------


def test_bracket_of_vector_with_itself_vanishes():
    rng = random.Random(5)
    for _ in range(20):
        x = rand_homogeneous(rng, CTX3, 1)
        assert schouten_bracket(x, x).is_zero()


def test_bracket_commutator_example():
    x = g("x*D(2)", CTX2)
    y = g("y*D(1)", CTX2)
    assert schouten_bracket(x, y) == g("x*D(1) - y*D(2)", CTX2)


def test_bracket_function_vs_vector():
    xsq = GElement.from_polynomial(Polynomial.variable(CTX2, 1) ** 2)
    d1 = GElement.gen(CTX2, 1)
    two_x = GElement.from_polynomial(2 * Polynomial.variable(CTX2, 1))
    assert schouten_bracket(xsq, d1) == -two_x
    assert schouten_bracket(d1, xsq) == two_x


def test_bracket_context_mismatch():
    with pytest.raises(ContextMismatch):
        schouten_bracket(g("D(1)"), g("D(1)", CTX2))


def test_bracket_matches_left_recursion_oracle():
    rng = random.Random(313)
    for _ in range(60):
        a = rand_gelement(rng, CTX3, max_eps=1)
        b = rand_gelement(rng, CTX3, max_eps=1)
        assert schouten_bracket(a, b) == schouten_oracle(a, b)


def test_bracket_on_vectors_matches_derivation_commutator():
    rng = random.Random(17)
    for _ in range(40):
        a = rand_homogeneous(rng, CTX3, 1)
        b = rand_homogeneous(rng, CTX3, 1)
        assert schouten_bracket(a, b) == commutator_oracle(a, b)


def test_graded_antisymmetry_random():
    rng = random.Random(23)
    for _ in range(60):
        a = rand_homogeneous(rng, CTX3, rng.randint(0, 4))
        b = rand_homogeneous(rng, CTX3, rng.randint(0, 4))
        lhs = schouten_bracket(a, b)
        rhs = schouten_bracket(b, a)
        if ((a.degree() - 1) * (b.degree() - 1)) & 1:
            assert lhs == rhs
        else:
            assert lhs == -rhs


def test_graded_jacobi_random():
    rng = random.Random(29)
    for _ in range(40):
        a = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        b = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        c = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        lhs = schouten_bracket(a, schouten_bracket(b, c))
        rhs = schouten_bracket(schouten_bracket(a, b), c)
        tail = schouten_bracket(b, schouten_bracket(a, c))
        if ((a.degree() - 1) * (b.degree() - 1)) & 1:
            tail = -tail
        assert lhs == rhs + tail


def test_graded_leibniz_random():
    rng = random.Random(31)
    for _ in range(40):
        a = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        b = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        c = rand_homogeneous(rng, CTX3, rng.randint(0, 3), max_degree=1)
        lhs = schouten_bracket(a, b * c)
        rhs = schouten_bracket(a, b) * c
        tail = b * schouten_bracket(a, c)
        if ((a.degree() - 1) * b.degree()) & 1:
            tail = -tail
        assert lhs == rhs + tail


# -- ad_f and the inner differential -------------------------------------------


def test_koszul_contraction_example():
    f = a_k(1)
    image = ad_f(f, g("D(1,2,3)"))
    # components (2x, 2y, 2z) in the basis (d23, d31, d12), up to the global
    # sign -1 fixed by this library's convention
    expected = -(g("2*x*D(2,3)") + g("2*y*D(3,1)") + g("2*z*D(1,2)"))
    assert image == expected


def test_ad_f_on_functions_vanishes():
    f = a_k(1)
    rng = random.Random(37)
    for _ in range(10):
        a = GElement.from_polynomial(rand_poly(rng, CTX3, 3))
        assert ad_f(f, a).is_zero()


def test_ad_f_squares_to_zero():
    rng = random.Random(41)
    for _ in range(30):
        f = rand_poly(rng, CTX3, 3)
        x = rand_gelement(rng, CTX3)
        assert ad_f(f, ad_f(f, x)).is_zero()


def test_ad_f_matches_contraction_oracle():
    rng = random.Random(43)
    for _ in range(40):
        f = rand_poly(rng, CTX3, 3)
        x = rand_gelement(rng, CTX3)
        assert ad_f(f, x) == koszul_contraction_oracle(f, x)


def test_g_differential_generator_values():
    f = a_k(1)
    assert g_differential(f, GElement.eps(CTX3)).is_zero()
    for i in (1, 2, 3):
        expected = GElement.from_polynomial(f.partial(i)) * GElement.eps(CTX3)
        assert g_differential(f, GElement.gen(CTX3, i)) == expected


def test_g_differential_squares_to_zero():
    rng = random.Random(47)
    for _ in range(30):
        f = rand_poly(rng, CTX3, 3)
        x = rand_gelement(rng, CTX3)
        assert g_differential(f, g_differential(f, x)).is_zero()


def test_cross_product_law_n3():
    rng = random.Random(53)
    f = a_k(2)
    for _ in range(40):
        s = rand_bivector(rng, CTX3)
        image = ad_f(f, s)
        cross = cross_product_components(s, f)
        assert image.is_zero() == all(c.is_zero() for c in cross)
        # and the exact componentwise law: ad_f(S) = -(s x grad f) . d
        comp = image.wedge_components(1)
        for i in (1, 2, 3):
            got = comp.get((i,), Polynomial.zero(CTX3))
            assert got == -cross[i - 1]


# -- Maurer-Cartan residual -----------------------------------------------------


def _series(coeff1, order=4):
    zero = GElement.zero(CTX3)
    return HSeries([zero, coeff1] + [zero] * (order - 1), order)


def test_mc_residual_pure_eps_part_vanishes():
    rng = random.Random(59)
    f = a_k(1)
    for _ in range(10):
        p = rand_poly(rng, CTX3, 3)
        w = _series(GElement.from_polynomial(p) * GElement.eps(CTX3))
        assert all(c.is_zero() for c in mc_residual(f, w).coeffs)


def test_mc_residual_of_closed_poisson_bivector_vanishes():
    f = a_k(1)
    s = ad_f(f, g("x*D(1,2,3)"))  # a cycle; exact bivectors are Poisson for n = 3
    assert ad_f(f, s).is_zero()
    assert bivector_square(s).is_zero()
    w = _series(s)
    assert all(c.is_zero() for c in mc_residual(f, w).coeffs)


def test_mc_residual_nonzero_term():
    f = a_k(1)
    s = g("x*D(1,2)")
    w = _series(s)
    res = mc_residual(f, w)
    expected_h1 = -(GElement.eps(CTX3) * ad_f(f, s))
    assert res.coeffs[1] == expected_h1
    assert not res.coeffs[1].is_zero()


def test_mc_residual_decomposition():
    # residual_k = -eps * [f - p, S]_k + (1/2) [S, S]_k, term by term
    rng = random.Random(61)
    f = a_k(2)
    eps = GElement.eps(CTX3)
    for _ in range(15):
        p = rand_poly(rng, CTX3, 2)
        s = rand_bivector(rng, CTX3)
        order = 4
        zero = GElement.zero(CTX3)
        w = HSeries(
            [zero, GElement.from_polynomial(p) * eps + s, zero, zero, zero], order
        )
        res = mc_residual(f, w)
        fp = HSeries(
            [GElement.from_polynomial(f), GElement.from_polynomial(-p), zero, zero, zero],
            order,
        )
        sser = HSeries([zero, s, zero, zero, zero], order)
        bracket = fp.convolve(sser, schouten_bracket)
        square = sser.convolve(sser, schouten_bracket)
        for k in range(order + 1):
            expected = -(eps * bracket.coeffs[k]) + square.coeffs[k].scale(
                Fraction(1, 2)
            )
            assert res.coeffs[k] == expected


def test_mc_residual_rejects_bad_degrees():
    f = a_k(1)
    zero = GElement.zero(CTX3)
    with pytest.raises(ValueError):
        mc_residual(f, HSeries([zero, g("D(1)")], 1))
    with pytest.raises(ValueError):
        mc_residual(f, HSeries([g("E"), zero], 1))


# -- bivector square ------------------------------------------------------------


def test_bivector_square_constant_coefficients():
    assert bivector_square(g("D(1,2)")).is_zero()


def test_bivector_square_of_exact_bivectors_n3():
    rng = random.Random(67)
    f = a_k(3)
    for _ in range(25):
        t = GElement(CTX3, {(0, 0b111): rand_poly(rng, CTX3, 2)})
        s = ad_f(f, t)
        assert bivector_square(s).is_zero()


def test_bivector_square_example_vs_oracle():
    s = g("z*D(1,2) + x*D(2,3)")
    assert bivector_square(s) == schouten_oracle(s, s)
    assert bivector_square(s).is_zero()  # this S happens to be Poisson
    s2 = g("z*D(1,2) + x*y*D(2,3)")
    assert bivector_square(s2) == schouten_oracle(s2, s2)
    assert not bivector_square(s2).is_zero()


def test_bivector_square_rejects_wrong_degree():
    with pytest.raises(ValueError):
        bivector_square(g("D(1)"))
    with pytest.raises(ValueError):
        bivector_square(g("E"))
