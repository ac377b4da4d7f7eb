"""Singularity-theoretic analysis of a polynomial f.

Jacobian ideal, Milnor number, isolatedness, the monomial complement W of
the Jacobian ideal, and the monicizing coordinate change x_i -> x_i + x_n^N_i.
The Milnor number is the dimension of the global quotient
k[x_1..x_n] / (df/dx_1, ..., df/dx_n).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import NotIsolated
from .groebner import (
    GREVLEX,
    GroebnerBasis,
    MonomialOrder,
    buchberger,
    quotient_dimension,
    standard_monomials,
)
from .poly import INFINITE, Polynomial, RingContext, Substitution


@dataclass(frozen=True)
class JacobianData:
    """Partials, their reduced Groebner basis, the Milnor number, and the
    standard-monomial basis of the complement W."""

    partials: tuple[Polynomial, ...]
    gb: GroebnerBasis
    milnor: object  # int or "infinite"
    w_basis: tuple[tuple, ...]

    def report(self) -> dict:
        return {
            "milnor": self.milnor,
            "w_basis": [list(e) for e in self.w_basis],
            "isolated": self.milnor != INFINITE,
        }


def _require_nonconstant(f: Polynomial) -> None:
    if f.is_constant():
        raise ValueError("f must be nonconstant")
    if f.constant_term() != 0:
        warnings.warn(
            "f has a nonzero constant term; the Jacobian ideal is unaffected",
            stacklevel=3,
        )


def jacobian(
    f: Polynomial,
    order: MonomialOrder = GREVLEX,
    max_degree: int | None = None,
) -> JacobianData:
    """Partials, reduced GB of the Jacobian ideal, Milnor number, W basis."""
    _require_nonconstant(f)
    partials = tuple(f.partial(i) for i in range(1, f.ctx.n + 1))
    gb = buchberger([p for p in partials if not p.is_zero()], order, max_degree)
    mu = quotient_dimension(gb)
    if mu == INFINITE:
        w_basis = ()
    else:
        w_basis = tuple(standard_monomials(gb))
    return JacobianData(partials=partials, gb=gb, milnor=mu, w_basis=w_basis)


def milnor_number(f: Polynomial, max_degree: int | None = None):
    """dim k[x]/(df/dx_1..df/dx_n), or "infinite"."""
    return jacobian(f, max_degree=max_degree).milnor


def is_isolated(f: Polynomial, max_degree: int | None = None) -> bool:
    """True iff the Milnor number is finite (partials form a regular sequence)."""
    return milnor_number(f, max_degree=max_degree) != INFINITE


def qc_subspace(f: Polynomial, max_degree: int | None = None) -> list[tuple]:
    """Monomial basis of the canonical complement W of the Jacobian ideal."""
    data = jacobian(f, max_degree=max_degree)
    if data.milnor == INFINITE:
        raise NotIsolated("f is not an isolated singularity")
    return list(data.w_basis)


@dataclass(frozen=True)
class Singularity:
    """A polynomial f viewed as a map-germ; the base ring k[y] acts via y = f."""

    f: Polynomial

    def __post_init__(self):
        _require_nonconstant(self.f)

    @property
    def ctx(self) -> RingContext:
        return self.f.ctx

    def jacobian(self, max_degree: int | None = None) -> JacobianData:
        return jacobian(self.f, max_degree=max_degree)

    def milnor_number(self, max_degree: int | None = None):
        return milnor_number(self.f, max_degree=max_degree)

    def is_isolated(self, max_degree: int | None = None) -> bool:
        return is_isolated(self.f, max_degree=max_degree)


def _xn_lead(f: Polynomial) -> Polynomial:
    d = f.degree_in(f.ctx.n)
    return f.coefficient_of_power(f.ctx.n, d)


def is_monic_in_last(f: Polynomial) -> bool:
    """True iff the leading x_n coefficient of f is a nonzero constant."""
    return _xn_lead(f).is_constant()


def monicize(f: Polynomial) -> tuple[Substitution, Polynomial]:
    """A substitution x_i -> x_i + x_n^N_i (i < n) making f monic in x_n.

    Already-monic inputs get the identity.  The first candidate takes
    N_i = deg_{x_n}(f) + i; if a coefficient cancellation defeats it, the
    fallback N_i = (1 + deg f + k)^i separates the weighted degrees of all
    monomials of f and is guaranteed to work.
    """
    _require_nonconstant(f)
    ctx = f.ctx
    if is_monic_in_last(f):
        return Substitution.identity(ctx), f
    n = ctx.n

    def candidate(exponents: list[int]) -> Substitution:
        images = []
        xn = Polynomial.variable(ctx, n)
        for i in range(1, n):
            images.append(Polynomial.variable(ctx, i) + xn ** exponents[i - 1])
        images.append(xn)
        return Substitution(ctx, tuple(images))

    d_n = max(f.degree_in(n), 0)
    attempts = [[d_n + i for i in range(1, n)]]
    base = f.total_degree() + 1
    attempts.append([base ** i for i in range(1, n)])
    for exponents in attempts:
        sigma = candidate(exponents)
        image = sigma(f)
        if is_monic_in_last(image):
            return sigma, image
    raise AssertionError("geometric exponents must monicize")  # unreachable


# -- catalog of classical test singularities (n = 3) -------------------------

ADE_CONTEXT = RingContext(("x", "y", "z"))


def _xyz():
    return (
        Polynomial.variable(ADE_CONTEXT, 1),
        Polynomial.variable(ADE_CONTEXT, 2),
        Polynomial.variable(ADE_CONTEXT, 3),
    )


def a_k(k: int) -> Polynomial:
    x, y, z = _xyz()
    return x ** (k + 1) + y ** 2 + z ** 2


def d_k(k: int) -> Polynomial:
    x, y, z = _xyz()
    return x ** (k - 1) + x * y ** 2 + z ** 2


def e_6() -> Polynomial:
    x, y, z = _xyz()
    return x ** 3 + y ** 4 + z ** 2


def e_7() -> Polynomial:
    x, y, z = _xyz()
    return x ** 3 + x * y ** 3 + z ** 2


def e_8() -> Polynomial:
    x, y, z = _xyz()
    return x ** 3 + y ** 5 + z ** 2


def ade_catalog() -> list[tuple[str, Polynomial]]:
    entries = [(f"A{k}", a_k(k)) for k in range(1, 7)]
    entries.append(("D4", d_k(4)))
    entries.append(("E6", e_6()))
    entries.append(("E7", e_7()))
    entries.append(("E8", e_8()))
    return entries
