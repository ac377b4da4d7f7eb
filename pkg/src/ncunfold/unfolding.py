"""Deformation-theory payload: quasiclassical data, constructive Koszul
lifting, the exact n = 3 quantizer, and an order-by-order prober for
general n with obstruction reporting.

A solution of the deformation equation is a pair of h-series (p, S) with

    [f - p, S] = 0      and      [S, S] = 0

order by order; the residual dw + (1/2)[w, w] of w = p*eps + S decomposes
as -eps*[f - p, S] + (1/2)[S, S] under the bracket convention of
``polyvector``.  Constructive lifting against the Koszul differential
turns the first equation into a module-preimage problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotACycle, NotIsolated, QCInvalid
from .groebner import GREVLEX, ModuleElement, module_preimage, normal_form
from .poly import INFINITE, HSeries, Polynomial, RingContext
from .polyvector import (
    GElement,
    ad_f,
    bivector_square,
    mask_of,
    mc_residual,
    schouten_bracket,
)
from .singularity import jacobian


def _wedge_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, n + 1), k))


def _components(z: GElement, k: int) -> list[Polynomial]:
    ctx = z.ctx
    comp = z.wedge_components(k)
    return [comp.get(sub, Polynomial.zero(ctx)) for sub in _wedge_subsets(ctx.n, k)]


def _from_components(ctx: RingContext, k: int, values) -> GElement:
    acc = GElement.zero(ctx)
    for sub, c in zip(_wedge_subsets(ctx.n, k), values):
        acc = acc + GElement(ctx, {(0, mask_of(sub)): c})
    return acc


def koszul_differential_matrix(f: Polynomial, k: int) -> list[list[Polynomial]]:
    """Matrix of [f, -] from wedge degree k+1 to wedge degree k, in the
    bases of increasing index subsets."""
    ctx = f.ctx
    rows = _wedge_subsets(ctx.n, k)
    cols = _wedge_subsets(ctx.n, k + 1)
    matrix = [[Polynomial.zero(ctx) for _ in cols] for _ in rows]
    row_index = {sub: i for i, sub in enumerate(rows)}
    for j, sub in enumerate(cols):
        image = ad_f(f, GElement.wedge_monomial(ctx, sub))
        for idx, coeff in image.wedge_components(k).items():
            matrix[row_index[idx]][j] = coeff
    return matrix


def _wedge_degree_of(z: GElement) -> int:
    degs = z.wedge_degrees()
    if len(degs) != 1:
        raise ValueError("element must be wedge-homogeneous")
    return degs.pop()


def koszul_lift(
    f: Polynomial, z: GElement, max_degree: int | None = None
) -> GElement:
    """T with [f, T] == z, for a cycle z of wedge degree >= 1.

    Distinct errors: NotIsolated when f has infinite Milnor number,
    NotACycle when [f, z] != 0.  For isolated f and a cycle z the lift
    always exists; the result is verified before returning.
    """
    ctx = f.ctx
    if not z.is_polyvector():
        raise ValueError("lift input must be eps-free")
    data = jacobian(f, max_degree=max_degree)
    if data.milnor == INFINITE:
        raise NotIsolated("f is not an isolated singularity")
    if not ad_f(f, z).is_zero():
        raise NotACycle("[f, z] != 0")
    if z.is_zero():
        return GElement.zero(ctx)
    k = _wedge_degree_of(z)
    if k < 1:
        raise ValueError("lift input must have wedge degree >= 1")
    if k >= ctx.n:
        # wedge degree n+1 vanishes; the only degree-n cycle is 0
        raise NotACycle("no nonzero cycles in top wedge degree")
    matrix = koszul_differential_matrix(f, k)
    b = ModuleElement(tuple(_components(z, k)))
    sol = module_preimage(matrix, b, GREVLEX, max_degree)
    if sol is None:
        raise RuntimeError("internal: Koszul lift failed for an isolated f")
    lift = _from_components(ctx, k + 1, sol.components)
    if ad_f(f, lift) != z:
        raise RuntimeError("internal: Koszul lift verification failed")
    return lift


@dataclass(frozen=True)
class QCNormalization:
    """p = w_part + sum(cofactors_i * df/dx_i), with w_part supported on W."""

    w_part: Polynomial
    cofactors: tuple[Polynomial, ...]


def qc_normalize(
    f: Polynomial, p: Polynomial, max_degree: int | None = None
) -> QCNormalization:
    """Split p into its W-component and a Jacobian-ideal part with explicit
    cofactors over the partials.  Idempotent on W-supported inputs."""
    data = jacobian(f, max_degree=max_degree)
    if data.milnor == INFINITE:
        raise NotIsolated("f is not an isolated singularity")
    trace = normal_form(p, data.gb, max_degree)
    # gb.source rows are over the nonzero partials, in order
    nonzero_pos = [j for j, g in enumerate(data.partials) if not g.is_zero()]
    cofs = [Polynomial.zero(f.ctx) for _ in data.partials]
    for c, src in zip(trace.cofactors, data.gb.source_cofactors):
        for i, j in enumerate(nonzero_pos):
            cofs[j] = cofs[j] + c * src[i]
    w_part = trace.remainder
    acc = w_part
    for c, g in zip(cofs, data.partials):
        acc = acc + c * g
    if acc != p:
        raise AssertionError("qc_normalize cofactor identity violated")
    return QCNormalization(w_part=w_part, cofactors=tuple(cofs))


@dataclass(frozen=True)
class QCViolation:
    kind: str  # "not_f_compatible" | "not_poisson" | "wrong_degree"
    message: str
    element: GElement | None = None


@dataclass(frozen=True)
class QuasiClassicalDatum:
    """First-order data (p, S) with [f, S] = 0 and [S, S] = 0; p is kept both
    raw and in W-normal form."""

    f: Polynomial
    p_raw: Polynomial
    p_normal: Polynomial
    p_cofactors: tuple[Polynomial, ...]
    s: GElement
    extension_bivector: GElement  # S_2 with [f, S_2] = [p, S]


def qc_validate(f: Polynomial, p: Polynomial, s: GElement, max_degree: int | None = None):
    """QuasiClassicalDatum on success, else the list of violations.

    The second-order extendability is rechecked constructively: a bivector
    S_2 with [f, S_2] = [p, S] is produced by Koszul lifting (this always
    succeeds for a valid datum)."""
    data = jacobian(f, max_degree=max_degree)
    if data.milnor == INFINITE:
        raise NotIsolated("f is not an isolated singularity")
    violations = []
    if not s.is_polyvector() or not (s.wedge_degrees() <= {2}):
        violations.append(
            QCViolation("wrong_degree", "S must be an eps-free bivector", s)
        )
        return violations
    fs = ad_f(f, s)
    if not fs.is_zero():
        violations.append(QCViolation("not_f_compatible", "[f, S] != 0", fs))
    ss = schouten_bracket(s, s)
    if not ss.is_zero():
        violations.append(QCViolation("not_poisson", "[S, S] != 0", ss))
    if violations:
        return violations
    norm = qc_normalize(f, p, max_degree)
    ps = schouten_bracket(GElement.from_polynomial(p), s)
    s2 = koszul_lift(f, ps, max_degree)
    return QuasiClassicalDatum(
        f=f,
        p_raw=p,
        p_normal=norm.w_part,
        p_cofactors=norm.cofactors,
        s=s,
        extension_bivector=s2,
    )


EXACT = "exact"


@dataclass(frozen=True)
class MCSolution:
    """Truncated (or exact polynomial-in-h) solution series.

    `order` is either a truncation order or "exact"; `witness` is a
    trivector series T with S = [f - p, T] when available.
    """

    order: object  # int or "exact"
    p_series: HSeries  # Polynomial coefficients
    s_series: HSeries  # GElement (bivector) coefficients
    witness: HSeries | None = None

    def h_degree(self) -> int:
        dp = max((k for k, c in enumerate(self.p_series.coeffs) if not c.is_zero()), default=0)
        ds = max((k for k, c in enumerate(self.s_series.coeffs) if not c.is_zero()), default=0)
        return max(dp, ds)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "p": [c.to_json() for c in self.p_series.coeffs],
            "S": [c.to_json() for c in self.s_series.coeffs],
            "T": None
            if self.witness is None
            else [c.to_json() for c in self.witness.coeffs],
            "residual_checked": True,
        }

    @classmethod
    def from_json(cls, ctx: RingContext, data: dict) -> "MCSolution":
        p = [Polynomial.from_json(ctx, c) for c in data["p"]]
        s = [GElement.from_json(ctx, c) for c in data["S"]]
        witness = None
        if data.get("T") is not None:
            witness = HSeries([GElement.from_json(ctx, c) for c in data["T"]])
        return cls(data["order"], HSeries(p), HSeries(s), witness)


@dataclass(frozen=True)
class ObstructionReport:
    """First failure of the order-by-order extension."""

    failing_order: int
    obstruction: GElement
    kind: str  # "lift_failure" | "poisson_failure"

    def __post_init__(self):
        if self.obstruction.is_zero():
            raise ValueError("obstruction must be nonzero")


@dataclass(frozen=True)
class OrderResidual:
    h_power: int
    bracket_f_minus_p_s: GElement
    poisson_square: GElement
    residual: GElement

    def is_zero(self) -> bool:
        return (
            self.bracket_f_minus_p_s.is_zero()
            and self.poisson_square.is_zero()
            and self.residual.is_zero()
        )


@dataclass(frozen=True)
class MCReport:
    orders: tuple[OrderResidual, ...]
    witness_consistent: bool | None
    ok: bool

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "witness_consistent": self.witness_consistent,
            "orders": [
                {
                    "h_power": o.h_power,
                    "bracket_f_minus_p_S": o.bracket_f_minus_p_s.to_json(),
                    "SS": o.poisson_square.to_json(),
                    "residual": o.residual.to_json(),
                }
                for o in self.orders
            ],
        }


def _w_series(p_series: HSeries, s_series: HSeries, ctx: RingContext) -> HSeries:
    eps = GElement.eps(ctx)
    pg = p_series.map(lambda c: GElement.from_polynomial(c) * eps)
    return pg + s_series


def _f_minus_p(f: Polynomial, p_series: HSeries, ctx: RingContext) -> HSeries:
    coeffs = [GElement.from_polynomial(f - p_series.coeffs[0])]
    for k in range(1, p_series.order + 1):
        coeffs.append(GElement.from_polynomial(-p_series.coeffs[k]))
    return HSeries(coeffs, p_series.order)


def mc_verify(f: Polynomial, sol: MCSolution) -> MCReport:
    """Per-order values of [f - p, S], [S, S], and the assembled residual.

    The three are also checked for mutual consistency
    (residual = -eps*[f - p, S] + (1/2)[S, S] at each order).
    """
    ctx = f.ctx
    if sol.order == EXACT:
        dp = sol.p_series.order
        ds = sol.s_series.order
        check_order = max(dp + ds, 2 * ds, 1)
    else:
        check_order = sol.order
    zero_p = Polynomial.zero(ctx)
    zero_g = GElement.zero(ctx)
    p = sol.p_series.padded(check_order, zero_p)
    s = sol.s_series.padded(check_order, zero_g)
    fp = _f_minus_p(f, p, ctx)
    bracket = fp.convolve(s, schouten_bracket)
    square = s.convolve(s, schouten_bracket)
    w = _w_series(p, s, ctx)
    residual = mc_residual(f, w)
    eps = GElement.eps(ctx)
    orders = []
    ok = True
    for k in range(check_order + 1):
        b_k = bracket.coeffs[k]
        s_k = square.coeffs[k]
        r_k = residual.coeffs[k]
        expected = -(eps * b_k) + s_k.scale(Fraction(1, 2))
        if r_k != expected:
            raise AssertionError("residual decomposition violated")
        orders.append(OrderResidual(k, b_k, s_k, r_k))
        if not r_k.is_zero():
            ok = False
    witness_consistent = None
    if sol.witness is not None:
        t = sol.witness.padded(check_order, zero_g)
        rebuilt = fp.convolve(t, schouten_bracket)
        witness_consistent = all(
            rebuilt.coeffs[k] == s.coeffs[k] for k in range(check_order + 1)
        )
        ok = ok and witness_consistent
    return MCReport(orders=tuple(orders), witness_consistent=witness_consistent, ok=ok)


def _require_valid(f, p1, s1, max_degree):
    result = qc_validate(f, p1, s1, max_degree)
    if isinstance(result, list):
        raise QCInvalid(result)
    return result


def quantize_n3(
    f: Polynomial, p1: Polynomial, s1: GElement, max_degree: int | None = None
) -> MCSolution:
    """Exact quantization of a valid quasiclassical datum for n = 3.

    With T_1 a Koszul lift of S_1 the pair p = p1*h, T = T_1*h solves the
    deformation equation exactly: S = [f - p, T] = S_1*h - [p1, T_1]*h^2,
    and [S, S] vanishes identically because [T, [f - p, T]] is a
    four-vector.  The residual is verified to be identically zero.
    """
    ctx = f.ctx
    if ctx.n != 3:
        raise ValueError("quantize_n3 requires exactly three variables")
    _require_valid(f, p1, s1, max_degree)
    t1 = koszul_lift(f, s1, max_degree) if not s1.is_zero() else GElement.zero(ctx)
    zero_p = Polynomial.zero(ctx)
    zero_g = GElement.zero(ctx)
    p_series = HSeries([zero_p, p1, zero_p], 2)
    witness = HSeries([zero_g, t1, zero_g], 2)
    fp = _f_minus_p(f, p_series, ctx)
    s_series = fp.convolve(witness, schouten_bracket)
    sol = MCSolution(EXACT, p_series, s_series, witness)
    report = mc_verify(f, sol)
    if not report.ok:
        raise RuntimeError("internal: quantize_n3 produced a nonzero residual")
    return sol


def quantize_general(
    f: Polynomial,
    p1: Polynomial,
    s1: GElement,
    max_order: int = 8,
    p_higher=None,
    max_degree: int | None = None,
):
    """Order-by-order extension probe for arbitrary n.

    The solution is sought in witness form S = [f - p, T] with
    T = (lift of S_1) * h, which settles [f - p, S] = 0 identically; the
    remaining Poisson condition sum_{i+j=k} [S_i, S_j] = 0 is checked at
    each order and the first nonzero component is reported as an
    obstruction.  Higher p-coefficients default to zero but may be
    supplied by the caller.  Returns MCSolution or ObstructionReport.
    """
    ctx = f.ctx
    data = jacobian(f, max_degree=max_degree)
    if data.milnor == INFINITE:
        raise NotIsolated("f is not an isolated singularity")
    violations = []
    if not ad_f(f, s1).is_zero():
        violations.append(QCViolation("not_f_compatible", "[f, S1] != 0"))
    if not bivector_square(s1).is_zero():
        violations.append(QCViolation("not_poisson", "[S1, S1] != 0"))
    if violations:
        raise QCInvalid(violations)
    if max_order < 2:
        raise ValueError("max_order must be >= 2")
    zero_p = Polynomial.zero(ctx)
    zero_g = GElement.zero(ctx)
    p_coeffs = [zero_p, p1] + [zero_p] * (max_order - 1)
    if p_higher:
        for k, val in enumerate(p_higher, start=2):
            if k > max_order:
                break
            p_coeffs[k] = val
    p_series = HSeries(p_coeffs, max_order)
    t1 = koszul_lift(f, s1, max_degree) if not s1.is_zero() else zero_g
    witness = HSeries([zero_g, t1] + [zero_g] * (max_order - 1), max_order)
    fp = _f_minus_p(f, p_series, ctx)
    s_series = fp.convolve(witness, schouten_bracket)
    square = s_series.convolve(s_series, schouten_bracket)
    for k in range(2, max_order + 1):
        if not square.coeffs[k].is_zero():
            return ObstructionReport(
                failing_order=k,
                obstruction=square.coeffs[k],
                kind="poisson_failure",
            )
    sol = MCSolution(max_order, p_series, s_series, witness)
    report = mc_verify(f, sol)
    if not report.ok:
        raise RuntimeError("internal: quantize_general produced a nonzero residual")
    return sol
