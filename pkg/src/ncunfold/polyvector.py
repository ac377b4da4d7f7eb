"""The graded super-commutative algebra A[eps, d_1, ..., d_n].

Elements are sums of terms  c * eps^e * d_{i_1} ^ ... ^ d_{i_k}  with
polynomial coefficients c, an even generator eps of degree 2, and odd
generators d_i of degree 1 (d_i is the coordinate vector field along x_i).
The degree of a term is 2e + k.

The bracket implemented here is the unique degree -1 biderivation with

    [d_i, a] = da/dx_i      [d_i, d_j] = 0      [eps, -] = 0
    [a, b]   = 0            (a, b polynomials)

extended by graded antisymmetry

    [X, Y] = -(-1)^((|X|-1)(|Y|-1)) [Y, X]

and the graded Leibniz rule

    [X, Y ^ Z] = [X, Y] ^ Z + (-1)^((|X|-1)|Y|) Y ^ [X, Z].

These generator values plus the two rules pin every sign in the library;
all "up to sign" expectations in the test-suite use this convention.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ContextMismatch
from .poly import HSeries, Polynomial, RingContext


def _popcount(m: int) -> int:
    return bin(m).count("1")


def bits_of(mask: int) -> tuple[int, ...]:
    """1-based odd generator indices present in a bitmask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def _merge_sign(m1: int, m2: int) -> int:
    """Parity (+1/-1) of sorting the concatenation d_{m1} d_{m2}; 0 on overlap."""
    if m1 & m2:
        return 0
    swaps = 0
    m = m2
    j = 0
    while m:
        if m & 1:
            swaps += _popcount(m1 >> (j + 1))
        m >>= 1
        j += 1
    return -1 if swaps & 1 else 1


class GElement:
    """Element of A[eps, d_1..d_n]; terms keyed by (eps power, odd bitmask)."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RingContext, terms: dict | None = None):
        self.ctx = ctx
        clean: dict[tuple[int, int], Polynomial] = {}
        if terms:
            for (e, mask), coeff in terms.items():
                if e < 0:
                    raise ValueError("negative eps power")
                if mask >> ctx.n:
                    raise ValueError("odd index out of range")
                if coeff.ctx != ctx:
                    raise ContextMismatch("coefficient from a different ring")
                if not coeff.is_zero():
                    clean[(e, mask)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: RingContext) -> "GElement":
        return cls(ctx)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "GElement":
        return cls(p.ctx, {(0, 0): p})

    @classmethod
    def eps(cls, ctx: RingContext, power: int = 1) -> "GElement":
        return cls(ctx, {(power, 0): Polynomial.one(ctx)})

    @classmethod
    def gen(cls, ctx: RingContext, i: int) -> "GElement":
        """The odd generator d_i (1-based)."""
        if not 1 <= i <= ctx.n:
            raise IndexError(f"odd index {i} out of range 1..{ctx.n}")
        return cls(ctx, {(0, 1 << (i - 1)): Polynomial.one(ctx)})

    @classmethod
    def wedge_monomial(cls, ctx: RingContext, indices, coeff: Polynomial | None = None) -> "GElement":
        """d_{i_1} ^ ... ^ d_{i_k} for strictly increasing indices."""
        idx = tuple(indices)
        if any(not 1 <= i <= ctx.n for i in idx):
            raise IndexError("odd index out of range")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        c = coeff if coeff is not None else Polynomial.one(ctx)
        return cls(ctx, {(0, mask_of(idx)): c})

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_polyvector(self) -> bool:
        """True iff eps-free."""
        return all(e == 0 for e, _ in self.terms)

    def degrees(self) -> set[int]:
        """Cohomological degrees 2e + |I| present."""
        return {2 * e + _popcount(m) for e, m in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = self.degrees()
        if degree is not None:
            return degs <= {degree}
        return len(degs) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous element (0 for the zero element)."""
        degs = self.degrees()
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def wedge_degrees(self) -> set[int]:
        return {_popcount(m) for e, m in self.terms}

    def polynomial_part(self) -> Polynomial:
        return self.terms.get((0, 0), Polynomial.zero(self.ctx))

    def wedge_components(self, k: int) -> dict[tuple[int, ...], Polynomial]:
        """Coefficients of the eps-free wedge-degree-k part, keyed by index tuple."""
        out = {}
        for (e, m), c in self.terms.items():
            if e == 0 and _popcount(m) == k:
                out[bits_of(m)] = c
        return out

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "GElement") -> "GElement":
        if not isinstance(other, GElement):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatch("mixed contexts")
        res = dict(self.terms)
        for key, c in other.terms.items():
            s = res.get(key)
            s = c if s is None else s + c
            if s.is_zero():
                res.pop(key, None)
            else:
                res[key] = s
        out = GElement.__new__(GElement)
        out.ctx = self.ctx
        out.terms = res
        return out

    def __sub__(self, other: "GElement") -> "GElement":
        return self + (-other)

    def __neg__(self) -> "GElement":
        out = GElement.__new__(GElement)
        out.ctx = self.ctx
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def scale(self, q) -> "GElement":
        q = Fraction(q)
        out = GElement.__new__(GElement)
        out.ctx = self.ctx
        out.terms = {} if q == 0 else {k: c * q for k, c in self.terms.items()}
        return out

    def __mul__(self, other):
        """Graded-commutative (wedge) product; eps is even, d_i odd."""
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Polynomial):
            other = GElement.from_polynomial(other)
        if not isinstance(other, GElement):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatch("mixed contexts")
        res: dict[tuple[int, int], Polynomial] = {}
        for (e1, m1), c1 in self.terms.items():
            for (e2, m2), c2 in other.terms.items():
                sign = _merge_sign(m1, m2)
                if sign == 0:
                    continue
                key = (e1 + e2, m1 | m2)
                piece = c1 * c2 if sign > 0 else -(c1 * c2)
                s = res.get(key)
                s = piece if s is None else s + piece
                if s.is_zero():
                    res.pop(key, None)
                else:
                    res[key] = s
        out = GElement.__new__(GElement)
        out.ctx = self.ctx
        out.terms = res
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, GElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    # -- presentation -------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, int], Polynomial]]:
        return sorted(
            self.terms.items(),
            key=lambda t: (2 * t[0][0] + _popcount(t[0][1]), t[0][0], t[0][1]),
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, mask), coeff in self.sorted_terms():
            tail = []
            if e == 1:
                tail.append("E")
            elif e > 1:
                tail.append(f"E^{e}")
            if mask:
                tail.append("D(" + ",".join(str(i) for i in bits_of(mask)) + ")")
            sign = "+"
            if len(coeff.terms) == 1:
                (exps, c), = coeff.terms.items()
                mono = self.ctx.format_monomial(exps)
                mag = abs(c)
                if c < 0:
                    sign = "-"
                head = []
                if mag != 1 or (mono == "1" and not tail):
                    head.append(str(mag))
                if mono != "1":
                    head.append(mono)
                body = "*".join(head + tail) if (head or tail) else "1"
            elif not tail:
                body = str(coeff) if not parts else f"({coeff})"
            else:
                body = "*".join([f"({coeff})"] + tail)
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"GElement({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"eps": e, "odd": list(bits_of(mask)), "coeff": c.to_json()}
                for (e, mask), c in self.sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, ctx: RingContext, data: dict) -> "GElement":
        acc = cls.zero(ctx)
        for t in data["terms"]:
            coeff = Polynomial.from_json(ctx, t["coeff"])
            part = cls(ctx, {(t["eps"], mask_of(t["odd"])): coeff})
            acc = acc + part
        return acc


# ---------------------------------------------------------------------------
# the bracket

# factor kinds used by the recursion; each monomial term splits into a list
# [("c", poly)] + [("eps", e)] + [("odd", i), ...]
def _factor_degree(f) -> int:
    kind = f[0]
    if kind == "c":
        return 0
    if kind == "eps":
        return 2 * f[1]
    return 1


def _factors_degree(fs) -> int:
    return sum(_factor_degree(f) for f in fs)


def _factor_element(ctx: RingContext, f) -> GElement:
    kind = f[0]
    if kind == "c":
        return GElement.from_polynomial(f[1])
    if kind == "eps":
        return GElement.eps(ctx, f[1])
    return GElement.gen(ctx, f[1])


def _factors_element(ctx: RingContext, fs) -> GElement:
    acc = GElement.from_polynomial(Polynomial.one(ctx))
    for f in fs:
        acc = acc * _factor_element(ctx, f)
    return acc


def _bracket_generators(ctx: RingContext, a, b) -> GElement:
    ka, kb = a[0], b[0]
    if ka == "eps" or kb == "eps":
        return GElement.zero(ctx)
    if ka == "odd" and kb == "odd":
        return GElement.zero(ctx)
    if ka == "odd" and kb == "c":
        return GElement.from_polynomial(b[1].partial(a[1]))
    if ka == "c" and kb == "odd":
        return GElement.from_polynomial(-(a[1].partial(b[1])))
    return GElement.zero(ctx)  # two coefficients


def _bracket_factors(ctx: RingContext, fx: list, fy: list) -> GElement:
    if not fx or not fy:
        return GElement.zero(ctx)
    if len(fy) > 1:
        y1, rest = fy[0], fy[1:]
        dx = _factors_degree(fx)
        left = _bracket_factors(ctx, fx, [y1]) * _factors_element(ctx, rest)
        right = _factor_element(ctx, y1) * _bracket_factors(ctx, fx, rest)
        if ((dx - 1) * _factor_degree(y1)) & 1:
            right = -right
        return left + right
    if len(fx) > 1:
        dx = _factors_degree(fx)
        dy = _factors_degree(fy)
        flipped = _bracket_factors(ctx, fy, fx)
        if ((dx - 1) * (dy - 1)) & 1:
            return flipped
        return -flipped
    return _bracket_generators(ctx, fx[0], fy[0])


def _term_factors(coeff: Polynomial, e: int, mask: int) -> list:
    fs = []
    if not (len(coeff.terms) == 1 and coeff.constant_term() == 1):
        fs.append(("c", coeff))
    if e:
        fs.append(("eps", e))
    for i in bits_of(mask):
        fs.append(("odd", i))
    return fs


def schouten_bracket(x: GElement, y: GElement) -> GElement:
    """The degree -1 bracket fixed by the header convention of this module."""
    if x.ctx != y.ctx:
        raise ContextMismatch("mixed contexts")
    ctx = x.ctx
    acc = GElement.zero(ctx)
    for (e1, m1), c1 in x.terms.items():
        fx = _term_factors(c1, e1, m1)
        for (e2, m2), c2 in y.terms.items():
            fy = _term_factors(c2, e2, m2)
            acc = acc + _bracket_factors(ctx, fx, fy)
    return acc


def ad_f(f: Polynomial, x: GElement) -> GElement:
    """[f, x]: the Koszul differential on polyvector fields."""
    return schouten_bracket(GElement.from_polynomial(f), x)


def g_differential(f: Polynomial, x: GElement) -> GElement:
    """-[f*eps, x]: the inner differential of the graded algebra."""
    feps = GElement.from_polynomial(f) * GElement.eps(f.ctx)
    return -schouten_bracket(feps, x)


def _check_degree_one(w: HSeries, ctx: RingContext) -> None:
    first = w.coeffs[0]
    if not (isinstance(first, GElement) and first.is_zero()):
        raise ValueError("deformation series must vanish at h^0")
    for c in w.coeffs:
        for (e, m) in c.terms:
            if not ((e == 1 and m == 0) or (e == 0 and _popcount(m) == 2)):
                raise ValueError(
                    "series coefficients must lie in A*eps + wedge-degree 2"
                )


def mc_residual(f: Polynomial, w: HSeries) -> HSeries:
    """dw + (1/2)[w, w] for a deformation series w with coefficients p*eps + S."""
    _check_degree_one(w, f.ctx)
    dw = w.map(lambda c: g_differential(f, c))
    ww = w.convolve(w, schouten_bracket)
    return dw + ww.scale(Fraction(1, 2))


def bivector_square(s: GElement) -> GElement:
    """[S, S] of a wedge-degree-2 polyvector; zero iff S is Poisson."""
    if not s.is_polyvector():
        raise ValueError("bivector must be eps-free")
    if not s.wedge_degrees() <= {2}:
        raise ValueError("bivector must be homogeneous of wedge degree 2")
    return schouten_bracket(s, s)
