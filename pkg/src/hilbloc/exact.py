"""Exact arithmetic in the torus characters.

Everything downstream is built on three layers:

* scalars are ``fractions.Fraction`` (arbitrary precision, always reduced,
  positive denominator);
* ``LinForm`` is an integer linear form ``a*t1 + b*t2`` in the two torus
  characters, the currency of fixed-point weights;
* ``MPoly`` / ``RatFunc`` are sparse multivariate polynomials and canonically
  normalized rational functions, used to express fixed-point contributions
  before any limit is taken.

The normalization contract for ``RatFunc`` is: numerator and denominator are
coprime, the denominator is integer-primitive with positive leading
coefficient in graded lexicographic order (t1 > t2), and all leftover scalar
content sits in the numerator.  Under this contract equal rational functions
have equal representations, so ``x - x`` reduces to literal zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as _igcd

__all__ = [
    "Fraction",
    "LinForm",
    "MPoly",
    "RatFunc",
    "PoleError",
    "rf_specialize",
    "rf_value_at_zero",
    "GENERIC_DIRECTIONS",
]

#: Deterministic generic directions for specializing (t1, t2) -> (z, rho*z).
#: Tried in order; a direction is discarded if it kills a denominator factor.
GENERIC_DIRECTIONS = (Fraction(2), Fraction(3, 2), Fraction(5, 3), Fraction(7, 2))


class PoleError(ArithmeticError):
    """A requested value at z = 0 does not exist (non-equivariant limit fails)."""


@dataclass(frozen=True)
class LinForm:
    """Integer linear form ``a*t1 + b*t2`` in the torus characters."""

    a: int = 0
    b: int = 0

    def __add__(self, other: "LinForm") -> "LinForm":
        return LinForm(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "LinForm") -> "LinForm":
        return LinForm(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "LinForm":
        return LinForm(-self.a, -self.b)

    def __rmul__(self, k: int) -> "LinForm":
        return LinForm(k * self.a, k * self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for coef, name in ((self.a, "t1"), (self.b, "t2")):
            if coef == 0:
                continue
            sign = "-" if coef < 0 else ("+" if parts else "")
            mag = abs(coef)
            parts.append(f"{sign}{'' if mag == 1 else mag}{name}")
        return "".join(parts)


LinForm.T1 = LinForm(1, 0)
LinForm.T2 = LinForm(0, 1)


# --------------------------------------------------------------------------
# sparse multivariate polynomials
# --------------------------------------------------------------------------

def _grlex_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), exp)


class MPoly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients.

    Zero coefficients are never stored; exponents are componentwise >= 0.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exp, coef in terms.items():
                coef = Fraction(coef)
                if coef:
                    if len(exp) != nvars or any(e < 0 for e in exp):
                        raise ValueError(f"bad exponent {exp} for nvars={nvars}")
                    clean[tuple(exp)] = coef
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, value) -> "MPoly":
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MPoly":
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def from_linform(cls, form: LinForm, constant=0) -> "MPoly":
        """Bivariate polynomial ``constant + a*t1 + b*t2``."""
        terms = {}
        if constant:
            terms[(0, 0)] = Fraction(constant)
        if form.a:
            terms[(1, 0)] = Fraction(form.a)
        if form.b:
            terms[(0, 1)] = Fraction(form.b)
        return cls(2, terms)

    # -- ring operations ---------------------------------------------------
    def _require_same(self, other: "MPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError("mixed variable counts")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._require_same(other)
        out = dict(self.terms)
        for exp, coef in other.terms.items():
            s = out.get(exp, Fraction(0)) + coef
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        res = MPoly(self.nvars)
        res.terms = out
        return res

    def __neg__(self) -> "MPoly":
        res = MPoly(self.nvars)
        res.terms = {e: -c for e, c in self.terms.items()}
        return res

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other: "MPoly") -> "MPoly":
        self._require_same(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(exp, Fraction(0)) + c1 * c2
                if s:
                    out[exp] = s
                else:
                    out.pop(exp, None)
        res = MPoly(self.nvars)
        res.terms = out
        return res

    def scale(self, k) -> "MPoly":
        k = Fraction(k)
        res = MPoly(self.nvars)
        if k:
            res.terms = {e: c * k for e, c in self.terms.items()}
        return res

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (exponent, coefficient) under grlex with t1 > t2."""
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = ["z"] if self.nvars == 1 else [f"t{i+1}" for i in range(self.nvars)]
        bits = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            coef = self.terms[exp]
            mono = "*".join(
                f"{names[i]}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exp) if e
            )
            bits.append(f"{coef}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits).replace("+ -", "- ")

    # -- content and primitive part ----------------------------------------
    def rational_content(self) -> Fraction:
        """Positive rational c with self = c * (integer-primitive polynomial)."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = _igcd(num, c.numerator)
            den = den * c.denominator // _igcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "MPoly"]:
        if self.is_zero():
            return Fraction(0), self
        c = self.rational_content()
        return c, self.scale(1 / c)

    # -- exact division ----------------------------------------------------
    def exact_div(self, divisor: "MPoly") -> "MPoly":
        """Exact polynomial quotient; raises ValueError if not divisible."""
        self._require_same(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = MPoly(self.nvars)
        rem.terms = dict(self.terms)
        out: dict[tuple[int, ...], Fraction] = {}
        dexp, dcoef = divisor.leading()
        while rem.terms:
            rexp, rcoef = rem.leading()
            qexp = tuple(r - d for r, d in zip(rexp, dexp))
            if any(e < 0 for e in qexp):
                raise ValueError("not exactly divisible")
            qcoef = rcoef / dcoef
            out[qexp] = out.get(qexp, Fraction(0)) + qcoef
            q = MPoly(self.nvars, {qexp: qcoef})
            rem = rem - q * divisor
        res = MPoly(self.nvars)
        res.terms = {e: c for e, c in out.items() if c}
        return res

    # -- substitution ------------------------------------------------------
    def specialize_ray(self, rho: Fraction) -> "MPoly":
        """Substitute t1 <- z, t2 <- rho*z (bivariate only): univariate in z."""
        if self.nvars != 2:
            raise ValueError("ray specialization expects a bivariate polynomial")
        out: dict[tuple[int], Fraction] = {}
        for (i, j), coef in self.terms.items():
            c = coef * rho ** j
            exp = (i + j,)
            s = out.get(exp, Fraction(0)) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        res = MPoly(1)
        res.terms = out
        return res

    def eval_univariate(self, value: Fraction) -> Fraction:
        if self.nvars != 1:
            raise ValueError("univariate evaluation only")
        return sum((c * value ** e[0] for e, c in self.terms.items()), Fraction(0))


# --------------------------------------------------------------------------
# polynomial gcd (univariate Euclid + primitive PRS in the first variable)
# --------------------------------------------------------------------------

def _gcd_univariate(p: MPoly, q: MPoly) -> MPoly:
    a, b = p, q
    while not b.is_zero():
        ld = b.leading()[1]
        bb = b.scale(1 / ld)
        # remainder of a by monic bb
        rem = MPoly(a.nvars)
        rem.terms = dict(a.terms)
        ddeg = bb.total_degree()
        while rem.terms and rem.total_degree() >= ddeg:
            rexp, rcoef = rem.leading()
            shift = rexp[0] - ddeg
            q1 = MPoly(a.nvars, {(shift,): rcoef})
            rem = rem - q1 * bb
        a, b = b, rem
    if a.is_zero():
        return a
    return a.primitive()[1]


def _coeffs_in_main(p: MPoly) -> dict[int, MPoly]:
    """Collect the t1-degree slices of a bivariate polynomial (as t2-polys)."""
    slices: dict[int, MPoly] = {}
    for (i, j), coef in p.terms.items():
        sl = slices.setdefault(i, MPoly(1))
        sl.terms[(j,)] = coef
    return slices

def _from_main_coeffs(slices: dict[int, MPoly]) -> MPoly:
    res = MPoly(2)
    for i, sl in slices.items():
        for (j,), coef in sl.terms.items():
            res.terms[(i, j)] = coef
    return res

def _content_main(p: MPoly) -> MPoly:
    """gcd of the t1-coefficient polynomials (a polynomial in t2)."""
    g = MPoly(1)
    for sl in _coeffs_in_main(p).values():
        g = _gcd_univariate(g, sl) if not g.is_zero() else sl.primitive()[1]
        if g.total_degree() == 0 and not g.is_zero():
            break
    return g if not g.is_zero() else MPoly(1)

def _lift_t2(p1: MPoly) -> MPoly:
    return MPoly(2, {(0, e[0]): c for e, c in p1.terms.items()})

def _pseudo_rem_main(p: MPoly, q: MPoly) -> MPoly:
    """Pseudo-remainder of p by q with respect to t1."""
    dq = q.degree_in(0)
    lq = _lift_t2(_coeffs_in_main(q)[dq])
    rem = p
    while not rem.is_zero() and rem.degree_in(0) >= dq:
        dr = rem.degree_in(0)
        lr = _lift_t2(_coeffs_in_main(rem)[dr])
        shift = MPoly(2, {(dr - dq, 0): Fraction(1)})
        rem = rem * lq - q * lr * shift
    return rem


def mpoly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """Primitive gcd; supports one and two variables (all this engine needs)."""
    if p.is_zero():
        return q.primitive()[1] if not q.is_zero() else q
    if q.is_zero():
        return p.primitive()[1]
    if p.nvars != q.nvars:
        raise ValueError("mixed variable counts")
    if p.nvars == 1:
        return _gcd_univariate(p, q)
    if p.nvars != 2:
        raise NotImplementedError("gcd implemented for <= 2 variables")
    cp, cq = _content_main(p), _content_main(q)
    a = p.exact_div(_lift_t2(cp))
    b = q.exact_div(_lift_t2(cq))
    if a.degree_in(0) < b.degree_in(0):
        a, b = b, a
    while not b.is_zero():
        r = _pseudo_rem_main(a, b)
        if not r.is_zero():
            r = r.exact_div(_lift_t2(_content_main(r)))
            r = r.primitive()[1]
        a, b = b, r
    a = a.exact_div(_lift_t2(_content_main(a))).primitive()[1]
    cont = _gcd_univariate(cp, cq)
    return (a * _lift_t2(cont)).primitive()[1]


# --------------------------------------------------------------------------
# canonically normalized rational functions
# --------------------------------------------------------------------------

class RatFunc:
    """Quotient of polynomials, always kept in canonical normalized form."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = MPoly.zero(num.nvars)
            self.den = MPoly.const(num.nvars, 1)
            return
        cn, pn = num.primitive()
        cd, pd = den.primitive()
        g = mpoly_gcd(pn, pd)
        if g.total_degree() > 0 or g.leading()[1] != 1:
            pn = pn.exact_div(g)
            pd = pd.exact_div(g)
        scalar = cn / cd
        lead = pd.leading()[1]
        if lead < 0:
            pd = pd.scale(-1)
            scalar = -scalar
        # re-primitivize after gcd division (quotients of primitives stay
        # integral here, but keep the invariant airtight)
        c2, pd = pd.primitive()
        self.num = pn.scale(scalar / c2)
        self.den = pd

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_poly(cls, p: MPoly) -> "RatFunc":
        return cls(p, MPoly.const(p.nvars, 1))

    @classmethod
    def const(cls, nvars: int, value) -> "RatFunc":
        return cls(MPoly.const(nvars, value), MPoly.const(nvars, 1))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.total_degree() == 0 and self.den.total_degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return self.num.leading()[1] / self.den.leading()[1]

    # -- field operations ---------------------------------------------------
    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den == MPoly.const(self.nvars, 1):
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def rf_specialize(x: RatFunc, rho: Fraction) -> RatFunc:
    """Substitute t1 <- z, t2 <- rho*z, returning a univariate rational function.

    Raises PoleError if the denominator dies identically (rho is non-generic
    for this function; the caller retries with another direction).
    """
    rho = Fraction(rho)
    den = x.den.specialize_ray(rho)
    if den.is_zero():
        raise PoleError(f"direction rho={rho} annihilates the denominator")
    return RatFunc(x.num.specialize_ray(rho), den)


def rf_value_at_zero(x: RatFunc) -> Fraction:
    """Value at z = 0 of a univariate rational function, after cancelling
    common powers of z.  Raises PoleError when a genuine pole remains."""
    if x.nvars != 1:
        raise ValueError("value at zero expects a univariate function")
    if x.is_zero():
        return Fraction(0)
    vnum = min(e[0] for e in x.num.terms)
    vden = min(e[0] for e in x.den.terms)
    if vnum < vden:
        raise PoleError("pole at z = 0: no non-equivariant limit")
    num0 = x.num.terms.get((vden,), Fraction(0)) if vnum == vden else Fraction(0)
    den0 = x.den.terms.get((vden,), Fraction(0))
    return num0 / den0
