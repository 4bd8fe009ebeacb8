"""Torus localization of intersection-number series on punctual Hilbert schemes.

A length-n fixed point of the torus action is a tuple of partitions, one
monomial ideal per chart, with sizes summing to n.  Its contribution is a
ratio of products of affine-linear weight factors:

    T    prod(mu-shifted tangent weights) / prod(tangent weights)
    Seg  1 / ( prod(1 + taut weight) * prod(tangent weights) )
    L    prod(taut weight)^2 / prod(tangent weights)

Contributions are kept factored (multisets of affine forms c0 + a*t1 + b*t2)
until after pairwise cancellation, and all limits are taken on exact
univariate data:

* complete surfaces: specialize (t1, t2) -> (z, rho*z) along two deterministic
  generic directions, sum the univariate rational functions, and read off the
  z^0 coefficient (the degree-zero equivariant piece).  Both directions must
  agree; for honest Euler classes the reduced sum must be a constant.
* total spaces of O(a) over the projective line: eliminate the base character
  t1 first (expand each contribution as an exact Laurent series in t1 with
  univariate rational coefficients in the fiber character t2; the strictly
  negative part of the sum must cancel, which is the statement that the
  fiberwise residue exists) and then read off the t2^0 Laurent coefficient.
  A surviving t2-pole in an Euler-class series means the chosen equivariant
  structure admits no non-equivariant limit, and is reported as PoleError.

A Segre-type series is allowed negative t2-powers on a total space: they are
the residues of the below-top graded pieces of the inverse Chern class, which
vanish on complete surfaces but not on open ones.  The reported number is
always the degree-zero coefficient, i.e. the integral of the top graded piece.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from itertools import product

from .exact import GENERIC_DIRECTIONS, LinForm, MPoly, PoleError, RatFunc
from .partitions import (
    Partition,
    enumerate_partitions,
    tangent_weights,
    taut_weights,
    twisted_tangent_weights,
)
from .qseries import QSeries
from .toric import EqLineBundle, ToricSurface

__all__ = [
    "AssignmentKind",
    "LocalizationError",
    "DirectionDisagreementError",
    "fixed_point_tuples",
    "contribution",
    "integrate",
    "series",
    "default_workers",
]

WORKERS_ENV = "HILBLOC_WORKERS"


class AssignmentKind(str, Enum):
    """Which K-theory assignment is integrated: twisted tangent Euler class,
    top Segre class of the tautological bundle, or its squared Euler class."""

    T = "T"
    SEG = "Seg"
    L = "L"


class LocalizationError(Exception):
    pass


class DirectionDisagreementError(LocalizationError):
    """Two generic directions gave different limits: internal inconsistency."""


class _DegenerateDirection(LocalizationError):
    """A direction annihilated a weight factor; retried with the next one."""


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# fixed-point tuples and factored contributions
# --------------------------------------------------------------------------

def fixed_point_tuples(num_charts: int, n: int) -> list[tuple[Partition, ...]]:
    """All tuples of partitions (one per chart) with total size n, in a
    deterministic order."""
    by_size = [enumerate_partitions(k) for k in range(n + 1)]
    out: list[tuple[Partition, ...]] = []

    def rec(chart: int, left: int, prefix: list[Partition]) -> None:
        if chart == num_charts - 1:
            for lam in by_size[left]:
                out.append(tuple(prefix) + (lam,))
            return
        for k in range(left + 1):
            for lam in by_size[k]:
                prefix.append(lam)
                rec(chart + 1, left - k, prefix)
                prefix.pop()

    if num_charts == 0:
        return [()] if n == 0 else []
    rec(0, n, [])
    return out


# an affine factor c0 + a*t1 + b*t2, sign-normalized for multiset cancellation
_Factor = tuple[int, int, int]


def _norm_factor(c0: int, a: int, b: int) -> tuple[_Factor, int]:
    for lead in (a, b, c0):
        if lead:
            if lead < 0:
                return (-c0, -a, -b), -1
            return (c0, a, b), 1
    raise ValueError("zero factor")


class _Contribution:
    """coef * prod(num factors) / prod(den factors), factors sign-normalized."""

    __slots__ = ("coef", "num", "den")

    def __init__(self, coef: Fraction, num: Counter, den: Counter):
        self.coef = coef
        self.num = num
        self.den = den

    @classmethod
    def build(cls, kind, tup, surface, bundle, swap_arm_leg=False):
        """Factored contribution of one fixed-point tuple, or None if the
        Euler-class numerator vanishes."""
        coef = Fraction(1)
        num: Counter = Counter()
        den: Counter = Counter()

        def push(counter, c0, form: LinForm, power=1):
            nonlocal coef
            if c0 == 0 and form.is_zero():
                return False
            fac, sign = _norm_factor(c0, form.a, form.b)
            counter[fac] += power
            if sign < 0 and power % 2:
                coef = -coef
            return True

        for chart, lam in zip(surface.charts, tup):
            if not lam:
                continue
            mu = bundle.weight_at(surface, chart)
            tangent = tangent_weights(lam, chart.w1, chart.w2, swap_arm_leg)
            for w in tangent:
                push(den, 0, w)
            if kind is AssignmentKind.T:
                for w in twisted_tangent_weights(lam, chart.w1, chart.w2, mu, swap_arm_leg):
                    if not push(num, 0, w):
                        return None  # zero weight kills the numerator
            elif kind is AssignmentKind.SEG:
                for tau in taut_weights(lam, chart.w1, chart.w2, mu):
                    push(den, 1, tau)
            elif kind is AssignmentKind.L:
                for tau in taut_weights(lam, chart.w1, chart.w2, mu):
                    if tau.is_zero():
                        return None
                    if not push(num, 0, tau, power=2):
                        return None
            else:
                raise ValueError(f"unknown assignment kind {kind!r}")

        common = num & den
        if common:
            num -= common
            den -= common
        return cls(coef, num, den)


def contribution(kind: AssignmentKind, tup, surface: ToricSurface, bundle: EqLineBundle) -> RatFunc:
    """Fixed-point contribution as a normalized bivariate rational function."""
    if len(tup) != len(surface.charts):
        raise ValueError("tuple length does not match the chart count")
    fac = _Contribution.build(AssignmentKind(kind), tuple(tup), surface, bundle)
    if fac is None:
        return RatFunc.const(2, 0)
    num = MPoly.const(2, fac.coef)
    for (c0, a, b), mult in fac.num.items():
        for _ in range(mult):
            num = num * MPoly.from_linform(LinForm(a, b), c0)
    den = MPoly.const(2, 1)
    for (c0, a, b), mult in fac.den.items():
        for _ in range(mult):
            den = den * MPoly.from_linform(LinForm(a, b), c0)
    return RatFunc(num, den)


# --------------------------------------------------------------------------
# univariate rational functions with factored monic denominators
# --------------------------------------------------------------------------
# value = (num, den): num a coefficient tuple (empty = zero), den a dict
# root -> multiplicity representing prod (z - r)^mult.

_RZERO = ((), {})


def _poly_trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _poly_mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return _poly_trim(out)


def _poly_add(p, q):
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] += b
    return _poly_trim(out)


def _poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_divroot(p, r: Fraction):
    """Exact quotient of p by (z - r); p(r) must be zero."""
    n = len(p) - 1
    out = [Fraction(0)] * n
    out[n - 1] = p[n]
    for i in range(n - 1, 0, -1):
        out[i - 1] = p[i] + r * out[i]
    return _poly_trim(out)


def _den_expand(den: dict) -> tuple:
    out = (Fraction(1),)
    for r, m in den.items():
        factor = (-r, Fraction(1))
        for _ in range(m):
            out = _poly_mul(out, factor)
    return out


def _rat_scale(x, k: Fraction):
    if not k:
        return _RZERO
    num, den = x
    return tuple(c * k for c in num), den


def _rat_add(x, y):
    nx, dx = x
    ny, dy = y
    if not nx:
        return y
    if not ny:
        return x
    union: dict = {}
    for r, m in dx.items():
        union[r] = m
    for r, m in dy.items():
        union[r] = max(union.get(r, 0), m)
    for r, m in union.items():
        ex = m - dx.get(r, 0)
        ey = m - dy.get(r, 0)
        factor = (-r, Fraction(1))
        for _ in range(ex):
            nx = _poly_mul(nx, factor)
        for _ in range(ey):
            ny = _poly_mul(ny, factor)
    n = _poly_add(nx, ny)
    if not n:
        return _RZERO
    return n, union


def _rat_mul(x, y):
    nx, dx = x
    ny, dy = y
    if not nx or not ny:
        return _RZERO
    den = dict(dx)
    for r, m in dy.items():
        den[r] = den.get(r, 0) + m
    return _poly_mul(nx, ny), den


def _rat_reduce(x):
    """Cancel denominator roots that divide the numerator."""
    num, den = x
    if not num:
        return _RZERO
    newden = {}
    for r, m in den.items():
        while m > 0 and _poly_eval(num, r) == 0:
            num = _poly_divroot(num, r)
            m -= 1
        if m:
            newden[r] = m
    return num, newden


def _rat_is_zero(x) -> bool:
    return not _rat_reduce(x)[0]


def _rat_sum(values):
    """Balanced tree fold (keeps common-denominator growth shallow)."""
    items = list(values)
    if not items:
        return _RZERO
    while len(items) > 1:
        items = [
            _rat_add(items[i], items[i + 1]) if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _rat_series_coeff(x, k: int) -> Fraction:
    """Taylor coefficient [z^k] of a rational function regular at 0."""
    num, den = x
    if not num:
        return Fraction(0)
    dpoly = _den_expand(den)
    if dpoly[0] == 0:
        raise ZeroDivisionError("not regular at 0")
    inv0 = 1 / dpoly[0]
    series = []
    for m in range(k + 1):
        acc = num[m] if m < len(num) else Fraction(0)
        for j in range(1, min(m, len(dpoly) - 1) + 1):
            acc -= dpoly[j] * series[m - j]
        series.append(acc * inv0)
    return series[k]


def _rat_constant_term(x) -> tuple[Fraction, int]:
    """Degree-zero Laurent coefficient at z = 0 and the pole order.

    The input is reduced first; returns (coefficient, pole_order) where
    pole_order > 0 signals surviving negative powers."""
    num, den = _rat_reduce(x)
    if not num:
        return Fraction(0), 0
    m0 = den.get(0, 0)
    rest = {r: m for r, m in den.items() if r != 0}
    val = 0
    while val < len(num) and num[val] == 0:
        val += 1
    pole = max(m0 - val, 0)
    # [z^0] of num / (z^m0 * rest) = [z^m0] of num / rest
    coeff = _rat_series_coeff((num, rest), m0)
    return coeff, pole


# --------------------------------------------------------------------------
# complete surfaces: generic-direction specialization
# --------------------------------------------------------------------------

def _specialized_rat(contrib: _Contribution, rho: Fraction):
    """Contribution restricted to (t1, t2) = (z, rho*z), as (num, den)."""
    coef = contrib.coef
    num_roots: Counter = Counter()
    den_roots: Counter = Counter()
    for counter, roots, invert in ((contrib.num, num_roots, False), (contrib.den, den_roots, True)):
        for (c0, a, b), mult in counter.items():
            c = a + b * rho
            if c == 0:
                if c0 == 0:
                    raise _DegenerateDirection(f"direction rho={rho} kills a weight")
                coef = coef / Fraction(c0) ** mult if invert else coef * Fraction(c0) ** mult
            else:
                r = Fraction(-c0, 1) / c
                coef = coef / Fraction(c) ** mult if invert else coef * Fraction(c) ** mult
                roots[r] += mult
    common = num_roots & den_roots
    num_roots -= common
    den_roots -= common
    num = (coef,)
    for r, m in num_roots.items():
        factor = (-r, Fraction(1))
        for _ in range(m):
            num = _poly_mul(num, factor)
    return num, dict(den_roots)


def _finish_complete(total, kind: AssignmentKind) -> Fraction:
    num, den = _rat_reduce(total)
    if not num:
        return Fraction(0)
    if den.get(0, 0):
        raise PoleError("pole at z = 0 on a complete surface (engine inconsistency)")
    if kind in (AssignmentKind.T, AssignmentKind.L):
        if den or len(num) > 1:
            raise LocalizationError(
                "expected a degree-zero class: specialized sum is not constant"
            )
    value, pole = _rat_constant_term((num, den))
    assert pole == 0
    return value


# --------------------------------------------------------------------------
# total spaces: eliminate the base character, then the fiber character
# --------------------------------------------------------------------------

def _base_laurent(contrib: _Contribution) -> dict[int, tuple] | None:
    """Laurent coefficients in t1 (powers <= 0 only) with rational-in-t2
    coefficient data, or None when the contribution vanishes at t1 = 0."""
    val = 0
    scal = Fraction(1)
    num_mixed: list[_Factor] = []
    den_mixed: list[_Factor] = []
    for (c0, a, b), mult in contrib.num.items():
        if c0 == 0 and b == 0:
            val += mult
            scal *= Fraction(a) ** mult
        else:
            num_mixed.extend([(c0, a, b)] * mult)
    for (c0, a, b), mult in contrib.den.items():
        if c0 == 0 and b == 0:
            val -= mult
            scal /= Fraction(a) ** mult
        else:
            den_mixed.extend([(c0, a, b)] * mult)
    if val > 0:
        return None
    depth = -val  # need t1-series of the mixed part up to this order
    series = [_RZERO] * (depth + 1)
    series[0] = ((contrib.coef * scal,), {})

    def mul_series(s, factor_series):
        out = [_RZERO] * (depth + 1)
        for i, si in enumerate(s):
            if not si[0]:
                continue
            for j, fj in enumerate(factor_series):
                if i + j > depth:
                    break
                out[i + j] = _rat_add(out[i + j], _rat_mul(si, fj))
        return out

    for c0, a, b in num_mixed:
        alpha = _poly_trim((Fraction(c0), Fraction(b)))
        fs = [(alpha, {}), ((Fraction(a),), {}) if a else _RZERO]
        series = mul_series(series, fs[: depth + 1])
    for c0, a, b in den_mixed:
        # 1 / (alpha + a*t1), alpha = c0 + b*t2, as a t1-power series
        fs = []
        for k in range(depth + 1):
            sc = Fraction(-a) ** k
            if b == 0:
                fs.append(((sc / Fraction(c0) ** (k + 1),), {}))
            else:
                root = Fraction(-c0, b)
                fs.append(((sc / Fraction(b) ** (k + 1),), {root: k + 1}))
        series = mul_series(series, fs)
    return {val + j: series[j] for j in range(depth + 1)}


def _finish_tot(laurent: dict[int, tuple], kind: AssignmentKind) -> Fraction:
    for k in sorted(laurent):
        if k < 0 and not _rat_is_zero(laurent[k]):
            raise PoleError(
                "pole in the base character: the fiberwise residue does not "
                "exist for this equivariant structure"
            )
    fiber = _rat_reduce(laurent.get(0, _RZERO))
    value, pole = _rat_constant_term(fiber)
    if kind in (AssignmentKind.T, AssignmentKind.L):
        if pole:
            raise PoleError(
                "pole in the fiber character: no non-equivariant limit for "
                "this equivariant structure"
            )
        num, den = fiber
        if num and (den or len(num) > 1):
            raise LocalizationError(
                "expected a degree-zero class: fiberwise residue is not constant"
            )
    return value


# --------------------------------------------------------------------------
# top-level integration
# --------------------------------------------------------------------------

def _chunk_complete(args):
    kind, surface, bundle, chunk, rho, swap = args
    parts = []
    for tup in chunk:
        contrib = _Contribution.build(kind, tup, surface, bundle, swap)
        if contrib is not None:
            parts.append(_specialized_rat(contrib, rho))
    return _rat_sum(parts)


def _chunk_tot(args):
    kind, surface, bundle, chunk, _rho, swap = args
    acc: dict[int, tuple] = {}
    for tup in chunk:
        contrib = _Contribution.build(kind, tup, surface, bundle, swap)
        if contrib is None:
            continue
        lau = _base_laurent(contrib)
        if lau is None:
            continue
        for k, rat in lau.items():
            acc[k] = _rat_add(acc.get(k, _RZERO), rat)
    return acc


def _run_chunks(fn, kind, surface, bundle, tuples, rho, swap, workers):
    if workers <= 1 or len(tuples) < 2 * workers:
        return [fn((kind, surface, bundle, tuples, rho, swap))]
    size = (len(tuples) + workers - 1) // workers
    chunks = [tuples[i : i + size] for i in range(0, len(tuples), size)]
    jobs = [(kind, surface, bundle, c, rho, swap) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def integrate(
    kind,
    surface: ToricSurface,
    bundle: EqLineBundle,
    n: int,
    *,
    workers: int | None = None,
    directions=GENERIC_DIRECTIONS,
    swap_arm_leg: bool = False,
) -> Fraction:
    """Equivariant integral of the degree-n assignment class, as an exact
    rational number (the non-equivariant limit / degree-zero residue)."""
    kind = AssignmentKind(kind)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    workers = default_workers() if workers is None else max(1, workers)
    tuples = fixed_point_tuples(len(surface.charts), n)

    if surface.complete:
        values = []
        for rho in directions:
            try:
                sums = _run_chunks(
                    _chunk_complete, kind, surface, bundle, tuples, Fraction(rho), swap_arm_leg, workers
                )
                values.append(_finish_complete(_rat_sum(sums), kind))
            except _DegenerateDirection:
                continue
            if len(values) == 2:
                break
        if len(values) < 2:
            raise LocalizationError("fewer than two generic directions succeeded")
        if values[0] != values[1]:
            raise DirectionDisagreementError(
                f"directions disagree: {values[0]} != {values[1]}"
            )
        return values[0]

    if surface.fiber_ray is None:
        raise ValueError("quasi-projective surface without a fiberwise direction")
    partial = _run_chunks(
        _chunk_tot, kind, surface, bundle, tuples, None, swap_arm_leg, workers
    )
    laurent: dict[int, tuple] = {}
    for part in partial:
        for k, rat in part.items():
            laurent[k] = _rat_add(laurent.get(k, _RZERO), rat)
    return _finish_tot(laurent, kind)


def series(
    kind,
    surface: ToricSurface,
    bundle: EqLineBundle,
    order: int,
    *,
    workers: int | None = None,
    directions=GENERIC_DIRECTIONS,
    swap_arm_leg: bool = False,
) -> QSeries:
    """Generating series 1 + sum_n q^n integrate(n) truncated at the order."""
    coeffs = [Fraction(1)]
    for n in range(1, order + 1):
        coeffs.append(
            integrate(
                kind,
                surface,
                bundle,
                n,
                workers=workers,
                directions=directions,
                swap_arm_leg=swap_arm_leg,
            )
        )
    return QSeries(coeffs, order)
