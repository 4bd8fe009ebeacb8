"""Smooth toric surfaces, torus-fixed charts and equivariant line bundles.

A surface is a fan in Z^2: a cyclically ordered list of primitive rays, with
one fixed chart per retained cone.  Complete surfaces retain every
consecutive pair; the quasi-projective total space of O(a) over the projective
line retains the two cones touching the fiber ray.

Chart conventions (pinned by the classical anchors in the test suite):

* chart coordinate weights are the *negated* dual basis of the cone's ray
  pair, so the n = 1 twisted Euler number on the projective plane with the
  hyperplane bundle comes out to 7 = 3 + 3 + 1;
* an equivariant line bundle is a ray-supported divisor sum(a_i * D_i), and
  its weight on a chart is the unique linear form mu with <mu, v_i> = -a_i on
  the chart's rays (support-function convention).

Equivariant structures on the same underlying bundle differ by a global
character twist; for total spaces the canonical (divisor) structure is
trivialized at infinity, and `zero_section_trivial_lift` produces the twist
with trivial fiberwise weight along the zero section instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

from .exact import LinForm

__all__ = [
    "FixedChart",
    "ToricSurface",
    "EqLineBundle",
    "SurfaceInvariants",
    "projective_plane",
    "p1_x_p1",
    "hirzebruch",
    "blowup_plane",
    "line_bundle_total_space",
    "tot_bundle",
    "zero_section_trivial_lift",
    "bundle_weight_at",
    "intersection_numbers",
    "STANDARD_SURFACES",
]

Ray = tuple[int, int]


def _det(u: Ray, v: Ray) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _dual_pair(u: Ray, v: Ray) -> tuple[tuple[int, int], tuple[int, int]]:
    """Dual basis (m_u, m_v) of a unimodular ray pair: <m_u,u>=1, <m_u,v>=0."""
    d = _det(u, v)
    if abs(d) != 1:
        raise ValueError(f"cone {(u, v)} is not unimodular (det {d})")
    m_u = (v[1] // d, -v[0] // d)
    m_v = (-u[1] // d, u[0] // d)
    return m_u, m_v


@dataclass(frozen=True)
class FixedChart:
    """One torus-fixed point with its two coordinate weights."""

    index: int
    ray_indices: tuple[int, int]
    w1: LinForm
    w2: LinForm


class ToricSurface:
    """Fan data plus derived fixed charts.

    ``fiber_ray`` is set only for quasi-projective total spaces; it marks the
    ray whose divisor is the (compact) zero section, and the t2 character is
    the distinguished fiberwise direction of the limit procedure.
    """

    def __init__(
        self,
        rays: list[Ray],
        cones: list[tuple[int, int]] | None = None,
        complete: bool = True,
        name: str = "toric surface",
        fiber_ray: int | None = None,
    ):
        rays = [tuple(r) for r in rays]
        for r in rays:
            if r == (0, 0) or gcd(r[0], r[1]) != 1:
                raise ValueError(f"ray {r} is not primitive")
        if complete:
            if len(rays) < 3:
                raise ValueError("a complete fan needs at least 3 rays")
            cones = [(i, (i + 1) % len(rays)) for i in range(len(rays))]
            for i, j in cones:
                if _det(rays[i], rays[j]) != 1:
                    raise ValueError(
                        "rays must be primitive, counterclockwise and smooth: "
                        f"det(v{i}, v{j}) != 1"
                    )
        else:
            if cones is None:
                raise ValueError("quasi-projective surfaces need explicit cones")
        self.rays = rays
        self.cones = [tuple(c) for c in cones]
        self.complete = complete
        self.name = name
        self.fiber_ray = fiber_ray
        self.charts = [self._chart(k) for k in range(len(self.cones))]
        if fiber_ray is not None:
            self._check_fiber_direction()

    def _chart(self, k: int) -> FixedChart:
        i, j = self.cones[k]
        m_u, m_v = _dual_pair(self.rays[i], self.rays[j])
        return FixedChart(
            index=k,
            ray_indices=(i, j),
            w1=LinForm(-m_u[0], -m_u[1]),
            w2=LinForm(-m_v[0], -m_v[1]),
        )

    def _check_fiber_direction(self) -> None:
        # the fixed locus of the fiberwise action alone must be the compact
        # zero section: every chart's fiber coordinate has to see t2
        for chart in self.charts:
            pos = chart.ray_indices.index(self.fiber_ray)
            w = (chart.w1, chart.w2)[pos]
            if w.b == 0:
                raise ValueError(
                    "fiberwise character missing from a chart's fiber coordinate"
                )

    def __repr__(self) -> str:
        return f"<{self.name}: rays {self.rays}>"


@dataclass(frozen=True)
class EqLineBundle:
    """Torus-invariant divisor sum(a_i * D_i) with an equivariant structure.

    ``twist`` adds a global character to every chart weight (an alternative
    equivariant structure on the same bundle).  ``chart_overrides`` injects
    per-chart weight shifts that need not glue; it exists purely to
    demonstrate how the limit procedure rejects invalid lifts.
    """

    ray_coeffs: tuple[int, ...]
    twist: LinForm = LinForm(0, 0)
    chart_overrides: tuple[tuple[int, LinForm], ...] = ()

    def weight_at(self, surface: ToricSurface, chart: FixedChart) -> LinForm:
        i, j = chart.ray_indices
        a_i, a_j = self.ray_coeffs[i], self.ray_coeffs[j]
        m_u, m_v = _dual_pair(surface.rays[i], surface.rays[j])
        mu = LinForm(-a_i * m_u[0] - a_j * m_v[0], -a_i * m_u[1] - a_j * m_v[1])
        mu = mu + self.twist
        for idx, extra in self.chart_overrides:
            if idx == chart.index:
                mu = mu + extra
        return mu

    def with_twist(self, twist: LinForm) -> "EqLineBundle":
        return replace(self, twist=self.twist + twist)

    def with_chart_override(self, chart_index: int, extra: LinForm) -> "EqLineBundle":
        return replace(
            self, chart_overrides=self.chart_overrides + ((chart_index, extra),)
        )


def bundle_weight_at(surface: ToricSurface, bundle: EqLineBundle, chart: FixedChart) -> LinForm:
    return bundle.weight_at(surface, chart)


@dataclass(frozen=True)
class SurfaceInvariants:
    """Classical intersection numbers feeding the closed-form exponents."""

    m2: Fraction
    mk: Fraction
    k2: Fraction
    e: Fraction
    c2: Fraction | None = None
    mc: Fraction | None = None
    ec: Fraction | None = None

    def absolute_vector(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.m2, self.mk, self.e)

    def relative_vector(self) -> tuple[Fraction, Fraction]:
        if self.c2 is None or self.mc is None:
            raise ValueError("no relative divisor data")
        return (self.c2, self.mc)


# --------------------------------------------------------------------------
# intersection numbers from the fan
# --------------------------------------------------------------------------

def _self_intersections(surface: ToricSurface) -> list[int]:
    """D_i^2 from the smooth-fan relation v_{i-1} + v_{i+1} = -D_i^2 * v_i."""
    rays = surface.rays
    n = len(rays)
    out = []
    for i in range(n):
        prev = rays[(i - 1) % n]
        nxt = rays[(i + 1) % n]
        v = rays[i]
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        if v[0] != 0:
            b, r = divmod(s[0], v[0])
        else:
            b, r = divmod(s[1], v[1])
        if r != 0 or (s[0] != b * v[0] or s[1] != b * v[1]):
            raise ValueError("malformed fan: broken wall relation")
        out.append(-b)
    return out


def intersection_numbers(
    surface: ToricSurface,
    bundle: EqLineBundle,
    relative_ray: int | None = None,
) -> SurfaceInvariants:
    """M^2, M.K, K^2, e from the fan; optionally C^2, M.C, e(C) for an
    invariant rational curve C = D_k."""
    if not surface.complete:
        raise ValueError("absolute invariants need a complete surface")
    rays = surface.rays
    n = len(rays)
    a = bundle.ray_coeffs
    if len(a) != n:
        raise ValueError("bundle ray coefficients do not match the fan")
    selfints = _self_intersections(surface)

    def dot_with_divisors(coeffs) -> list[Fraction]:
        # (sum coeffs_i D_i) . D_j for each j
        return [
            Fraction(coeffs[(j - 1) % n] + coeffs[j] * selfints[j] + coeffs[(j + 1) % n])
            for j in range(n)
        ]

    m_dot = dot_with_divisors(a)
    m2 = sum(Fraction(a[j]) * m_dot[j] for j in range(n))
    # K = -sum(D_i)
    mk = -sum(m_dot)
    k2 = Fraction(sum(selfints) + 2 * n)
    inv = dict(m2=m2, mk=mk, k2=k2, e=Fraction(n))
    if relative_ray is not None:
        k = relative_ray
        inv["c2"] = Fraction(selfints[k])
        inv["mc"] = m_dot[k]
        inv["ec"] = Fraction(2)
    return SurfaceInvariants(**inv)


# --------------------------------------------------------------------------
# standard surfaces
# --------------------------------------------------------------------------

def projective_plane() -> ToricSurface:
    return ToricSurface([(1, 0), (0, 1), (-1, -1)], name="P2")


def p1_x_p1() -> ToricSurface:
    return ToricSurface([(1, 0), (0, 1), (-1, 0), (0, -1)], name="P1xP1")


def hirzebruch(a: int) -> ToricSurface:
    """Projectivization of O + O(-a) over the projective line; ray 3 is the
    +a section, ray 1 the -a section, rays 0 and 2 fibers."""
    if a < 0:
        raise ValueError("hirzebruch twist must be >= 0")
    return ToricSurface(
        [(1, 0), (0, 1), (-1, a), (0, -1)], name=f"Hirzebruch({a})"
    )


def blowup_plane(k: int) -> ToricSurface:
    """Blowup of the plane in k <= 3 torus-fixed points (e = 3 + k)."""
    extra = {1: [(1, 1)], 2: [(1, 1), (-1, 0)], 3: [(1, 1), (-1, 0), (0, -1)]}
    if k not in extra:
        raise ValueError("only 1 <= k <= 3 fixed-point blowups are provided")
    rays = [(1, 0), (1, 1), (0, 1)]
    if k >= 2:
        rays.append((-1, 0))
    rays.append((-1, -1))
    if k >= 3:
        rays.append((0, -1))
    return ToricSurface(rays, name=f"Bl{k}P2")


STANDARD_SURFACES = {
    "p2": projective_plane,
    "p1xp1": p1_x_p1,
    "hirzebruch": hirzebruch,
    "bl2p2": lambda: blowup_plane(2),
    "bl3p2": lambda: blowup_plane(3),
}


# --------------------------------------------------------------------------
# total spaces of line bundles over the projective line
# --------------------------------------------------------------------------

def tot_surface(a: int) -> ToricSurface:
    """Total space of O(a) over the projective line as a two-chart fan.

    Ray 1 carries the zero section (self-intersection a); the fiberwise
    scaling is the t2 character, so the fiber coordinate weights of the two
    charts differ by a times the base weight.
    """
    return ToricSurface(
        [(1, 0), (0, 1), (-1, -a)],
        cones=[(0, 1), (1, 2)],
        complete=False,
        name=f"Tot(O({a}))",
        fiber_ray=1,
    )


def line_bundle_total_space(a: int, d: int) -> tuple[ToricSurface, EqLineBundle]:
    """Total space of O(a) with the pullback of a degree-d bundle on the base.

    The equivariant structure is the canonical one, which for a pulled-back
    bundle has trivial fiberwise weight along the zero section (both natural
    lifts coincide when the bundle is a pullback).
    """
    surface = tot_surface(a)
    return surface, EqLineBundle((d, 0, 0))


def tot_bundle(a: int, section_coeff: int, fiber_coeff: int) -> tuple[ToricSurface, EqLineBundle]:
    """Bundle section_coeff * C0 + fiber_coeff * f on Tot(O(a)), canonical
    structure (trivialized at infinity).  M.f = section_coeff and
    M.C0 = section_coeff * a + fiber_coeff."""
    surface = tot_surface(a)
    return surface, EqLineBundle((fiber_coeff, section_coeff, 0))


def zero_section_trivial_lift(surface: ToricSurface, bundle: EqLineBundle) -> EqLineBundle:
    """Retwist so the fiberwise weight along the zero section vanishes."""
    if surface.fiber_ray is None:
        raise ValueError("zero-section lift only applies to total spaces")
    fibre_components = {
        bundle.weight_at(surface, chart).b for chart in surface.charts
    }
    if len(fibre_components) != 1:
        raise ValueError("bundle weights do not glue; no global retwist exists")
    (b,) = fibre_components
    return bundle.with_twist(LinForm(0, -b))
