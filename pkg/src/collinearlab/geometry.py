"""Level-set geometry of three collinear bodies, plus mutual-distance counting.

Fixing an ordering of three bodies on a line leaves two independent
consecutive distances (a, b); the third distance is a + b.  In these
coordinates the moment of inertia is the positive-definite quadratic form

    I(a, b) = (m1 m2 a^2 + m2 m3 b^2 + m1 m3 (a+b)^2) / M

(masses in slot order along the line) and the potential energy is a sum of
the same three distances, so the sets {I = const} and {U = const} are
explicit plane curves.  {I = c} is an ellipse arc inside the positive
quadrant; scanning U along that arc counts the intersection points of the
two level sets: empty, one point, or two.  A count of one with parallel
gradients is a tangency, which is exactly where the central configuration
of the ordering sits.

For more than three bodies the same counting logic no longer closes (the
number of mutual distances outgrows the collinearity constraints), so only
the counting functions are exposed there: n bodies have n(n-1)/2 mutual
distances and n(n-1)/2 - (n-1) linear relations pinning them to a line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .central_config import CollinearConfiguration
from .model import MassSystem, PotentialSpec

__all__ = [
    "ResolutionError",
    "OrderingPlane",
    "IntersectionResult",
    "count_distances",
    "count_relations",
    "level_values",
    "level_curve_points",
    "intersect_levels",
    "tangency_at_cc",
]

TANGENCY_ANGLE = 1e-6  # radians between level-set gradients
POINT_MERGE_DISTANCE = 1e-8


class ResolutionError(RuntimeError):
    """The scan resolution is too coarse: refining it changes the count."""


def count_distances(n: int) -> int:
    """Number of mutual distances among n bodies: n(n-1)/2."""
    if n < 2:
        raise ValueError("need at least two bodies")
    return n * (n - 1) // 2


def count_relations(n: int) -> int:
    """Number of linear relations confining n bodies to a line.

    Each body beyond the second adds one new consecutive-sum relation per
    earlier pair; the closed form is n(n-1)/2 - (n-1), which leaves exactly
    n - 1 free consecutive distances for a collinear shape.
    """
    if n < 2:
        raise ValueError("need at least two bodies")
    return n * (n - 1) // 2 - (n - 1)


@dataclass(frozen=True)
class OrderingPlane:
    """A point (a, b) of consecutive distances for one ordering of three bodies."""

    ordering: tuple
    a: float
    b: float

    def __post_init__(self):
        if sorted(self.ordering) != [0, 1, 2]:
            raise ValueError("ordering must be a permutation of (0, 1, 2)")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("consecutive distances must be positive")

    @property
    def outer_distance(self) -> float:
        return self.a + self.b


@dataclass(frozen=True)
class IntersectionResult:
    points: tuple  # (a, b) pairs
    count: int
    tangency_flag: bool
    gradient_angle_at_points: tuple

    def __post_init__(self):
        if self.count != len(self.points):
            raise ValueError("count must equal the number of points")


def _slot_masses(masses: MassSystem, ordering):
    ordering = tuple(int(i) for i in ordering)
    if sorted(ordering) != [0, 1, 2]:
        raise ValueError("ordering must be a permutation of (0, 1, 2)")
    m = masses.masses
    return m[ordering[0]], m[ordering[1]], m[ordering[2]]


def level_values(a, b, masses: MassSystem, pot: PotentialSpec, ordering=(0, 1, 2)):
    """(U, I) at consecutive distances (a, b) for the given slot ordering."""
    m1, m2, m3 = _slot_masses(masses, ordering)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("distances must be positive")
    U = (
        m1 * m2 * pot.pair_energy(a)
        + m2 * m3 * pot.pair_energy(b)
        + m1 * m3 * pot.pair_energy(a + b)
    )
    I = (m1 * m2 * a**2 + m2 * m3 * b**2 + m1 * m3 * (a + b) ** 2) / masses.total_mass
    if U.ndim == 0:
        return float(U), float(I)
    return U, I


def _inertia_matrix(masses: MassSystem, ordering) -> np.ndarray:
    m1, m2, m3 = _slot_masses(masses, ordering)
    M = masses.total_mass
    return np.array(
        [[m1 * m2 + m1 * m3, m1 * m3], [m1 * m3, m2 * m3 + m1 * m3]]
    ) / M


def _grad_U(a, b, masses, pot, ordering):
    m1, m2, m3 = _slot_masses(masses, ordering)
    du_outer = m1 * m3 * float(pot.pair_energy_derivative(a + b))
    return np.array(
        [
            m1 * m2 * float(pot.pair_energy_derivative(a)) + du_outer,
            m2 * m3 * float(pot.pair_energy_derivative(b)) + du_outer,
        ]
    )


def _gradient_angle(a, b, masses, pot, ordering) -> float:
    gU = _grad_U(a, b, masses, pot, ordering)
    gI = 2.0 * _inertia_matrix(masses, ordering) @ np.array([a, b])
    cross = abs(gU[0] * gI[1] - gU[1] * gI[0])
    denom = float(np.linalg.norm(gU) * np.linalg.norm(gI))
    if denom == 0.0:
        return math.pi / 2
    return math.asin(min(1.0, cross / denom))


def _curve_arc(c_I, masses, pot, ordering, domain_box, n_phi):
    """The {I = c_I} arc inside the box: (phi, a(phi), b(phi)) sampled densely."""
    A = _inertia_matrix(masses, ordering)
    L = np.linalg.cholesky(A)
    # v(phi) = sqrt(c_I) * L^-T (cos, sin): traces the full ellipse
    Linv_t = np.linalg.inv(L).T
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    w = np.stack([np.cos(phi), np.sin(phi)])
    v = math.sqrt(c_I) * (Linv_t @ w)
    a, b = v[0], v[1]
    (lo_a, hi_a), (lo_b, hi_b) = domain_box
    valid = (a > lo_a) & (a < hi_a) & (b > lo_b) & (b < hi_b)
    if not np.any(valid):
        return None
    # the inside-the-quadrant part of the ellipse is a single arc; rotate the
    # sampling so it is contiguous, then keep it
    if valid[0] and valid[-1] and not np.all(valid):
        start = int(np.argmin(valid))
        order = np.r_[start : len(phi), 0:start]
        phi, a, b, valid = phi[order], a[order], b[order], valid[order]
        phi = np.unwrap(phi)
    idx = np.nonzero(valid)[0]
    return phi[idx], a[idx], b[idx], Linv_t


def _point_of(phi, c_I, Linv_t):
    v = math.sqrt(c_I) * (Linv_t @ np.array([math.cos(phi), math.sin(phi)]))
    return float(v[0]), float(v[1])


def _count_at_resolution(c_U, c_I, masses, pot, ordering, domain_box, n_phi):
    arc = _curve_arc(c_I, masses, pot, ordering, domain_box, n_phi)
    if arc is None:
        return []
    phi, a, b, Linv_t = arc
    U, _ = level_values(a, b, masses, pot, ordering)
    g = np.asarray(U) - c_U

    def g_of(p):
        aa, bb = _point_of(p, c_I, Linv_t)
        u, _ = level_values(aa, bb, masses, pot, ordering)
        return u - c_U

    points = []
    for k in range(len(phi) - 1):
        if g[k] == 0.0:
            points.append(_point_of(phi[k], c_I, Linv_t))
        elif g[k] * g[k + 1] < 0:
            root = brentq(g_of, phi[k], phi[k + 1], xtol=1e-15, rtol=8.9e-16)
            points.append(_point_of(root, c_I, Linv_t))
    if g[-1] == 0.0:
        points.append(_point_of(phi[-1], c_I, Linv_t))

    if not points:
        # a level exactly through the arc's extremum leaves no sign change;
        # polish the maximum of g and accept it as a tangent point if g ~ 0
        k = int(np.argmax(g))
        lo, hi = phi[max(0, k - 1)], phi[min(len(phi) - 1, k + 1)]
        res = minimize_scalar(lambda p: -g_of(p), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        g_max = -float(res.fun)
        if abs(g_max) <= 1e-9 * max(1.0, abs(c_U)):
            points.append(_point_of(float(res.x), c_I, Linv_t))

    merged = []
    for p in points:
        if not any(math.hypot(p[0] - q[0], p[1] - q[1]) <= POINT_MERGE_DISTANCE for q in merged):
            merged.append(p)
    return merged


def _default_box(c_I, masses, pot, ordering, scale=None):
    if scale is None:
        _, unit = level_values(1.0, 1.0, masses, pot, ordering)
        scale = math.sqrt(c_I / unit)
    return ((1e-3 * scale, 1e3 * scale), (1e-3 * scale, 1e3 * scale))


def intersect_levels(
    c_U: float,
    c_I: float,
    masses: MassSystem,
    pot: PotentialSpec,
    ordering=(0, 1, 2),
    domain_box=None,
    resolution: int = 256,
) -> IntersectionResult:
    """Intersection points of {U = c_U} and {I = c_I} on one ordering plane.

    The compact curve {I = c_I} is parameterized by angle and U - c_U is
    scanned for sign changes, which are polished by bisection; a level that
    exactly grazes the curve is recovered by polishing the scan maximum.
    The count is recomputed at twice the resolution and a disagreement
    raises ResolutionError rather than returning an unstable answer.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    if c_I <= 0:
        raise ValueError("c_I must be positive")
    box = domain_box if domain_box is not None else _default_box(c_I, masses, pot, ordering)

    points = _count_at_resolution(c_U, c_I, masses, pot, ordering, box, resolution)
    check = _count_at_resolution(c_U, c_I, masses, pot, ordering, box, 2 * resolution)
    if len(points) != len(check):
        raise ResolutionError(
            f"count changed from {len(points)} to {len(check)} under refinement; "
            f"increase resolution (got {resolution})"
        )

    angles = tuple(_gradient_angle(a, b, masses, pot, ordering) for a, b in points)
    tangent = len(points) == 1 and angles[0] <= TANGENCY_ANGLE
    return IntersectionResult(
        points=tuple(points),
        count=len(points),
        tangency_flag=tangent,
        gradient_angle_at_points=angles,
    )


def level_curve_points(
    c_I: float,
    masses: MassSystem,
    pot: PotentialSpec,
    ordering=(0, 1, 2),
    domain_box=None,
    resolution: int = 256,
) -> np.ndarray:
    """Rows (a, b, U, I) along the {I = c_I} arc, for external plotting."""
    box = domain_box if domain_box is not None else _default_box(c_I, masses, pot, ordering)
    arc = _curve_arc(c_I, masses, pot, ordering, box, resolution)
    if arc is None:
        return np.empty((0, 4))
    _, a, b, _ = arc
    U, I = level_values(a, b, masses, pot, ordering)
    return np.column_stack([a, b, np.asarray(U), np.asarray(I)])


def tangency_at_cc(
    cc: CollinearConfiguration,
    masses: MassSystem,
    pot: PotentialSpec,
    resolution: int = 256,
) -> IntersectionResult:
    """Intersect the level sets at the configuration's own (U, I) values.

    For a solved three-body configuration the intersection must be the
    single point (a, b) = gaps with parallel gradients: the configuration
    is where one level set grazes the other within its ordering plane.
    """
    if masses.n != 3:
        raise ValueError("the ordering-plane picture is three-body only")
    a, b = float(cc.gaps[0]), float(cc.gaps[1])
    c_U, c_I = level_values(a, b, masses, pot, cc.ordering)
    scale = max(a, b)
    box = ((1e-3 * scale, 1e3 * scale), (1e-3 * scale, 1e3 * scale))
    return intersect_levels(c_U, c_I, masses, pot, cc.ordering, box, resolution)
