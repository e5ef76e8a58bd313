"""Collinear central configurations: residuals, solving, enumeration.

A collinear arrangement with ordering o and gaps g is a central
configuration when the line coordinates x (barycentric) satisfy

    dU/dx_i = 2 * lam * m_i * x_i          for every body i,

for a single multiplier lam > 0.  The factor 2 comes from writing the
right-hand side as a multiple of the gradient of I = sum m_i x_i^2, whose
mass-weighted gradient is 2x; with this bookkeeping the circular relative
equilibrium built on the configuration rotates at angular velocity
omega = sqrt(2 * lam).  Two checkpoints worth remembering:

    two bodies, total mass M, gap d, Newtonian:     lam = G M / (2 d^3)
    equal masses (1,1,1), gaps (1,1), Newtonian:    lam = 5/8

Because the first n-1 residual components determine the last one (the
gradient rows sum to zero and the positions are barycentric by
construction), the residual is reported in gap coordinates: n-1 numbers,
each the mismatch in the relative acceleration of one adjacent pair.

The solver is a damped Newton iteration on (gaps, lam) with a backtracking
line search and a positivity safeguard, falling back to bisection on the
one remaining gap ratio for three bodies.  For quasi-homogeneous potentials
the shape can depend on the overall size and several solutions may coexist;
a bracket scan over a logarithmic grid collects every root it can find and
any beyond the first are attached to the returned configuration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import MassSystem, PotentialSpec

__all__ = [
    "SolverFailureError",
    "CollinearConfiguration",
    "line_positions",
    "cc_residual",
    "shape_residual",
    "solve_collinear",
    "enumerate_collinear",
    "refine_collinear_mp",
    "ScaleProbeResult",
    "scale_dependence_probe",
]

RESIDUAL_TOL = 1e-10  # relative residual required of any returned solution


class SolverFailureError(RuntimeError):
    """The central-configuration solver did not converge."""

    def __init__(self, ordering, last_residual: float, detail: str = ""):
        self.ordering = tuple(ordering)
        self.last_residual = last_residual
        msg = (
            f"no central configuration found for ordering {self.ordering} "
            f"(last residual {last_residual:.3e})"
        )
        super().__init__(msg + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class CollinearConfiguration:
    """One ordering of the bodies on a line with solved gaps and multiplier.

    ordering lists body indices left to right; gaps are the consecutive
    distances.  extra_roots carries further solutions found at other sizes
    for quasi-homogeneous potentials (empty in the homogeneous case).
    """

    ordering: tuple
    gaps: np.ndarray
    lam: float
    residual_norm: float
    extra_roots: tuple = field(default=(), compare=False)

    def __post_init__(self):
        g = np.asarray(self.gaps, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gaps", g)
        object.__setattr__(self, "ordering", tuple(int(i) for i in self.ordering))
        if not np.all(g > 0):
            raise ValueError("all gaps must be strictly positive")

    @property
    def multiroot(self) -> bool:
        return len(self.extra_roots) > 0

    def gap_ratios(self) -> np.ndarray:
        """Gaps normalized by the first gap (the size-free shape)."""
        return self.gaps / self.gaps[0]


def line_positions(ordering, gaps, masses: MassSystem) -> np.ndarray:
    """Barycentric line coordinate of every body (indexed by body, not slot)."""
    ordering = tuple(ordering)
    n = masses.n
    if sorted(ordering) != list(range(n)):
        raise ValueError(f"ordering must be a permutation of 0..{n - 1}")
    gaps = np.asarray(gaps, dtype=float)
    if gaps.shape != (n - 1,) or not np.all(gaps > 0):
        raise ValueError("need n-1 strictly positive gaps")
    slots = np.concatenate([[0.0], np.cumsum(gaps)])
    x = np.empty(n)
    x[list(ordering)] = slots
    m = masses.masses
    return x - (m @ x) / masses.total_mass


def _line_gradient(x: np.ndarray, masses: MassSystem, pot: PotentialSpec) -> np.ndarray:
    """dU/dx_i for bodies at line coordinates x (distinct)."""
    m = masses.masses
    diff = x[:, None] - x[None, :]
    dist = np.abs(diff)
    np.fill_diagonal(dist, 1.0)
    dudr = pot.pair_energy_derivative(dist) * (m[:, None] * m[None, :])
    np.fill_diagonal(dudr, 0.0)
    return np.sum(dudr * np.sign(diff), axis=1)


def _gap_residual(ordering, gaps, lam, masses, pot):
    """Residual in gap coordinates plus the acceleration scale for normalizing."""
    x = line_positions(ordering, gaps, masses)
    grad = _line_gradient(x, masses, pot)
    g_over_m = grad / masses.masses  # mass-weighted gradient component
    idx = list(ordering)
    d = np.diff(g_over_m[idx]) - 2.0 * lam * np.asarray(gaps, dtype=float)
    accel_scale = float(np.max(np.abs(g_over_m)))
    defect = float(abs(masses.masses @ x) / (masses.total_mass * np.max(np.abs(x))))
    return d, accel_scale, defect, x, grad


def cc_residual(config: CollinearConfiguration, masses: MassSystem, pot: PotentialSpec):
    """Gap-coordinate residual of the central-configuration equations.

    Returns (residuals, barycentric_defect): n-1 numbers that vanish exactly
    when the configuration satisfies the equations with its multiplier, and
    the (roundoff-level) relative barycenter offset of the derived positions.
    """
    d, _, defect, _, _ = _gap_residual(config.ordering, config.gaps, config.lam, masses, pot)
    return d, defect


def _project_lambda(x, grad, masses) -> float:
    """Best-fit multiplier: contract the equations with the position vector."""
    inertia = float(np.sum(masses.masses * x * x))
    return float(np.sum(x * grad) / (2.0 * inertia))


def shape_residual(masses: MassSystem, ordering, gaps, pot: PotentialSpec) -> float:
    """Size-free misfit of a trial shape, with the multiplier projected out.

    Zero (to roundoff) exactly on central configurations; O(1) for generic
    shapes.  Used to reject control shapes that accidentally solve the
    equations.
    """
    x = line_positions(ordering, gaps, masses)
    grad = _line_gradient(x, masses, pot)
    lam = _project_lambda(x, grad, masses)
    d, accel_scale, _, _, _ = _gap_residual(ordering, gaps, lam, masses, pot)
    return float(np.max(np.abs(d)) / accel_scale)


def _inertia_of_gaps(ordering, gaps, masses) -> float:
    x = line_positions(ordering, gaps, masses)
    return float(np.sum(masses.masses * x * x))


def _normalize(normalization):
    if isinstance(normalization, str):
        normalization = (normalization, 1.0)
    kind, value = normalization
    if kind not in ("first_gap", "inertia"):
        raise ValueError("normalization kind must be 'first_gap' or 'inertia'")
    value = float(value)
    if value <= 0:
        raise ValueError("normalization value must be positive")
    return kind, value


def _newton_solve(masses, ordering, pot, kind, value, start_gaps, max_iter=80):
    """Damped Newton on (gaps, lam) with the normalization as the last equation.

    Returns (gaps, lam, rel_residual) or None when the iteration stalls.
    """
    n = masses.n
    gaps = np.asarray(start_gaps, dtype=float).copy()
    x = line_positions(ordering, gaps, masses)
    grad = _line_gradient(x, masses, pot)
    lam = _project_lambda(x, grad, masses)

    def full_residual(z):
        g, la = z[:-1], z[-1]
        d, accel_scale, _, _, _ = _gap_residual(ordering, g, la, masses, pot)
        if kind == "first_gap":
            norm_eq = g[0] - value
        else:
            norm_eq = _inertia_of_gaps(ordering, g, masses) - value
        return np.concatenate([d, [norm_eq]]), accel_scale

    z = np.concatenate([gaps, [lam]])
    f, scale = full_residual(z)
    best = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if best < 1e-14 * max(scale, 1.0):
            break
        jac = np.empty((n, n))
        for j in range(n):
            h = 1e-7 * max(abs(z[j]), 1e-3)
            zp = z.copy()
            zp[j] += h
            fp, _ = full_residual(zp)
            jac[:, j] = (fp - f) / h
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        # keep every gap strictly positive (fraction-to-boundary rule)
        alpha = 1.0
        neg = step[:-1] < 0
        if np.any(neg):
            alpha = min(1.0, float(np.min(-0.9 * z[:-1][neg] / step[:-1][neg])))
        norm0 = float(np.linalg.norm(f))
        improved = False
        while alpha > 1e-6:
            z_try = z + alpha * step
            if np.all(z_try[:-1] > 0):
                f_try, scale = full_residual(z_try)
                if float(np.linalg.norm(f_try)) < (1.0 - 1e-4 * alpha) * norm0:
                    z, f = z_try, f_try
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            return None
        best = float(np.max(np.abs(f)))
    d, accel_scale, _, _, _ = _gap_residual(ordering, z[:-1], z[-1], masses, pot)
    rel = float(np.max(np.abs(d)) / accel_scale)
    if rel > RESIDUAL_TOL:
        return None
    return z[:-1].copy(), float(z[-1]), rel


def _ratio_scan_roots(masses, ordering, pot, kind, value, n_scan=64):
    """All gap-ratio roots for three bodies, found by bracketing on a log grid.

    Parameterizes the shape by rho = g2/g1; the normalization pins the size
    for either kind, and the multiplier is taken from the first gap
    equation, leaving a single scalar equation for rho.
    """

    def gaps_of(rho):
        if kind == "first_gap":
            g1 = value
        else:
            unit = _inertia_of_gaps(ordering, np.array([1.0, rho]), masses)
            g1 = math.sqrt(value / unit)
        return np.array([g1, rho * g1])

    def phi(rho):
        gaps = gaps_of(rho)
        x = line_positions(ordering, gaps, masses)
        grad = _line_gradient(x, masses, pot)
        g_over_m = grad / masses.masses
        idx = list(ordering)
        dg = np.diff(g_over_m[idx])
        lam = dg[0] / (2.0 * gaps[0])
        return dg[1] - 2.0 * lam * gaps[1], lam

    rhos = np.logspace(-2, 2, n_scan + 1)
    vals = np.array([phi(r)[0] for r in rhos])
    roots = []
    for a, b, fa, fb in zip(rhos[:-1], rhos[1:], vals[:-1], vals[1:]):
        if not (np.isfinite(fa) and np.isfinite(fb)) or fa * fb > 0:
            continue
        rho = brentq(lambda r: phi(r)[0], a, b, xtol=1e-15, rtol=8.9e-16)
        gaps = gaps_of(rho)
        _, lam = phi(rho)
        rel = shape_residual(masses, ordering, gaps, pot)
        if rel <= RESIDUAL_TOL and lam > 0:
            roots.append((gaps, lam, rel))
    # merge duplicates from adjacent brackets
    merged = []
    for g, lam, rel in roots:
        if not any(np.allclose(g, g0, rtol=1e-8) for g0, _, _ in merged):
            merged.append((g, lam, rel))
    return merged


def _two_body_solution(masses, ordering, pot, kind, value):
    m = masses.masses
    if kind == "first_gap":
        gap = value
    else:
        gap = math.sqrt(value * masses.total_mass / (m[0] * m[1]))
    x = line_positions(ordering, [gap], masses)
    grad = _line_gradient(x, masses, pot)
    lam = _project_lambda(x, grad, masses)
    if lam <= 0:
        raise SolverFailureError(ordering, 0.0, "multiplier is not positive at this size")
    return CollinearConfiguration(tuple(ordering), np.array([gap]), lam, 0.0)


def solve_collinear(
    masses: MassSystem,
    ordering,
    pot: PotentialSpec,
    normalization="first_gap",
    newton_start=None,
    scan_points: int = 64,
) -> CollinearConfiguration:
    """Solve the central-configuration equations for one ordering.

    normalization is "first_gap" or "inertia", or a (kind, value) pair;
    the default fixes the first gap to 1.  newton_start optionally seeds
    the iteration with explicit gaps (used by the uniqueness stress tests).
    For quasi-homogeneous potentials any further roots found by the bracket
    scan are attached as extra_roots.
    """
    kind, value = _normalize(normalization)
    ordering = tuple(int(i) for i in ordering)
    if not pot.has_attracting_term:
        raise SolverFailureError(ordering, math.inf, "potential has no attracting term")
    n = masses.n
    if sorted(ordering) != list(range(n)):
        raise ValueError(f"ordering must be a permutation of 0..{n - 1}")

    if n == 2:
        return _two_body_solution(masses, ordering, pot, kind, value)

    if newton_start is None:
        if kind == "first_gap":
            start = np.full(n - 1, value)
        else:
            unit = _inertia_of_gaps(ordering, np.ones(n - 1), masses)
            start = np.full(n - 1, math.sqrt(value / unit))
    else:
        start = np.asarray(newton_start, dtype=float)
        if start.shape != (n - 1,) or not np.all(start > 0):
            raise ValueError("newton_start must be n-1 positive gaps")

    solution = _newton_solve(masses, ordering, pot, kind, value, start)
    if solution is None and newton_start is not None:
        # a wild start stalled; retry from the neutral equal-gap shape
        solution = solve_collinear(masses, ordering, pot, (kind, value), None, scan_points)
        solution = (solution.gaps, solution.lam, solution.residual_norm)
    if solution is None and n == 3:
        roots = _ratio_scan_roots(masses, ordering, pot, kind, value, scan_points)
        if roots:
            solution = roots[0]
    if solution is None:
        last = shape_residual(masses, ordering, start, pot)
        raise SolverFailureError(ordering, last)

    gaps, lam, rel = solution
    if lam <= 0:
        raise SolverFailureError(ordering, rel, "multiplier is not positive at this size")

    extra = ()
    if not pot.is_homogeneous and n == 3:
        others = [
            r
            for r in _ratio_scan_roots(masses, ordering, pot, kind, value, scan_points)
            if not np.allclose(r[0], gaps, rtol=1e-8)
        ]
        extra = tuple(
            CollinearConfiguration(ordering, g, la, re) for g, la, re in others
        )

    return CollinearConfiguration(ordering, gaps, lam, rel, extra)


def enumerate_collinear(
    masses: MassSystem, pot: PotentialSpec, normalization="first_gap"
) -> list:
    """One solved configuration per ordering, reversals deduplicated (n!/2)."""
    if not pot.is_homogeneous:
        raise ValueError("enumeration is only claimed complete for homogeneous potentials")
    n = masses.n
    configs = []
    for perm in itertools.permutations(range(n)):
        if perm[0] > perm[-1]:
            continue  # the reversed ordering is the same line read backwards
        configs.append(solve_collinear(masses, perm, pot, normalization))
    return configs


def refine_collinear_mp(
    cc: CollinearConfiguration, masses: MassSystem, pot: PotentialSpec, precision: int = 40
):
    """Polish a solved configuration to `precision` decimal digits.

    Returns (gaps, lam) as mpmath values.  Collinear rotating solutions are
    exponentially unstable, so witness runs need initial data on the
    solution manifold to far better than double precision; this Newton
    polish (residual and Jacobian in mpmath arithmetic) supplies it.  The
    first gap is pinned at its incoming double value, which selects the
    same member of the scale family.
    """
    import mpmath as mp

    n = masses.n
    with mp.workdps(precision):
        m_mp = [mp.mpf(float(v)) for v in masses.masses]
        total = sum(m_mp, mp.mpf(0))
        terms = [
            (int(alpha) if float(alpha).is_integer() else mp.mpf(alpha), mp.mpf(coeff),
             mp.mpf(1 if alpha < 0 else -1))
            for alpha, coeff in pot.terms
        ]
        ordering = list(cc.ordering)
        g0_target = mp.mpf(float(cc.gaps[0]))

        def residual(z):
            gaps, lam = z[:-1], z[-1]
            slots = [mp.mpf(0)]
            for g in gaps:
                slots.append(slots[-1] + g)
            x = [mp.mpf(0)] * n
            for slot, body in enumerate(ordering):
                x[body] = slots[slot]
            com = sum((mi * xi for mi, xi in zip(m_mp, x)), mp.mpf(0)) / total
            x = [xi - com for xi in x]
            grad = [mp.mpf(0)] * n
            for i in range(n):
                for j in range(i + 1, n):
                    r = abs(x[i] - x[j])
                    du = mp.mpf(0)
                    for alpha, coeff, beta in terms:
                        du -= coeff * beta * alpha * r ** (alpha - 1)
                    s = du * m_mp[i] * m_mp[j] * (1 if x[i] > x[j] else -1)
                    grad[i] += s
                    grad[j] -= s
            gm = [grad[i] / m_mp[i] for i in range(n)]
            out = [
                (gm[ordering[k + 1]] - gm[ordering[k]]) - 2 * lam * gaps[k]
                for k in range(n - 1)
            ]
            out.append(gaps[0] - g0_target)
            return out

        if n == 2:
            # lam is explicit: the single gap equation solved for lam at gap g0
            f = residual([g0_target, mp.mpf(0)])
            return [g0_target], f[0] / (2 * g0_target)

        z = [mp.mpf(float(g)) for g in cc.gaps] + [mp.mpf(float(cc.lam))]
        fd = mp.mpf(10) ** (-(precision // 2))
        for _ in range(12):
            f = residual(z)
            if max(abs(v) for v in f) < mp.mpf(10) ** (2 - precision):
                break
            jac = mp.matrix(n, n)
            for col in range(n):
                h = fd * max(abs(z[col]), mp.mpf(1))
                zp = list(z)
                zp[col] += h
                fp = residual(zp)
                for row in range(n):
                    jac[row, col] = (fp[row] - f[row]) / h
            step = mp.lu_solve(jac, mp.matrix([-v for v in f]))
            z = [z[i] + step[i] for i in range(n)]
        return list(z[:-1]), z[-1]


@dataclass(frozen=True)
class ScaleProbeResult:
    small: CollinearConfiguration  # solved at I = 1
    big: CollinearConfiguration  # solved at I = 4
    max_ratio_difference: float


def scale_dependence_probe(masses: MassSystem, ordering, pot: PotentialSpec) -> ScaleProbeResult:
    """Compare the size-free shape of the configuration at two sizes.

    Homogeneous potentials give identical gap ratios at any size; the
    difference reported here is a direct measure of how strongly a
    quasi-homogeneous law couples shape to scale.
    """
    small = solve_collinear(masses, ordering, pot, ("inertia", 1.0))
    big = solve_collinear(masses, ordering, pot, ("inertia", 4.0))
    if masses.n == 2:
        diff = 0.0
    else:
        diff = float(np.max(np.abs(small.gap_ratios() - big.gap_ratios())))
    return ScaleProbeResult(small, big, diff)
