"""Initial conditions for the solution families studied here, and shape fits.

Families built on a solved collinear central configuration:

    relative equilibrium   rigid rotation at omega = sqrt(2 * lam); every
                           mutual distance stays constant
    homographic            velocities d*r_i + w*(z x r_i): the shape is
                           preserved while the size breathes (d = 0 and
                           w = sqrt(2 lam) recovers the relative equilibrium,
                           w = 0 the purely homothetic collapse/expansion)
    non-central control    rigid-rotation data on a deliberately wrong
                           collinear shape; the line does not survive

plus the figure-eight choreography loaded from a literature fixture (see
data/figure_eight.txt for provenance).  fit_homographic measures how close
any trajectory is to "same shape, varying size and angle".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .central_config import (
    CollinearConfiguration,
    line_positions,
    refine_collinear_mp,
    shape_residual,
    solve_collinear,
)
from .dynamics import HighPrecisionState, Trajectory, diagnostics_series
from .model import MassSystem, PhaseState, PotentialSpec

__all__ = [
    "relative_equilibrium_ics",
    "homographic_ics",
    "collinear_witness_state",
    "non_central_collinear_ics",
    "figure_eight_ics",
    "FIGURE_EIGHT_PERIOD",
    "HomographicFit",
    "fit_homographic",
    "radial_period",
]

FIGURE_EIGHT_PERIOD = 6.32591398

CONTROL_RESIDUAL_FLOOR = 1e-3  # a control shape must miss the equations by this much


def _require_solved(cc: CollinearConfiguration):
    if cc.residual_norm > 1e-10:
        raise ValueError(
            f"configuration residual {cc.residual_norm:.3e} is above 1e-10; "
            "solve it before building initial conditions"
        )


def _line_state(x: np.ndarray, masses: MassSystem, omega: float, dilation: float) -> PhaseState:
    pos = np.column_stack([x, np.zeros_like(x)])
    vel = dilation * pos + omega * np.column_stack([-pos[:, 1], pos[:, 0]])
    return PhaseState(pos, vel, masses)


def relative_equilibrium_ics(cc: CollinearConfiguration, masses: MassSystem) -> PhaseState:
    """Rigidly rotating state on the configuration: v_i = omega * (z x r_i).

    omega = sqrt(2 * lam), the rate at which the induced circular motion
    balances the configuration's accelerations.  The state has J = 0 and a
    vanishing Sundman gap.
    """
    _require_solved(cc)
    x = line_positions(cc.ordering, cc.gaps, masses)
    return _line_state(x, masses, math.sqrt(2.0 * cc.lam), 0.0)


def homographic_ics(
    cc: CollinearConfiguration,
    masses: MassSystem,
    omega0: float,
    dilation_rate: float = 0.0,
) -> PhaseState:
    """Shape-preserving initial data: v_i = dilation_rate*r_i + omega0*(z x r_i).

    omega0 = sqrt(2 lam) with zero dilation gives the relative equilibrium;
    omega0 = 0 gives the homothetic (zero angular momentum) family.
    """
    _require_solved(cc)
    x = line_positions(cc.ordering, cc.gaps, masses)
    return _line_state(x, masses, float(omega0), float(dilation_rate))


def collinear_witness_state(
    masses: MassSystem,
    ordering,
    pot: PotentialSpec,
    omega_factor: float = 1.0,
    dilation_rate: float = 0.0,
    precision: int = 40,
    normalization="first_gap",
) -> HighPrecisionState:
    """Homographic initial data prepared at extended precision.

    Rotating collinear solutions are exponentially unstable, so data that
    sits on the solution manifold only to double precision leaves it within
    a few rotations; this constructor refines the configuration to
    `precision` digits and builds the rigid-rotation-plus-dilation
    velocities in the same arithmetic.  omega_factor scales the rotation
    rate relative to the circular value sqrt(2*lam): 1 is the relative
    equilibrium, anything else with zero dilation is an eccentric
    size-breathing orbit.  Integrate the result with a matching
    IntegratorConfig.precision.
    """
    import mpmath as mp

    cc = solve_collinear(masses, ordering, pot, normalization)
    gaps_mp, lam_mp = refine_collinear_mp(cc, masses, pot, precision)
    n = masses.n
    with mp.workdps(precision):
        m_mp = [mp.mpf(float(v)) for v in masses.masses]
        total = sum(m_mp, mp.mpf(0))
        slots = [mp.mpf(0)]
        for g in gaps_mp:
            slots.append(slots[-1] + g)
        x = [mp.mpf(0)] * n
        for slot, body in enumerate(cc.ordering):
            x[body] = slots[slot]
        com = sum((mi * xi for mi, xi in zip(m_mp, x)), mp.mpf(0)) / total
        x = [xi - com for xi in x]
        omega0 = mp.mpf(float(omega_factor)) * mp.sqrt(2 * lam_mp)
        dil = mp.mpf(float(dilation_rate))
        # r_i = (x_i, 0); v_i = dil * r_i + omega0 * (z x r_i) = (dil x_i, omega0 x_i)
        y_mp = []
        for xi in x:
            y_mp += [xi, mp.mpf(0)]
        for xi in x:
            y_mp += [dil * xi, omega0 * xi]
        pos = np.array([[float(xi), 0.0] for xi in x])
        vel = np.array([[float(dil * xi), float(omega0 * xi)] for xi in x])
    state = PhaseState(pos, vel, masses)
    return HighPrecisionState(tuple(y_mp), state)


def non_central_collinear_ics(
    masses: MassSystem,
    gaps,
    omega0: float,
    pot: PotentialSpec,
    ordering=None,
) -> PhaseState:
    """Rigid-rotation data on a collinear shape that is NOT a central configuration.

    Rejects shapes whose size-free residual is below the control floor: the
    whole point of the control is that the equations fail, so collinearity
    must break down under integration.
    """
    ordering = tuple(ordering) if ordering is not None else tuple(range(masses.n))
    gaps = np.asarray(gaps, dtype=float)
    rel = shape_residual(masses, ordering, gaps, pot)
    if rel < CONTROL_RESIDUAL_FLOOR:
        raise ValueError(
            f"gaps {gaps.tolist()} solve the central-configuration equations "
            f"(residual {rel:.3e} < {CONTROL_RESIDUAL_FLOOR}); not a valid control"
        )
    x = line_positions(ordering, gaps, masses)
    return _line_state(x, masses, float(omega0), 0.0)


def figure_eight_ics():
    """The equal-mass figure-eight choreography from the packaged fixture.

    Returns (state, masses).  The fixture stores the published decimals; the
    state is re-centered on construction as usual (the published data is
    already barycentric and momentum-free to its printed precision).
    """
    text = resources.files("collinearlab").joinpath("data/figure_eight.txt").read_text()
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([float(tok) for tok in line.split()])
    data = np.array(rows)
    masses = MassSystem(data[:, 0])
    state = PhaseState(data[:, 1:3], data[:, 3:5], masses)
    return state, masses


def radial_period(cc: CollinearConfiguration, omega0: float, dilation_rate: float = 0.0) -> float:
    """Period of the size oscillation of a bound homographic orbit (inverse-distance law).

    The size factor of a homographic orbit on an inverse-distance potential
    obeys a Kepler-type radial problem with gravitational parameter
    mu = 2*lam; this returns its period 2*pi*sqrt(a^3/mu).  Raises for
    unbound data (nonnegative radial energy).
    """
    mu = 2.0 * cc.lam
    energy = 0.5 * dilation_rate**2 + 0.5 * omega0**2 - mu
    if energy >= 0:
        raise ValueError("orbit is unbound; no radial period")
    a = -mu / (2.0 * energy)
    return 2.0 * math.pi * math.sqrt(a**3 / mu)


@dataclass(frozen=True)
class HomographicFit:
    """Size series, angle series, and worst shape drift of a trajectory.

    scale is nu(t) = sqrt(I(t)/I(0)) (1 at the first sample); angle is the
    principal-axis angle lifted to a continuous curve (the axis is only
    defined modulo pi, so increments are accumulated and never jump).
    max_shape_deviation is the largest change of any mutual-distance ratio
    over the run; zero means exactly homographic.
    """

    times: np.ndarray
    scale: np.ndarray
    angle: np.ndarray
    max_shape_deviation: float


def _principal_angle(pos: np.ndarray) -> float:
    s_xx = float(np.sum(pos[:, 0] * pos[:, 0]))
    s_xy = float(np.sum(pos[:, 0] * pos[:, 1]))
    s_yy = float(np.sum(pos[:, 1] * pos[:, 1]))
    # eigenvector angle of the dominant axis of [[s_xx, s_xy], [s_xy, s_yy]]
    return 0.5 * math.atan2(2.0 * s_xy, s_xx - s_yy)


def fit_homographic(traj: Trajectory, masses: MassSystem) -> HomographicFit:
    """Fit the "similar to itself" ansatz to a trajectory.

    Shape drift is measured on ratios of mutual distances: for every pair
    of pairs whose reference distance starts above 1e-9 times the scale,
    the deviation |r_ab(t)/r_cd(t) - r_ab(0)/r_cd(0)| is tracked and the
    maximum reported.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    n = traj.initial.n
    iu, ju = np.triu_indices(n, k=1)
    dists = np.array(
        [
            np.hypot(
                s.positions[iu, 0] - s.positions[ju, 0],
                s.positions[iu, 1] - s.positions[ju, 1],
            )
            for s in traj.states
        ]
    )  # (m, npairs)
    inertia = np.array(
        [float(np.sum(masses.masses * np.sum(s.positions**2, axis=1))) for s in traj.states]
    )
    if inertia[0] <= 0:
        raise ValueError("degenerate initial state: I = 0")
    scale = np.sqrt(inertia / inertia[0])

    angles = np.array([_principal_angle(s.positions) for s in traj.states])
    # lift: the axis angle lives on a circle of circumference pi
    inc = np.diff(angles)
    inc = (inc + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    angle = np.concatenate([[angles[0]], angles[0] + np.cumsum(inc)])

    ref0 = dists[0]
    cfg_scale = float(np.max(ref0))
    usable = ref0 > 1e-9 * cfg_scale
    dev = 0.0
    for kref in np.nonzero(usable)[0]:
        ratios = dists / dists[:, kref][:, None]
        dev = max(dev, float(np.max(np.abs(ratios - ratios[0]))))
    return HomographicFit(traj.times, scale, angle, dev)
