"""Turn trajectories into pass/fail reports for the collinear-motion laws.

The checks are numerical witnesses of exact statements about collinear
motion with nonzero angular momentum:

    ratio_law            r_i(t)/r_j(t) = sqrt(m_j c_i / (m_i c_j)) where
                         c_i is body i's (conserved) angular momentum; the
                         shape of a collinear solution is rigid up to size
    body_momentum_drift  each c_i is individually constant (collinear only)
    sundman_equality     2 T I - J^2 - K^2 = 0 along such solutions
    radial_velocity_id   rdot_i = -(r_i / 2) (omegadot / omega)
    kinetic_identity     T = (K/2) (omegadot^2 / (4 omega^3) + omega)
    radial_product_id    J = -(omegadot / (2 omega^2)) K
    constant inertia     if I is constant too, the motion is a relative
                         equilibrium: omega and all mutual distances freeze

Distances r_i enter these identities as magnitudes; bodies on opposite
sides of the center are not signed.  The constant-inertia verification is
hypothesis-gated: when I visibly varies, the report records that the
hypothesis is not met instead of failing, mirroring the implication it
witnesses.

Deviations are floating-point estimates, not interval bounds; tolerances
default to one order above integrator noise at the default tolerances and
are all overridable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Trajectory, diagnostics_series
from .model import (
    MassSystem,
    PotentialSpec,
    angular_momentum,
    collinearity_residual,
    kinetic_energy,
    moment_of_inertia,
)

__all__ = [
    "HypothesisError",
    "Tolerances",
    "CheckResult",
    "VerificationReport",
    "verify_collinear_homographic",
    "verify_constant_inertia",
    "verify_generic",
]


class HypothesisError(ValueError):
    """A verification was asked for on a run that violates its hypotheses."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        msg = f"hypothesis not satisfied: {hypothesis}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class Tolerances:
    """Default acceptance levels for the report entries.

    witness      theorem-witness deviations measured from exact per-sample data
    fd_witness   witnesses involving finite-difference derivatives
    identity     construction-level identities (rigid runs, conserved c_i)
    conservation H, K and barycenter drift of the integrator itself
    control      breakdown level a non-central control must exceed
    inertia_hypothesis  relative variation of I below which the
                        constant-inertia implication is exercised
    """

    witness: float = 1e-6
    fd_witness: float = 1e-5
    identity: float = 1e-8
    conservation: float = 1e-9
    control: float = 1e-3
    inertia_hypothesis: float = 1e-6

    def loosened(self, factor: float) -> "Tolerances":
        return replace(
            self,
            witness=self.witness * factor,
            fd_witness=self.fd_witness * factor,
            identity=self.identity * factor,
            conservation=self.conservation * factor,
            inertia_hypothesis=self.inertia_hypothesis * factor,
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    worst_time: float


@dataclass(frozen=True)
class VerificationReport:
    """Per-check deviations with an overall verdict.

    passed is always the conjunction of the entries.  hypothesis_met is
    None for unconditional reports; for the constant-inertia report it
    records whether the implication was actually exercised.  info carries
    measured quantities that are reported but not judged.
    """

    checks: tuple
    passed: bool
    hypothesis_met: bool | None = None
    notes: tuple = ()
    info: tuple = ()

    def format_text(self) -> str:
        lines = [
            f"{c.name} {c.deviation:.17g} {c.tolerance:.17g} "
            f"{'PASS' if c.passed else 'FAIL'}"
            for c in self.checks
        ]
        for key, value in self.info:
            lines.append(f"# info {key} {value:.17g}")
        for note in self.notes:
            lines.append(f"# note {note}")
        lines.append(f"overall {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "deviation": c.deviation,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "worst_time": c.worst_time,
                }
                for c in self.checks
            ],
            "passed": self.passed,
            "hypothesis_met": self.hypothesis_met,
            "notes": list(self.notes),
            "info": {k: v for k, v in self.info},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def entry(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _check(name, series_values, times, tol) -> CheckResult:
    values = np.asarray(series_values, dtype=float)
    k = int(np.argmax(values))
    dev = float(values[k])
    return CheckResult(name, dev, float(tol), dev <= tol, float(times[k]))


def _build(checks, hypothesis_met=None, notes=(), info=()) -> VerificationReport:
    return VerificationReport(
        checks=tuple(checks),
        passed=all(c.passed for c in checks),
        hypothesis_met=hypothesis_met,
        notes=tuple(notes),
        info=tuple(info),
    )


def _gate_collinear_nonzero_K(state0, masses, tolerances: Tolerances):
    coll = collinearity_residual(state0)
    if coll > 10 * tolerances.identity:
        raise HypothesisError("collinear initial state", f"initial residual {coll:.3e}")
    K0, _ = angular_momentum(state0, masses)
    k_scale = np.sqrt(
        2.0 * max(kinetic_energy(state0, masses) * moment_of_inertia(state0, masses), 0.0)
    )
    if abs(K0) <= 1e-9 * max(k_scale, 1e-300):
        raise HypothesisError("non-zero angular momentum", f"K = {K0:.3e}")


def _relative_drift(series_2d: np.ndarray) -> np.ndarray:
    """Per-column max |x(t) - x(0)| / denom with a floor for near-zero columns."""
    x0 = series_2d[0]
    scale = float(np.max(np.abs(x0)))
    denom = np.maximum(np.abs(x0), 1e-6 * max(scale, 1e-300))
    return np.max(np.abs(series_2d - x0), axis=0) / denom


def verify_collinear_homographic(
    traj: Trajectory,
    masses: MassSystem,
    pot: PotentialSpec,
    tolerances: Tolerances | None = None,
) -> VerificationReport:
    """Full witness report for a collinear run with nonzero angular momentum.

    Raises HypothesisError when the initial state is not collinear or has
    zero angular momentum; the laws checked here say nothing about such runs.
    """
    tol = tolerances or Tolerances()
    _gate_collinear_nonzero_K(traj.initial, masses, tol)
    s = diagnostics_series(traj, masses, pot)
    t = s.times
    n = masses.n

    checks = [_check("collinearity", s.collinearity, t, tol.witness)]

    drift = _relative_drift(s.K_body)
    worst_body = int(np.argmax(drift))
    per_t = np.abs(s.K_body[:, worst_body] - s.K_body[0, worst_body])
    checks.append(
        CheckResult(
            "body_momentum_drift",
            float(np.max(drift)),
            tol.identity,
            float(np.max(drift)) <= tol.identity,
            float(t[int(np.argmax(per_t))]),
        )
    )

    # ratio law: r_i/r_j pinned by the conserved per-body momenta
    c = s.K_body[0]
    k_scale = float(np.max(np.abs(c)))
    r0 = s.r_body[0]
    scale0 = float(np.max(r0))
    ratio_dev = np.zeros(len(t))
    for j in range(n):
        if abs(c[j]) <= 1e-9 * k_scale or r0[j] <= 1e-9 * scale0:
            continue
        for i in range(n):
            if i == j:
                continue
            expected = np.sqrt(masses.masses[j] * abs(c[i]) / (masses.masses[i] * abs(c[j])))
            measured = s.r_body[:, i] / s.r_body[:, j]
            ratio_dev = np.maximum(ratio_dev, np.abs(measured - expected))
    checks.append(_check("ratio_law", ratio_dev, t, tol.witness))

    ksq = s.K[0] ** 2
    checks.append(_check("sundman_equality", np.abs(s.sundman_gap) / ksq, t, tol.witness))

    # identities in omega and its finite-difference derivative
    w, wdot = s.omega, s.omega_dot
    keep = r0 > 1e-9 * scale0
    rd_resid = np.abs(s.rdot_body[:, keep] + 0.5 * s.r_body[:, keep] * (wdot / w)[:, None])
    checks.append(_check("radial_velocity_identity", np.max(rd_resid, axis=1), t, tol.fd_witness))
    checks.append(
        _check(
            "kinetic_identity",
            np.abs(s.T - 0.5 * s.K * (wdot**2 / (4.0 * w**3) + w)),
            t,
            tol.fd_witness,
        )
    )
    checks.append(
        _check("radial_product_identity", np.abs(s.J + wdot / (2.0 * w**2) * s.K), t, tol.fd_witness)
    )

    from .scenarios import fit_homographic  # local import to avoid a cycle

    fit = fit_homographic(traj, masses)
    checks.append(
        CheckResult(
            "shape_deviation",
            fit.max_shape_deviation,
            tol.witness,
            fit.max_shape_deviation <= tol.witness,
            float(t[-1]),
        )
    )
    return _build(checks)


def verify_constant_inertia(
    traj: Trajectory,
    masses: MassSystem,
    tolerances: Tolerances | None = None,
) -> VerificationReport:
    """Conditional check: constant I on a collinear K != 0 run forces rigidity.

    The hypothesis (relative variation of I below the gate) is tested first;
    when it holds, omega and every mutual distance must be constant at the
    identity tolerance.  When it does not hold the report records that and
    passes vacuously: runs outside the hypothesis are not judged.
    """
    tol = tolerances or Tolerances()
    _gate_collinear_nonzero_K(traj.initial, masses, tol)
    t = traj.times
    inertia = np.array([moment_of_inertia(st, masses) for st in traj.states])
    omega = (
        np.array([angular_momentum(st, masses)[0] for st in traj.states]) / inertia
    )

    i_var = float((np.max(inertia) - np.min(inertia)) / abs(inertia[0]))
    info = [("inertia_relative_variation", i_var)]
    if i_var > tol.inertia_hypothesis:
        return _build(
            [],
            hypothesis_met=False,
            notes=("hypothesis not met: moment of inertia varies along the run",),
            info=info,
        )

    checks = [
        _check("omega_variation", np.abs(omega - omega[0]) / abs(omega[0]), t, tol.identity)
    ]
    n = masses.n
    iu, ju = np.triu_indices(n, k=1)
    dists = np.array(
        [
            np.hypot(
                st.positions[iu, 0] - st.positions[ju, 0],
                st.positions[iu, 1] - st.positions[ju, 1],
            )
            for st in traj.states
        ]
    )
    dist_dev = np.max(np.abs(dists - dists[0]) / dists[0], axis=1)
    checks.append(_check("mutual_distance_variation", dist_dev, t, tol.identity))
    return _build(checks, hypothesis_met=True, info=info)


def verify_generic(
    traj: Trajectory,
    masses: MassSystem,
    pot: PotentialSpec,
    tolerances: Tolerances | None = None,
) -> VerificationReport:
    """Unconditional sanity report: conservation laws and the Sundman bound."""
    tol = tolerances or Tolerances()
    s = diagnostics_series(traj, masses, pot)
    t = s.times

    h_scale = max(abs(s.H[0]), 1e-300)
    k_scale = max(abs(s.K[0]), np.sqrt(2.0 * max(s.T[0] * s.I[0], 0.0)), 1e-300)
    checks = [
        _check("energy_drift", np.abs(s.H - s.H[0]) / h_scale, t, tol.conservation),
        _check("angular_momentum_drift", np.abs(s.K - s.K[0]) / k_scale, t, tol.conservation),
    ]

    sundman_tol = 1e-10 * max(1.0, s.K[0] ** 2)
    violation = np.maximum(0.0, -s.sundman_gap)
    checks.append(_check("sundman_nonnegative", violation, t, sundman_tol))

    bary = np.array(
        [
            abs(masses.masses @ st.positions[:, 0]) + abs(masses.masses @ st.positions[:, 1])
            for st in traj.states
        ]
    )
    scales = np.array([max(st.scale(), 1e-300) for st in traj.states])
    checks.append(
        _check("barycenter_drift", bary / (masses.total_mass * scales), t, 1e-10)
    )

    info = [
        ("inertia_relative_variation", float((np.max(s.I) - np.min(s.I)) / abs(s.I[0]))),
        ("min_sundman_gap", float(np.min(s.sundman_gap))),
    ]
    return _build(checks, info=info)
