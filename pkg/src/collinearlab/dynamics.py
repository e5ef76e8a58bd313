"""Equations of motion and trajectory integration.

The default integrator is an embedded Runge-Kutta-Fehlberg 7(8) pair with
the classical 13-stage tableau, stepsize control on the embedded error
estimate, and local extrapolation (the 8th-order solution is propagated).
Steps are clamped to land exactly on the uniform sample grid, so recorded
samples need no interpolation.  A fixed-step velocity-Verlet scheme is kept
as an alternative for long-horizon energy behavior; the adaptive pair is
what the verification suite runs on.

Collinear motion is exponentially unstable (rigidly rotating collinear
solutions are hyperbolic, the same physics that makes the collinear
libration points unstable), so double-precision roundoff seeds visible
off-line drift within a few rotations no matter how tight the tolerances
are.  For runs that must track such solutions beyond that horizon the
integrator has an arbitrary-precision mode (IntegratorConfig.precision,
decimal digits, mpmath arithmetic with the same tableau); samples are
rounded to doubles on output, which costs one ulp per sample and is not
re-amplified.

Every accepted step checks the minimum pair separation against the
close-approach guard; power-law attracting potentials are singular at
collision and the integrator refuses to push through one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from .model import (
    MassSystem,
    PhaseState,
    PotentialSpec,
    compute_diagnostics,
    grad_potential,
    kinetic_energy,
    potential_energy,
)

__all__ = [
    "ClosePassageError",
    "StepUnderflowError",
    "IntegratorConfig",
    "IntegratorStats",
    "HighPrecisionState",
    "Trajectory",
    "reversed_state",
    "accelerations",
    "integrate",
    "DiagnosticSeries",
    "diagnostics_series",
    "finite_difference",
]


class ClosePassageError(RuntimeError):
    """A pair separation fell below the configured guard distance."""

    def __init__(self, time: float, pair, distance: float, min_separation: float):
        self.time = time
        self.pair = tuple(pair)
        self.distance = distance
        self.min_separation = min_separation
        super().__init__(
            f"close approach of bodies {pair[0]} and {pair[1]} at t={time:.6g}: "
            f"separation {distance:.3e} < guard {min_separation:.3e}"
        )


class StepUnderflowError(RuntimeError):
    """Stepsize control drove the step below the representable floor."""

    def __init__(self, time: float, step: float):
        self.time = time
        self.step = step
        super().__init__(f"step size underflow at t={time:.6g} (h={step:.3e})")


@dataclass
class IntegratorConfig:
    """Tolerances and sampling for integrate().

    min_separation and sample_interval may be left as None: the guard then
    defaults to 1e-8 times the initial configuration scale and the sample
    grid to 256 intervals across the requested span.  scheme selects
    "rkf78" (adaptive, default) or "verlet" (fixed step = max_step).
    precision switches the rkf78 arithmetic to the given number of decimal
    digits (None = native doubles); use it for collinear witness runs whose
    instability would otherwise amplify roundoff past the tolerances.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    min_separation: float | None = None
    sample_interval: float | None = None
    scheme: str = "rkf78"
    precision: int | None = None

    def __post_init__(self):
        if self.precision is None and self.rel_tol < 1e-14:
            raise ValueError("rel_tol below 1e-14 is not resolvable in double precision")
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step <= 0:
            raise ValueError("rel_tol, abs_tol and max_step must be positive")
        if self.min_separation is not None and self.min_separation <= 0:
            raise ValueError("min_separation must be positive")
        if self.sample_interval is not None and self.sample_interval <= 0:
            raise ValueError("sample_interval must be positive")
        if self.scheme not in ("rkf78", "verlet"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.precision is not None and self.precision < 16:
            raise ValueError("precision below 16 digits is pointless; use the double path")


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    max_energy_drift: float


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution of the equations of motion.

    final_y_mp holds the exact extended-precision end state of an
    arbitrary-precision run (None on double runs); reversed_state() turns
    it into initial data for a backward (velocity-flipped) run.
    """

    times: np.ndarray
    states: tuple
    stats: IntegratorStats
    final_y_mp: tuple | None = None

    @property
    def samples(self):
        return list(zip(self.times.tolist(), self.states))

    @property
    def initial(self) -> PhaseState:
        return self.states[0]

    @property
    def final(self) -> PhaseState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)


def reversed_state(traj: Trajectory, masses: MassSystem):
    """Velocity-flipped final state for a forward-then-backward run.

    Returns a HighPrecisionState when the trajectory carries its exact
    extended-precision end state, otherwise a plain PhaseState.  The
    returned state's clock restarts at 0.
    """
    end = traj.final
    flipped = PhaseState(end.positions, -end.velocities, masses, time=0.0)
    if traj.final_y_mp is None:
        return flipped
    half = len(traj.final_y_mp) // 2
    y = tuple(traj.final_y_mp[:half]) + tuple(-v for v in traj.final_y_mp[half:])
    return HighPrecisionState(y, flipped)


def accelerations(state: PhaseState, masses: MassSystem, pot: PotentialSpec) -> np.ndarray:
    """r_i'' = -(1/m_i) dU/dr_i, shape (n, 2)."""
    return -grad_potential(state, masses, pot) / masses.masses[:, None]


# Fehlberg 7(8) tableau, 13 stages, kept as exact rationals so the
# arbitrary-precision path can rebuild it at any working precision.  The
# 8th-order weights B8 propagate the solution; B8 - B7 gives the embedded
# error estimate.
_C_FRAC = [F(0), F(2, 27), F(1, 9), F(1, 6), F(5, 12), F(1, 2), F(5, 6), F(1, 6),
           F(2, 3), F(1, 3), F(1), F(0), F(1)]
_C = np.array(_C_FRAC, dtype=float)
_A_ROWS = [
    [],
    [F(2, 27)],
    [F(1, 36), F(1, 12)],
    [F(1, 24), 0, F(1, 8)],
    [F(5, 12), 0, F(-25, 16), F(25, 16)],
    [F(1, 20), 0, 0, F(1, 4), F(1, 5)],
    [F(-25, 108), 0, 0, F(125, 108), F(-65, 27), F(125, 54)],
    [F(31, 300), 0, 0, 0, F(61, 225), F(-2, 9), F(13, 900)],
    [F(2), 0, 0, F(-53, 6), F(704, 45), F(-107, 9), F(67, 90), F(3)],
    [F(-91, 108), 0, 0, F(23, 108), F(-976, 135), F(311, 54), F(-19, 60),
     F(17, 6), F(-1, 12)],
    [F(2383, 4100), 0, 0, F(-341, 164), F(4496, 1025), F(-301, 82),
     F(2133, 4100), F(45, 82), F(45, 164), F(18, 41)],
    [F(3, 205), 0, 0, 0, 0, F(-6, 41), F(-3, 205), F(-3, 41), F(3, 41),
     F(6, 41), 0],
    [F(-1777, 4100), 0, 0, F(-341, 164), F(4496, 1025), F(-289, 82),
     F(2193, 4100), F(51, 82), F(33, 164), F(12, 41), 0, F(1)],
]
_A = np.zeros((13, 13))
for _i, _row in enumerate(_A_ROWS):
    _A[_i, : len(_row)] = [float(x) for x in _row]
_B7_FRAC = [F(41, 840), 0, 0, 0, 0, F(34, 105), F(9, 35), F(9, 35), F(9, 280),
            F(9, 280), F(41, 840), 0, 0]
_B8_FRAC = [0, 0, 0, 0, 0, F(34, 105), F(9, 35), F(9, 35), F(9, 280), F(9, 280),
            0, F(41, 840), F(41, 840)]
_B7 = np.array(_B7_FRAC, dtype=float)
_B8 = np.array(_B8_FRAC, dtype=float)
_ORDER = 8


def _pair_distances(pos2d: np.ndarray):
    n = pos2d.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(pos2d[iu, 0] - pos2d[ju, 0], pos2d[iu, 1] - pos2d[ju, 1])
    return iu, ju, d


def _initial_step(rhs, t0, y0, rtol, atol, span):
    sc = atol + rtol * np.abs(y0)
    f0 = rhs(t0, y0)
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = rhs(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    return min(100 * h0, h1, span)


def _sample_grid(t0: float, t_end: float, interval: float | None):
    span = t_end - t0
    if interval is None:
        m = 256
    else:
        m = max(1, int(round(span / interval)))
    return np.linspace(t0, t_end, m + 1)


def integrate(
    state,
    masses: MassSystem,
    pot: PotentialSpec,
    t_end: float,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate the state forward to t_end and sample it uniformly.

    state is a PhaseState, or a HighPrecisionState when config.precision is
    set (the mp path then starts from the exact extended-precision values).
    Returns a Trajectory whose samples sit on the uniform grid spanning
    [state.time, t_end] (endpoints included).  Raises ClosePassageError if
    any pair separation drops below the guard and StepUnderflowError if the
    controller cannot make progress at the requested tolerance.
    """
    cfg = config or IntegratorConfig()
    if t_end <= state.time:
        raise ValueError("t_end must be greater than the state's time")

    n = state.n
    m = masses.masses
    y0 = np.concatenate([state.positions.ravel(), state.velocities.ravel()])
    t0 = state.time

    scale0 = state.scale()
    min_sep = cfg.min_separation if cfg.min_separation is not None else 1e-8 * scale0

    def rhs(t, y):
        pos = y[: 2 * n].reshape(n, 2)
        vel = y[2 * n :]
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, 1.0)
        dudr = pot.pair_energy_derivative(dist) * (m[:, None] * m[None, :])
        np.fill_diagonal(dudr, 0.0)
        acc = -np.einsum("ij,ijk->ik", dudr / dist, diff) / m[:, None]
        return np.concatenate([vel, acc.ravel()])

    def make_state(t, y):
        return PhaseState(
            y[: 2 * n].reshape(n, 2), y[2 * n :].reshape(n, 2), masses, time=t
        )

    def guard(t, y):
        iu, ju, d = _pair_distances(y[: 2 * n].reshape(n, 2))
        k = int(np.argmin(d))
        if d[k] < min_sep:
            raise ClosePassageError(t, (int(iu[k]), int(ju[k])), float(d[k]), min_sep)

    guard(t0, y0)
    grid = _sample_grid(t0, t_end, cfg.sample_interval)
    h0_energy = potential_energy(state, masses, pot) + kinetic_energy(state, masses)
    h_scale = max(abs(h0_energy), 1e-300)

    if cfg.precision is not None:
        if cfg.scheme != "rkf78":
            raise ValueError("precision is only supported by the rkf78 scheme")
        return _integrate_rkf78_mp(
            state, masses, pot, grid, cfg, min_sep, y0_mp=getattr(state, "y_mp", None)
        )
    if isinstance(state, HighPrecisionState):
        raise ValueError("a high-precision initial state needs config.precision set")

    if cfg.scheme == "verlet":
        return _integrate_verlet(
            rhs, make_state, guard, y0, grid, cfg, n, m, pot, h0_energy, h_scale
        )

    times = [t0]
    states = [make_state(t0, y0)]
    t, y = t0, y0
    h_free = min(_initial_step(rhs, t0, y0, cfg.rel_tol, cfg.abs_tol, t_end - t0), cfg.max_step)
    accepted = rejected = 0
    max_drift = 0.0
    next_idx = 1

    while next_idx < len(grid):
        target = grid[next_idx]
        h = min(h_free, cfg.max_step, target - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepUnderflowError(t, h)
        clamped = h < h_free

        k = np.empty((13, y.size))
        k[0] = rhs(t, y)
        for s in range(1, 13):
            k[s] = rhs(t + _C[s] * h, y + h * (_A[s, :s] @ k[:s]))
        y_new = y + h * (_B8 @ k)
        err = h * (_B8 - _B7) @ k
        sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / sc) ** 2)))
        factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** (-1.0 / _ORDER)))

        if err_norm <= 1.0:
            t_new = t + h
            guard(t_new, y_new)
            accepted += 1
            t, y = t_new, y_new
            if t >= target - 1e-12 * max(1.0, abs(target)):
                t = target  # kill accumulated roundoff in the sample clock
                times.append(t)
                states.append(make_state(t, y))
                next_idx += 1
            pos = y[: 2 * n].reshape(n, 2)
            vel = y[2 * n :].reshape(n, 2)
            energy = float(
                0.5 * np.sum(m * (vel[:, 0] ** 2 + vel[:, 1] ** 2))
                + _potential_raw(pos, m, pot)
            )
            max_drift = max(max_drift, abs(energy - h0_energy) / h_scale)
            # A step shortened only to hit the sample grid must not shrink
            # the controller's memory of the error-limited step.
            h_free = max(h_free, h * factor) if clamped else h * factor
        else:
            rejected += 1
            h_free = h * factor

    return Trajectory(
        times=np.array(times),
        states=tuple(states),
        stats=IntegratorStats(accepted, rejected, max_drift),
    )


def _potential_raw(pos: np.ndarray, m: np.ndarray, pot: PotentialSpec) -> float:
    iu, ju, d = _pair_distances(pos)
    return float(np.sum(m[iu] * m[ju] * pot.pair_energy(d)))


def _integrate_verlet(rhs, make_state, guard, y0, grid, cfg, n, m, pot, h0_energy, h_scale):
    if not np.isfinite(cfg.max_step):
        raise ValueError("verlet scheme needs a finite max_step as its fixed step")
    times = [grid[0]]
    states = [make_state(grid[0], y0)]
    y = y0.copy()
    steps = 0
    max_drift = 0.0

    def acc_of(y):
        return rhs(0.0, y)[2 * n :]

    a = acc_of(y)
    for prev, target in zip(grid[:-1], grid[1:]):
        nsub = max(1, int(np.ceil((target - prev) / cfg.max_step)))
        dt = (target - prev) / nsub
        for _ in range(nsub):
            y[2 * n :] += 0.5 * dt * a
            y[: 2 * n] += dt * y[2 * n :]
            a = acc_of(y)
            y[2 * n :] += 0.5 * dt * a
            steps += 1
        guard(target, y)
        pos = y[: 2 * n].reshape(n, 2)
        vel = y[2 * n :].reshape(n, 2)
        energy = float(
            0.5 * np.sum(m * (vel[:, 0] ** 2 + vel[:, 1] ** 2))
            + _potential_raw(pos, m, pot)
        )
        max_drift = max(max_drift, abs(energy - h0_energy) / h_scale)
        times.append(target)
        states.append(make_state(target, y))

    return Trajectory(
        times=np.array(times),
        states=tuple(states),
        stats=IntegratorStats(steps, 0, max_drift),
    )


@dataclass(frozen=True)
class HighPrecisionState:
    """Initial conditions carried as mpmath values, with a float64 view.

    state is the rounded PhaseState; y_mp is the flat vector
    (x0, y0, x1, y1, ..., vx0, vy0, ...) in mpf.  Build it at a precision
    at least as high as the integration precision it will seed.
    """

    y_mp: tuple
    state: PhaseState

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def time(self) -> float:
        return self.state.time

    @property
    def positions(self) -> np.ndarray:
        return self.state.positions

    @property
    def velocities(self) -> np.ndarray:
        return self.state.velocities

    def scale(self) -> float:
        return self.state.scale()


def _integrate_rkf78_mp(state, masses, pot, grid, cfg, min_sep, y0_mp=None):
    """The rkf78 loop in mpmath arithmetic at cfg.precision decimal digits.

    Same tableau, controller and guards as the double path; state vectors
    are flat lists of mpf.  Samples are rounded to doubles on recording,
    and the energy-drift statistic is evaluated at the samples.
    """
    import mpmath as mp

    n = state.n
    with mp.workdps(cfg.precision):
        zero = mp.mpf(0)
        masses_mp = [mp.mpf(float(v)) for v in masses.masses]
        # integral exponents take the fast power path in gmpy/mpmath
        terms_mp = []
        for alpha, coeff in pot.terms:
            du_exp = alpha - 1.0
            terms_mp.append(
                (
                    int(du_exp) if du_exp.is_integer() else mp.mpf(du_exp),
                    int(alpha) if float(alpha).is_integer() else mp.mpf(alpha),
                    mp.mpf(coeff) * (1 if alpha < 0 else -1),
                )
            )

        def frac(x):
            x = F(x)
            return mp.mpf(x.numerator) / x.denominator

        a_rows = [
            tuple((q, frac(x)) for q, x in enumerate(row) if x) for row in _A_ROWS
        ]
        b8_row = tuple((q, frac(x)) for q, x in enumerate(_B8_FRAC) if x)
        err_row = tuple(
            (q, frac(b8) - frac(b7))
            for q, (b7, b8) in enumerate(zip(_B7_FRAC, _B8_FRAC))
            if F(b8) != F(b7)
        )
        rel = mp.mpf(cfg.rel_tol)
        absl = mp.mpf(cfg.abs_tol)

        if y0_mp is not None:
            y = list(y0_mp)
        else:
            y = [mp.mpf(float(v)) for v in state.positions.ravel()] + [
                mp.mpf(float(v)) for v in state.velocities.ravel()
            ]
        dim = 4 * n
        pair_idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
        min_sep_sq = mp.mpf(min_sep) ** 2

        def rhs(y):
            out = list(y[2 * n :]) + [zero] * (2 * n)
            for i, j in pair_idx:
                dx = y[2 * i] - y[2 * j]
                dy = y[2 * i + 1] - y[2 * j + 1]
                r = mp.sqrt(dx * dx + dy * dy)
                du_over_r = zero
                for du_exp, _, signed_coeff in terms_mp:
                    # u'(r)/r with u the unit-mass pair energy of model.py
                    du_over_r -= signed_coeff * (du_exp + 1) * r ** (du_exp - 1)
                fx, fy = du_over_r * dx, du_over_r * dy
                out[2 * n + 2 * i] -= masses_mp[j] * fx
                out[2 * n + 2 * i + 1] -= masses_mp[j] * fy
                out[2 * n + 2 * j] += masses_mp[i] * fx
                out[2 * n + 2 * j + 1] += masses_mp[i] * fy
            return out

        def energy(y):
            e = zero
            for i in range(n):
                e += masses_mp[i] * (y[2 * n + 2 * i] ** 2 + y[2 * n + 2 * i + 1] ** 2) / 2
            for i, j in pair_idx:
                dx = y[2 * i] - y[2 * j]
                dy = y[2 * i + 1] - y[2 * j + 1]
                r = mp.sqrt(dx * dx + dy * dy)
                u = zero
                for _, alpha, signed_coeff in terms_mp:
                    u -= signed_coeff * r**alpha
                e += masses_mp[i] * masses_mp[j] * u
            return e

        def guard(t, y):
            for i, j in pair_idx:
                dx = y[2 * i] - y[2 * j]
                dy = y[2 * i + 1] - y[2 * j + 1]
                d2 = dx * dx + dy * dy
                if d2 < min_sep_sq:
                    raise ClosePassageError(
                        float(t), (i, j), float(mp.sqrt(d2)), min_sep
                    )

        def make_state(t, y):
            pos = np.array([[float(y[2 * i]), float(y[2 * i + 1])] for i in range(n)])
            vel = np.array(
                [[float(y[2 * n + 2 * i]), float(y[2 * n + 2 * i + 1])] for i in range(n)]
            )
            return PhaseState(pos, vel, masses, time=float(t))

        t = mp.mpf(float(grid[0]))
        guard(t, y)
        h0_energy = energy(y)
        h_scale = abs(h0_energy) if h0_energy != 0 else mp.mpf("1e-300")
        times = [float(grid[0])]
        states = [make_state(t, y)]
        span = float(grid[-1] - grid[0])
        f0 = rhs(y)
        d0 = max(abs(v) for v in y)
        d1 = max(abs(v) for v in f0)
        h_free = mp.mpf(min(0.01 * float(d0 / d1) if d1 > 0 else 1e-3, span, cfg.max_step))
        accepted = rejected = 0
        max_drift = 0.0
        next_idx = 1
        max_step = mp.mpf(cfg.max_step) if np.isfinite(cfg.max_step) else None

        while next_idx < len(grid):
            target = mp.mpf(float(grid[next_idx]))
            h = h_free
            if max_step is not None and max_step < h:
                h = max_step
            clamped = False
            if target - t < h:
                h = target - t
                clamped = True
            if h < mp.mpf("1e-14") * max(mp.mpf(1), abs(t)):
                raise StepUnderflowError(float(t), float(h))

            k = [rhs(y)]
            for s in range(1, 13):
                row = a_rows[s]
                yk = list(y)
                for q, coeff in row:
                    hc = h * coeff
                    kq = k[q]
                    for d in range(dim):
                        yk[d] += hc * kq[d]
                k.append(rhs(yk))
            y_new = list(y)
            for q, coeff in b8_row:
                hc = h * coeff
                kq = k[q]
                for d in range(dim):
                    y_new[d] += hc * kq[d]
            err_norm_sq = zero
            for d in range(dim):
                err = zero
                for q, coeff in err_row:
                    err += coeff * k[q][d]
                sc = absl + rel * max(abs(y[d]), abs(y_new[d]))
                err_norm_sq += (h * err / sc) ** 2
            err_norm = float(mp.sqrt(err_norm_sq / dim))

            factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** (-1.0 / _ORDER)))
            if err_norm <= 1.0:
                t_new = t + h
                guard(t_new, y_new)
                accepted += 1
                t, y = t_new, y_new
                if float(t) >= float(target) - 1e-12 * max(1.0, abs(float(target))):
                    t = target
                    times.append(float(grid[next_idx]))
                    states.append(make_state(t, y))
                    next_idx += 1
                    drift = float(abs(energy(y) - h0_energy) / h_scale)
                    max_drift = max(max_drift, drift)
                h_free = max(h_free, h * mp.mpf(factor)) if clamped else h * mp.mpf(factor)
            else:
                rejected += 1
                h_free = h * mp.mpf(factor)

    return Trajectory(
        times=np.array(times),
        states=tuple(states),
        stats=IntegratorStats(accepted, rejected, max_drift),
        final_y_mp=tuple(y),
    )


def finite_difference(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Fourth-order finite-difference d(values)/dt on a uniform grid.

    values may be (m,) or (m, k); differentiation runs along axis 0 with
    five-point stencils (one-sided at the edges).  Falls back to
    np.gradient for fewer than five samples.
    """
    v = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    if len(t) < 5:
        return np.gradient(v, t, axis=0)
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=1e-12 * max(1.0, abs(h))):
        raise ValueError("finite_difference needs a uniform time grid")
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    out[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    out[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    out[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    out[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    return out


@dataclass(frozen=True)
class DiagnosticSeries:
    """Scalar diagnostics of every trajectory sample, plus derived series.

    r_body holds the per-body distances from the barycenter, rdot_body their
    finite-difference time derivative, and omega_dot the finite-difference
    derivative of omega = K/I.  All finite differences use the fourth-order
    stencils of finite_difference.
    """

    times: np.ndarray
    U: np.ndarray
    T: np.ndarray
    H: np.ndarray
    I: np.ndarray
    K: np.ndarray
    K_body: np.ndarray  # (m, n)
    J: np.ndarray
    sundman_gap: np.ndarray
    collinearity: np.ndarray
    omega: np.ndarray
    r_body: np.ndarray  # (m, n)
    rdot_body: np.ndarray  # (m, n), finite difference
    omega_dot: np.ndarray  # finite difference

    def __len__(self) -> int:
        return len(self.times)


def diagnostics_series(traj: Trajectory, masses: MassSystem, pot: PotentialSpec) -> DiagnosticSeries:
    """Map every sample through the instantaneous diagnostics."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    rows = [compute_diagnostics(s, masses, pot) for s in traj.states]
    times = traj.times
    r_body = np.array(
        [np.hypot(s.positions[:, 0], s.positions[:, 1]) for s in traj.states]
    )
    omega = np.array([d.omega for d in rows])
    return DiagnosticSeries(
        times=times,
        U=np.array([d.U for d in rows]),
        T=np.array([d.T for d in rows]),
        H=np.array([d.H for d in rows]),
        I=np.array([d.I for d in rows]),
        K=np.array([d.K for d in rows]),
        K_body=np.array([d.K_body for d in rows]),
        J=np.array([d.J for d in rows]),
        sundman_gap=np.array([d.sundman_gap for d in rows]),
        collinearity=np.array([d.collinearity for d in rows]),
        omega=omega,
        r_body=r_body,
        rdot_body=finite_difference(r_body, times),
        omega_dot=finite_difference(omega, times),
    )
