"""Core value types and instantaneous quantities of the planar n-body problem.

All states live in barycentric coordinates: positions are measured from the
center of mass and the total linear momentum is zero.  Construction re-centers
both, so every downstream quantity can assume sum(m_i r_i) = sum(m_i v_i) = 0.

Quantities defined here (for masses m_i, positions r_i, velocities v_i):

    U   potential energy, so that the Lagrangian is T - U and H = T + U
    T   kinetic energy          (1/2) sum m_i |v_i|^2
    I   moment of inertia       sum m_i |r_i|^2  about the barycenter
    K   angular momentum        sum m_i (x_i vy_i - y_i vx_i), z-component
    J   radial product          sum m_i r_i . v_i  (equals dI/dt / 2)

The Sundman combination 2*T*I - J^2 - K^2 is nonnegative for every planar
state and vanishes exactly on rigidly rotating collinear states; it is the
central diagnostic of this package.

Interaction laws are sums of homogeneous power-law pair terms.  A term
(alpha, c) with c > 0 is attracting for any alpha != 0; the sign bookkeeping
follows the convention that the pair energy is

    u(r) = -c * beta * m_i * m_j * r**alpha,   beta = +1 if alpha < 0 else -1,

so the Newtonian case is the single term (-1, G) with U = -G sum m_i m_j / r.
A negative c flips the term to repulsive (useful for Lennard-Jones style
cores); see PotentialSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CoincidentBodiesError",
    "DegenerateConfigurationError",
    "MassSystem",
    "PhaseState",
    "PotentialSpec",
    "Diagnostics",
    "potential_energy",
    "grad_potential",
    "kinetic_energy",
    "moment_of_inertia",
    "moment_of_inertia_pairwise",
    "angular_momentum",
    "radial_product",
    "sundman_gap",
    "collinearity_residual",
    "omega_estimate",
    "torque_per_body",
    "compute_diagnostics",
]


class CoincidentBodiesError(ValueError):
    """Two bodies occupy the same point, making the potential singular."""

    def __init__(self, i: int, j: int, distance: float = 0.0):
        self.pair = (i, j)
        self.distance = distance
        super().__init__(
            f"bodies {i} and {j} are coincident (separation {distance:.3e})"
        )


class DegenerateConfigurationError(ValueError):
    """A configuration with I = 0 (total collapse) was passed where I > 0 is needed."""


def _as_masses(masses) -> np.ndarray:
    m = np.asarray(masses, dtype=float)
    if m.ndim != 1 or m.size < 2:
        raise ValueError("need at least two masses in a flat sequence")
    if not np.all(m > 0.0):
        raise ValueError("all masses must be strictly positive")
    return m


@dataclass(frozen=True)
class MassSystem:
    """Ordered positive masses of the bodies.

    total_mass is computed once as the plain sum of the entries.
    """

    masses: np.ndarray
    total_mass: float = field(init=False)

    def __init__(self, masses):
        m = _as_masses(masses)
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "total_mass", float(np.sum(m)))

    @property
    def n(self) -> int:
        return self.masses.size

    def __len__(self) -> int:
        return self.masses.size


@dataclass(frozen=True)
class PhaseState:
    """Planar positions and velocities of all bodies at one instant.

    Construction subtracts the center of mass from the positions and the
    mean momentum per unit mass from the velocities, so stored states are
    always barycentric and momentum-free.  The original offsets are dropped.
    """

    positions: np.ndarray  # (n, 2)
    velocities: np.ndarray  # (n, 2)
    time: float = 0.0

    def __init__(self, positions, velocities, masses, time: float = 0.0):
        pos = np.array(positions, dtype=float)
        vel = np.array(velocities, dtype=float)
        m = masses.masses if isinstance(masses, MassSystem) else _as_masses(masses)
        if pos.shape != (m.size, 2) or vel.shape != (m.size, 2):
            raise ValueError(
                f"positions/velocities must have shape ({m.size}, 2), "
                f"got {pos.shape} and {vel.shape}"
            )
        total = float(np.sum(m))
        pos -= (m @ pos) / total
        vel -= (m @ vel) / total
        pos.setflags(write=False)
        vel.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "time", float(time))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def scale(self) -> float:
        """Configuration scale max_i |r_i| (0 only at total collapse)."""
        return float(np.max(np.hypot(self.positions[:, 0], self.positions[:, 1])))


def _validate_terms(terms):
    clean = []
    for t in terms:
        alpha, coeff = float(t[0]), float(t[1])
        if alpha == 0.0:
            raise ValueError("a term with exponent 0 is dynamically void")
        if coeff == 0.0:
            raise ValueError("term coefficients must be nonzero")
        clean.append((alpha, coeff))
    if not clean:
        raise ValueError("potential needs at least one term")
    return tuple(clean)


@dataclass(frozen=True)
class PotentialSpec:
    """Interaction law: a sum of homogeneous power-law pair terms.

    terms is a sequence of (alpha, coefficient) with alpha != 0 and
    coefficient != 0.  Positive coefficients are attracting under the sign
    convention in the module docstring; negative coefficients give the
    repulsive counterpart of the same power.  One term makes the potential
    homogeneous; several terms make it quasi-homogeneous (the Lennard-Jones
    family, for example, pairs two attracting/repulsive inverse powers).
    """

    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", _validate_terms(terms))

    @classmethod
    def newtonian(cls, G: float = 1.0) -> "PotentialSpec":
        """Inverse-distance attraction with gravitational constant G."""
        if G <= 0:
            raise ValueError("G must be positive")
        return cls([(-1.0, G)])

    @property
    def is_homogeneous(self) -> bool:
        return len(self.terms) == 1

    @property
    def has_attracting_term(self) -> bool:
        return any(c > 0 for _, c in self.terms)

    def pair_energy(self, r):
        """Energy of a unit-mass pair at separation r (masses multiply in)."""
        r = np.asarray(r, dtype=float)
        u = np.zeros_like(r)
        for alpha, coeff in self.terms:
            beta = 1.0 if alpha < 0 else -1.0
            u = u - coeff * beta * r**alpha
        return u

    def pair_energy_derivative(self, r):
        """d/dr of pair_energy."""
        r = np.asarray(r, dtype=float)
        du = np.zeros_like(r)
        for alpha, coeff in self.terms:
            beta = 1.0 if alpha < 0 else -1.0
            du = du - coeff * beta * alpha * r ** (alpha - 1.0)
        return du


def _pair_geometry(state: PhaseState):
    """Pairwise displacement vectors and distances, raising on coincidence."""
    pos = state.positions
    diff = pos[:, None, :] - pos[None, :, :]  # diff[i, j] = r_i - r_j
    dist = np.hypot(diff[..., 0], diff[..., 1])
    n = pos.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    bad = dist[iu, ju] == 0.0
    if np.any(bad):
        k = int(np.argmax(bad))
        raise CoincidentBodiesError(int(iu[k]), int(ju[k]))
    return diff, dist


def potential_energy(state: PhaseState, masses: MassSystem, pot: PotentialSpec) -> float:
    """Total potential energy U of the state.

    Raises CoincidentBodiesError if any pair separation is zero.
    """
    _, dist = _pair_geometry(state)
    m = masses.masses
    iu, ju = np.triu_indices(len(m), k=1)
    mm = m[iu] * m[ju]
    return float(np.sum(mm * pot.pair_energy(dist[iu, ju])))


def grad_potential(state: PhaseState, masses: MassSystem, pot: PotentialSpec) -> np.ndarray:
    """Gradient dU/dr_i for every body, shape (n, 2).

    The force on body i is the negative of row i.  Pair contributions are
    accumulated antisymmetrically so the rows sum to zero to roundoff.
    """
    diff, dist = _pair_geometry(state)
    m = masses.masses
    n = len(m)
    np.fill_diagonal(dist, 1.0)  # masked below, avoids 0**alpha warnings
    dudr = pot.pair_energy_derivative(dist) * (m[:, None] * m[None, :])
    np.fill_diagonal(dudr, 0.0)
    # dU/dr_i = sum_j u'(r_ij) * (r_i - r_j) / r_ij
    coef = dudr / dist
    return np.einsum("ij,ijk->ik", coef, diff)


def kinetic_energy(state: PhaseState, masses: MassSystem) -> float:
    """T = (1/2) sum m_i |v_i|^2, nonnegative."""
    v = state.velocities
    return 0.5 * float(np.sum(masses.masses * (v[:, 0] ** 2 + v[:, 1] ** 2)))


def moment_of_inertia(state: PhaseState, masses: MassSystem) -> float:
    """I = sum m_i |r_i|^2 about the barycenter."""
    r = state.positions
    return float(np.sum(masses.masses * (r[:, 0] ** 2 + r[:, 1] ** 2)))


def moment_of_inertia_pairwise(state: PhaseState, masses: MassSystem) -> float:
    """The same I written in mutual distances: (1/2M) sum_ij m_i m_j r_ij^2.

    Agrees with moment_of_inertia on barycentric states; kept as an
    independent cross-check and as the form used on the ordering planes.
    """
    pos = state.positions
    diff = pos[:, None, :] - pos[None, :, :]
    sq = diff[..., 0] ** 2 + diff[..., 1] ** 2
    m = masses.masses
    return float(np.einsum("i,j,ij->", m, m, sq) / (2.0 * masses.total_mass))


def angular_momentum(state: PhaseState, masses: MassSystem):
    """Per-body and total z angular momentum.

    Returns (K, K_body) where K_body[i] = m_i (x_i vy_i - y_i vx_i) and
    K is their plain sum.
    """
    r, v = state.positions, state.velocities
    k_body = masses.masses * (r[:, 0] * v[:, 1] - r[:, 1] * v[:, 0])
    return float(np.sum(k_body)), k_body


def radial_product(state: PhaseState, masses: MassSystem) -> float:
    """J = sum m_i r_i . v_i; equal to half the time derivative of I."""
    r, v = state.positions, state.velocities
    return float(np.sum(masses.masses * (r[:, 0] * v[:, 0] + r[:, 1] * v[:, 1])))


def sundman_gap(state: PhaseState, masses: MassSystem) -> float:
    """2*T*I - J^2 - K^2.

    Nonnegative up to roundoff for every planar state; zero exactly on
    rigidly rotating collinear states and on states with zero velocity.
    """
    T = kinetic_energy(state, masses)
    I = moment_of_inertia(state, masses)
    J = radial_product(state, masses)
    K, _ = angular_momentum(state, masses)
    return 2.0 * T * I - J * J - K * K


def collinearity_residual(state: PhaseState) -> float:
    """Scale-invariant distance of the configuration from a line through the origin.

    Uses the principal axis of the unweighted second-moment matrix
    S = sum r_i r_i^T, so the residual depends only on the point set.  With
    e the dominant eigenvector it is max_i |r_i x e| / max_j |r_j|: zero
    exactly for collinear configurations, invariant under rotation and
    rescaling, and O(1) for fat shapes.
    """
    r = state.positions
    scale = state.scale()
    if scale == 0.0:
        return 0.0
    s_xx = float(np.sum(r[:, 0] * r[:, 0]))
    s_xy = float(np.sum(r[:, 0] * r[:, 1]))
    s_yy = float(np.sum(r[:, 1] * r[:, 1]))
    smat = np.array([[s_xx, s_xy], [s_xy, s_yy]])
    w, vecs = np.linalg.eigh(smat)
    e = vecs[:, np.argmax(w)]
    cross = np.abs(r[:, 0] * e[1] - r[:, 1] * e[0])
    return float(np.max(cross) / scale)


def omega_estimate(state: PhaseState, masses: MassSystem) -> float:
    """Global angular rate K/I.

    For rigid or collinear rotating states this is the shared angular
    velocity; it stays well defined when a body sits at the center, where
    the per-body rate K_i/(m_i r_i^2) degenerates.
    """
    I = moment_of_inertia(state, masses)
    if I <= 0.0:
        raise DegenerateConfigurationError("moment of inertia is zero")
    K, _ = angular_momentum(state, masses)
    return K / I


def torque_per_body(state: PhaseState, masses: MassSystem, pot: PotentialSpec) -> np.ndarray:
    """z-component of r_i x F_i with F_i = -dU/dr_i, shape (n,).

    All components vanish on collinear configurations (forces point along
    the line), which is why per-body angular momenta are conserved there.
    """
    grad = grad_potential(state, masses, pot)
    r = state.positions
    return -(r[:, 0] * grad[:, 1] - r[:, 1] * grad[:, 0])


@dataclass(frozen=True)
class Diagnostics:
    """All instantaneous scalar diagnostics of one state."""

    U: float
    T: float
    H: float
    I: float
    K: float
    K_body: np.ndarray
    J: float
    sundman_gap: float
    collinearity: float
    omega: float


def compute_diagnostics(state: PhaseState, masses: MassSystem, pot: PotentialSpec) -> Diagnostics:
    """Evaluate every diagnostic of the state in one pass.

    H is formed as T + U and K as the sum of K_body, so the corresponding
    identities hold exactly as computed.
    """
    U = potential_energy(state, masses, pot)
    T = kinetic_energy(state, masses)
    I = moment_of_inertia(state, masses)
    K, k_body = angular_momentum(state, masses)
    K = float(np.sum(k_body))
    J = radial_product(state, masses)
    kb = np.array(k_body)
    kb.setflags(write=False)
    return Diagnostics(
        U=U,
        T=T,
        H=T + U,
        I=I,
        K=K,
        K_body=kb,
        J=J,
        sundman_gap=2.0 * T * I - J * J - K * K,
        collinearity=collinearity_residual(state),
        omega=(K / I) if I > 0 else math.nan,
    )
