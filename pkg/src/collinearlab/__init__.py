"""Numerical laboratory for the collinear n-body problem.

Core pieces: instantaneous diagnostics of planar states (model), an
adaptive high-order integrator (dynamics), a collinear central-configuration
solver (central_config), initial-condition families (scenarios), trajectory
verification reports (verify), and the three-body level-set geometry
(geometry).  The collinearlab CLI fronts all of it.
"""

from .central_config import (
    CollinearConfiguration,
    SolverFailureError,
    cc_residual,
    enumerate_collinear,
    scale_dependence_probe,
    solve_collinear,
)
from .dynamics import (
    ClosePassageError,
    DiagnosticSeries,
    IntegratorConfig,
    StepUnderflowError,
    Trajectory,
    accelerations,
    diagnostics_series,
    integrate,
)
from .geometry import (
    IntersectionResult,
    count_distances,
    count_relations,
    intersect_levels,
    level_values,
    tangency_at_cc,
)
from .model import (
    CoincidentBodiesError,
    DegenerateConfigurationError,
    Diagnostics,
    MassSystem,
    PhaseState,
    PotentialSpec,
    angular_momentum,
    collinearity_residual,
    compute_diagnostics,
    grad_potential,
    kinetic_energy,
    moment_of_inertia,
    omega_estimate,
    potential_energy,
    radial_product,
    sundman_gap,
    torque_per_body,
)
from .scenarios import (
    FIGURE_EIGHT_PERIOD,
    HomographicFit,
    figure_eight_ics,
    fit_homographic,
    homographic_ics,
    non_central_collinear_ics,
    relative_equilibrium_ics,
)
from .verify import (
    HypothesisError,
    Tolerances,
    VerificationReport,
    verify_collinear_homographic,
    verify_constant_inertia,
    verify_generic,
)

__version__ = "0.1.0"
