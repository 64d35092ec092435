"""Constrained Bayesian inference via posterior projections.

Sample an unconstrained conjugate posterior, map every draw to the nearest
point of the constrained set (closed convex sets, or orthonormal frames via
the polar factor), and work with the pushforward distribution: boundary
atoms and all.  The package bundles the projection operators, the dual
active-set quadratic-programming engine behind polytope projections, the
conjugate samplers the experiments need, closed forms for the
interval-projected Gaussian posterior, and contraction/mixing diagnostics.
"""

from .analytic import (
    BoundaryPrior,
    DensityGrid,
    ProjectedGaussianMixture,
    bayes_update_boundary_prior,
    density_grid,
    induced_prior_weights,
    projected_gaussian_posterior,
    projected_mixture_mean,
    truncated_posterior_mean,
)
from .constraints import (
    Box,
    ConstraintSet,
    Interval,
    OrderedTable,
    Polytope,
    Simplex,
    Sphere,
    Stiefel,
    ordered_table_polytope,
)
from .diagnostics import (
    ParameterSummary,
    SummaryReport,
    credible_interval,
    effective_sample_size,
    lag1_autocorrelation,
    mad_fit,
)
from .errors import (
    ConvergenceError,
    DegenerateUpdateError,
    InfeasibleError,
    NonUniqueProjectionError,
)
from .experiments import (
    ContractionReport,
    contraction_curve,
    run_contingency,
    run_gaussian_demo,
    run_sphere_demo,
    run_stiefel_demo,
)
from .projections import (
    SampleBatch,
    TruncationResult,
    project_box,
    project_interval,
    project_ordered_table,
    project_point,
    project_polytope,
    project_simplex,
    project_sphere,
    pushforward,
    rejection_truncate,
)
from .qp import KKTResiduals, QPProblem, QPSolution, kkt_residuals, solve_qp
from .samplers import (
    GaussianPosterior,
    RngStream,
    gaussian_conjugate_update,
    sample_dirichlet,
    sample_normal,
    sample_truncated_normal,
    sample_vmf,
    vmf_posterior_update,
)
from .stiefel import (
    StiefelPoint,
    SVDResult,
    is_on_stiefel,
    project_stiefel,
    spectral_rescale,
    svd_thin,
)

__version__ = "0.1.0"
