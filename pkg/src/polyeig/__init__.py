"""polyeig: extreme eigenvalues of Hermitian matrix polynomials.

A library and CLI for computing the smallest positive-type eigenvalue of
definite matrix pencils (lambda B - A) and hyperbolic quadratic polynomials
(lambda^2 A + lambda B + C) by a locally optimal preconditioned extended CG
iteration, with a steepest-descent baseline, a theoretical convergence-rate
predictor, and inertia-based verification oracles that are fully independent
of the iterative path.
"""

from .exceptions import (
    AssumptionViolatedError,
    BadBracketError,
    DegenerateProjectorError,
    DegenerateSpectrumError,
    EmptyBasisError,
    EmptyWindowError,
    NoAdmissibleStartError,
    NoRitzValueError,
    NotDefiniteError,
    NotHyperbolicError,
    NotInDomainError,
    OnEigenvalueError,
    ParseError,
    PolyeigError,
    PreconditionerBreakdownError,
    ProblemTooLargeError,
    SingularMatrixError,
)
from .linalg import InertiaCount, herm_eig, inertia, orthonormalize, solve_hermitian
from .matpoly import (
    HermMatrixPolynomial,
    Interval,
    ObliqueProjector,
    deflated_eval,
    divided_difference,
    oblique_projection,
)
from .precond import Preconditioner, coefficient_preconditioner
from .problems import (
    ProblemBundle,
    definite_pencil,
    prescribed_hyperbolic,
    symmetric_spectrum,
    wiresaw1,
)
from .rate import (
    RatePrediction,
    eta_from_sd,
    per_step_ratios,
    predicted_error_sequence,
    predicted_eta,
    rate_prediction,
    spectral_constants,
    two_step_rate_check,
)
from .rayleigh import RayleighEvaluation, normalized_residual, rayleigh_quotient
from .ritz import ProjectedPolynomial, RitzSelection, project, select_smallest_proper, solve_small
from .solver import (
    SolveResult,
    SolverConfig,
    SolverState,
    TraceRow,
    build_subspace,
    check_linesearch_identities,
    solve,
    step,
)
from .verify import bisect_lambda1, brute_force_eigs, count_eigs_upto

__version__ = "0.1.0"
