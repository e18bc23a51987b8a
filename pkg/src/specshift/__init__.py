"""Third-order Taylor remainders of Hermitian matrix functions and the
spectral shift density that represents them against third derivatives."""

from .exceptions import (
    DimensionMismatchError,
    FunctionDomainError,
    FunctionSpecError,
    NonHermitianError,
    PreimageConsistencyError,
    QuadratureWarning,
    TailBoundError,
)
from .functions import GaussianPacket, GridFunction, Polynomial, ScalarFunction, monomial
from .quadrature import QuadratureRule, converge_by_doubling, gauss_legendre, simplex_integral
from .spectral import (
    HermitianOperator,
    PairMeasure,
    SpectralDecomposition,
    apply_function,
    eig,
    pair_measure,
    schatten_norm,
)
from .derivatives import (
    DerivativeRequest,
    d1_divdiff,
    d1_poly,
    d2_divdiff,
    d2_poly,
    evaluate_derivative,
    remainder_simplex_poly,
    remainder_trace,
)
from .pinching import (
    BlockStructureWarning,
    PinchDecomposition,
    commutator,
    path_decomposition,
    pinch,
    resolvent_pinch,
    solve_commutator_preimage,
)
from .shift_density import (
    DoiKernel,
    EtaDensity,
    SupportInterval,
    TraceFormulaCheck,
    doi_trace,
    eta_density,
    eta_moment,
    simplex_doi_difference,
    support_bounds,
    tent_kernel,
    trace_formula_residual,
)
from .fourier_path import (
    FourierFunction,
    d1_fourier,
    d2_fourier,
    remainder_fourier,
    unitary_evolution,
    weighted_l1_norm,
)

__version__ = "0.1.0"
