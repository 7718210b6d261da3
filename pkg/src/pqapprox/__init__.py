"""Revised (p,q)-Bernstein operators, their r-th order generalization, exact
moment identities and convergence experiments."""

from .pq_core import (
    Mode,
    PQInt,
    PQParams,
    parse_scalar,
    pq_binomial,
    pq_derivative_numeric,
    pq_derivative_poly,
    pq_factorial,
    pq_int,
    pq_power_rising,
)
from .ratpoly import RatPoly
from .operators import (
    BasisWeights,
    FunctionBundle,
    NodeSet,
    apply,
    apply_grid,
    apply_higher,
    apply_higher_grid,
    apply_poly,
    basis_weights,
    classical_bernstein_oracle,
    nodes,
    q_bernstein_oracle,
    weight_matrix,
)
from .moments import (
    ConstantEstimate,
    MomentDecomposition,
    MomentPoly,
    StructureViolation,
    absolute_moment,
    central_moment_ordinary,
    central_moment_pq,
    estimate_constants,
    lemma2_residual,
    lemma3_decompose,
)
from .convergence import (
    DegenerateFit,
    ExperimentRecord,
    ParamSequence,
    RateFit,
    fit_rate,
    make_sequence,
    modulus,
    run_bound_experiment,
    theorem10_check,
    voronovskaja_table,
)
from .kernels import BACKEND

__version__ = "0.1.0"
