"""Two engines for the same two-spin experiment, under the same Bell test.

`quantum` evolves a pair of qubits prepared in spin coherent states under the
diagonal Jz x Jz coupling and measures entanglement through reduced-state
purities.  `classical` propagates a phase-space probability density along the
corresponding Hamiltonian flow and measures the analogous inseparability of
its marginals.  `chsh` maximizes the CHSH combination over measurement
settings for either engine's correlation matrix, and `reference` carries the
closed-form expressions both engines are tested against.
"""

from .spinspace import (
    CoherentLabel,
    Direction,
    PhasePoint,
    classical_spin,
    direction_to_cartesian,
    phase_point_from_w,
    w_from_phase_point,
)
from .quantum import (
    CorrelationMatrix,
    DensityMatrix2,
    PureStateJ,
    SpinConvention,
    TwoQubitState,
    coherent_state,
    correlation_function_q,
    cq_numeric,
    evolve,
    husimi_reduced,
    pauli_correlation_matrix,
    product_state,
    purity,
    reduce,
    spin_expectation,
    spin_variance,
)
from .classical import (
    ClassicalCorrelationMatrix,
    DistributionSpec,
    FlowMap,
    QuadratureConvergenceError,
    QuadratureSpec,
    ccl_numeric,
    classical_correlation_matrix,
    classical_first_moments,
    classical_purity,
    correlation_function_cl,
    evolved_density,
    f_kernel,
    flow,
    integrate_phase_space,
    marginal_density,
    pdelta,
)
from .chsh import (
    BmaxResult,
    DegenerateNormalizationError,
    MeasurementSetting,
    ObservableBounds,
    TSIRELSON,
    bmax_closed_form,
    bmax_optimize,
    chsh_classical_bound,
    chsh_value,
    violation_quantifier,
)
from .reference import (
    SeparabilityParams,
    ccl_closed,
    ccl_limit,
    corr_uv_closed,
    cq_closed_p,
    cq_closed_w,
    gamma_factors,
    short_time_coeffs,
)

__version__ = "0.1.0"
