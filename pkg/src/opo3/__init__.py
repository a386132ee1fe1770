"""Stochastic simulator and analytics for a three-mode optical parametric
oscillator below threshold, in the positive-P representation.

The package integrates the full nonlinear Ito equations for the pump and
the two down-converted modes, estimates centered quadrature and amplitude
moments up to fourth order with jackknife errors, evaluates the matching
perturbative closed forms, and tests a generalized Cauchy-Schwarz
inequality that certifies nonclassical tripartite correlations.
"""

from .model import (
    DomainError,
    ModelParams,
    PhaseSpaceState,
    QuadratureSample,
    ValidityError,
    alpha_to_quadratures,
    derive_params,
    drift_and_diffusion,
    fixed_point,
    quadratures_to_alpha,
)
from .analytic import (
    CsSides,
    OuCovariances,
    SecondMoments,
    TripleCorrelations,
    ZerothOrder,
    amplitude_pair,
    amplitude_quartic,
    amplitude_single,
    amplitude_triple,
    analytic_moment_report,
    cs_sides_analytic,
    ou_covariances,
    pump_mean_shift,
    second_moments,
    triple_correlations,
    zeroth_order,
)
from .moments import (
    ChannelSpec,
    JackknifeResult,
    MomentAccumulator,
    MomentEstimate,
    MomentReport,
    MomentSchema,
    NoSamplesError,
    SchemaError,
    TargetSpec,
    accumulate,
    amplitude_schema,
    finalize,
    merge,
    opo_schema,
    state_channels,
)
from .engine import (
    EnsembleResult,
    NoiseIncrement,
    ResolvedConfig,
    SimConfig,
    TrajectoryResult,
    integrate_batch,
    run_ensemble,
    sample_wiener_increments,
    simulate_trajectory,
    step_euler_maruyama,
)
from .criteria import (
    AuditResult,
    CriterionReport,
    OddMomentResult,
    WitnessResult,
    cs_running_average,
    cs_test,
    pair_audit,
    pump_odd_moment,
    separability_witness,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ModelParams",
    "PhaseSpaceState",
    "QuadratureSample",
    "ValidityError",
    "alpha_to_quadratures",
    "derive_params",
    "drift_and_diffusion",
    "fixed_point",
    "quadratures_to_alpha",
    "CsSides",
    "OuCovariances",
    "SecondMoments",
    "TripleCorrelations",
    "ZerothOrder",
    "amplitude_pair",
    "amplitude_quartic",
    "amplitude_single",
    "amplitude_triple",
    "analytic_moment_report",
    "cs_sides_analytic",
    "ou_covariances",
    "pump_mean_shift",
    "second_moments",
    "triple_correlations",
    "zeroth_order",
    "ChannelSpec",
    "JackknifeResult",
    "MomentAccumulator",
    "MomentEstimate",
    "MomentReport",
    "MomentSchema",
    "NoSamplesError",
    "SchemaError",
    "TargetSpec",
    "accumulate",
    "amplitude_schema",
    "finalize",
    "merge",
    "opo_schema",
    "state_channels",
    "EnsembleResult",
    "NoiseIncrement",
    "ResolvedConfig",
    "SimConfig",
    "TrajectoryResult",
    "integrate_batch",
    "run_ensemble",
    "sample_wiener_increments",
    "simulate_trajectory",
    "step_euler_maruyama",
    "AuditResult",
    "CriterionReport",
    "OddMomentResult",
    "WitnessResult",
    "cs_running_average",
    "cs_test",
    "pair_audit",
    "pump_odd_moment",
    "separability_witness",
    "__version__",
]
