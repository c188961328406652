"""Simulation and Monte Carlo verification of branching Lévy processes."""

from .point_measure import (
    EMPTY,
    RankedPointMeasure,
    Theta,
    superpose,
    translate,
    truncate,
    weighted_integral,
)
from .levy_kernel import (
    ExponentialJump,
    MotionSpec,
    PathSample,
    PointMassJump,
    TruncatedExponentialJump,
    UniformJump,
    censor_spec,
    pathwise_drift,
    phi,
    sample_increment,
)
from .levy_measure import (
    AdmissibilityReport,
    CharacteristicTriple,
    DiscreteOffspringLaw,
    FiniteBirthParams,
    GeometricCascade,
    LambdaComponent,
    LambdaSpec,
    SupportReport,
    check_admissible,
    check_support_negative,
    decompose,
    kappa,
    kappa_params,
    kappa_truncated,
    projected_levy_measure_integral,
    to_characteristic_triple,
    triple_from_dict,
)
from .genealogy import (
    GenealogyForest,
    ParticleRecord,
    RankedPartition,
    UlamLabel,
    ancestor_position,
    ancestral_trajectory,
    partition,
    snapshot,
)
from .simulator import (
    ParticleBudgetError,
    SimulationConfig,
    branching_convolution,
    censor,
    simulate_finite,
    simulate_nested,
    skeleton,
    substream,
)
from .verify import (
    EstimatorReport,
    check_censored_mass,
    check_cumulant,
    check_many_to_one,
    check_martingale_normalization,
    check_pathwise_many_to_one,
    spine_motion,
    standard_suite,
    weighted_intensity,
)

__version__ = "0.1.0"
