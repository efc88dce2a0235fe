"""Verification laboratory for weighted conditional-expectation operators
on finite measure spaces.

Closed-form results about operators of the shape f -> w * E(u f), with E
the block-averaging conditional expectation, are built as dense matrices
and certified against independent dense linear-algebra oracles: norm
formula, partial-isometry criterion, functional calculus of the Gram
products, polar decomposition, Aluthge transform, spectral decomposition
of averaged multiplication operators, and the projection-valued measures
induced by point maps.
"""

from .checks import CHECK_GROUPS, CheckRecord, Tolerances
from .condexp import CondExp, cond_exp, cond_exp_operator, cond_exp_values
from .errors import (
    ConfigInvalidError,
    EmptySpaceError,
    NonpositiveWeightError,
    NotAPartitionError,
    NotFiberMeasurableError,
    NotMeasurableError,
    NotNormalError,
    NotPositiveError,
    NotSelfAdjointError,
    ParseError,
    SpaceMismatchError,
    WceLabError,
)
from .generator import (
    GeneratorConfig,
    gen_instance,
    perturb_nonmeasurable,
    random_point_map,
    rotation_config,
)
from .instance_io import (
    InstanceBundle,
    instance_digest,
    parse_instance,
    serialize_instance,
)
from .measure import (
    FiniteMeasureSpace,
    MeasurableFunction,
    Partition,
    coarsest_partition,
    finest_partition,
    is_measurable,
    make_partition,
    make_space,
    support,
)
from .opalgebra import (
    EigenSystem,
    WeightedOperator,
    func_calc_oracle,
    hermitian_eig,
    kernel_projection,
    normal_func_calc_oracle,
    op_deviation,
    operator_norm,
    polar_oracle,
    positive_sqrt,
    weighted_adjoint,
)
from .spectral import (
    PointMap,
    SpectralAxiomReport,
    SpectralDecomp,
    SpectralMeasureTable,
    avg_mult_operator,
    avg_mult_spectrum,
    check_spectral_axioms,
    cont_func_calc,
    fiber_partition,
    is_normal_avg_mult,
    pushforward_density,
    reconstruct_from_measure,
    spectral_decomposition,
    spectral_measure,
    star_poly_calc,
)
from .suite import VerificationReport, run_suite
from .wce import (
    PolarParts,
    WceInstance,
    build_operator,
    check_vanishing,
    closed_abs_sqrt,
    closed_aluthge,
    closed_func_calc_cogram,
    closed_func_calc_gram,
    closed_polar,
    make_instance,
    norm_formula,
    partial_isometry_criterion,
    w_algebra_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
