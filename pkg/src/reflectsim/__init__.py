"""Two-sided reflected Levy processes on a grid: discretization error,
limit-gap sampling, and sample rectification."""

from ._version import __version__
from .errors import ParameterError
from .models import (
    Brownian,
    Drift,
    LevyModel,
    RegularityFlags,
    StrictlyStable,
    classify_regularity,
    is_monotone,
    model_from_dict,
    model_to_dict,
    sample_brownian_increment,
    sample_increments,
    sample_stable_increment,
    self_similarity_index,
    small_time_scaling,
    zoom_limit_params,
)
from .reflection import (
    ReflectionOutcome,
    SkeletonPath,
    coarsen,
    has_clean_switching,
    reflect_many,
    reflect_one_sided,
    reflect_two_sided,
)
from .moments import (
    StableMomentInputs,
    expected_positive_part,
    expected_v,
    expected_vn,
    gamma_function,
    positivity_parameter,
    zeta_unit_interval,
)
from .vlimit import (
    BesselBrownian,
    Monotone,
    StableNested,
    VSamplerSpec,
    default_v_sampler,
    draw_v,
    sample_v_batch,
    sample_v_brownian,
    sample_v_monotone,
    sample_v_stable,
)
from .rectify import (
    RectifyPolicy,
    apply_rectification,
    mean_shift_reference,
    rectify_samples,
)
from .stats import (
    DensityGrid,
    kde_gaussian,
    ks_critical_value,
    ks_two_sample,
    mc_summary,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    VStudyConfig,
    run_error_experiment,
    run_v_study,
)
from .streams import substream

__all__ = [
    "__version__",
    "ParameterError",
    "Brownian",
    "StrictlyStable",
    "Drift",
    "LevyModel",
    "RegularityFlags",
    "classify_regularity",
    "is_monotone",
    "model_from_dict",
    "model_to_dict",
    "sample_brownian_increment",
    "sample_stable_increment",
    "sample_increments",
    "self_similarity_index",
    "small_time_scaling",
    "zoom_limit_params",
    "SkeletonPath",
    "ReflectionOutcome",
    "reflect_two_sided",
    "reflect_one_sided",
    "reflect_many",
    "coarsen",
    "has_clean_switching",
    "StableMomentInputs",
    "zeta_unit_interval",
    "gamma_function",
    "positivity_parameter",
    "expected_positive_part",
    "expected_v",
    "expected_vn",
    "BesselBrownian",
    "StableNested",
    "Monotone",
    "VSamplerSpec",
    "default_v_sampler",
    "draw_v",
    "sample_v_brownian",
    "sample_v_stable",
    "sample_v_monotone",
    "sample_v_batch",
    "RectifyPolicy",
    "rectify_samples",
    "apply_rectification",
    "mean_shift_reference",
    "DensityGrid",
    "ks_two_sample",
    "ks_critical_value",
    "kde_gaussian",
    "mc_summary",
    "ExperimentConfig",
    "ExperimentReport",
    "run_error_experiment",
    "VStudyConfig",
    "run_v_study",
    "substream",
]
