"""Path space: discretized paths, crossing partitions, quadratic variation and samplers."""

from .diagnostics import XiReport, XiSettings, check_xi_c, holder_constant
from .model import (
    CrossingPartition,
    PathEnsemble,
    PathSet,
    PredictionSetSpec,
    QvPath,
    SamplePath,
    SamplerLaw,
    require_same_grid,
    same_grid,
)
from .partition import crossing_partition, crossing_stops, first_exit, merge_stops
from .sampling import (
    BrownianLaw,
    DeterministicLaw,
    TimeChangedBrownianLaw,
    deterministic_ensemble,
    parse_measure_tag,
    path_rng,
    sample_ensemble,
    uniform_grid,
)
from .variation import (
    QvEstimate,
    QvSettings,
    QvSource,
    qv_at_level,
    qv_from_partition,
    qv_of,
    quadratic_variation,
    realized_variance,
    ss_process,
)

__all__ = [
    "BrownianLaw",
    "CrossingPartition",
    "DeterministicLaw",
    "PathEnsemble",
    "PathSet",
    "PredictionSetSpec",
    "QvEstimate",
    "QvPath",
    "QvSettings",
    "QvSource",
    "SamplePath",
    "SamplerLaw",
    "TimeChangedBrownianLaw",
    "XiReport",
    "XiSettings",
    "check_xi_c",
    "crossing_partition",
    "crossing_stops",
    "deterministic_ensemble",
    "first_exit",
    "holder_constant",
    "merge_stops",
    "parse_measure_tag",
    "path_rng",
    "qv_at_level",
    "qv_from_partition",
    "qv_of",
    "quadratic_variation",
    "realized_variance",
    "require_same_grid",
    "same_grid",
    "sample_ensemble",
    "ss_process",
    "uniform_grid",
]
