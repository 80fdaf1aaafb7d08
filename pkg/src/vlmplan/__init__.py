"""Deterministic planning for native-resolution multimodal training pipelines."""

from .balance import Assignment, WorkItem, balance_lpt, group_balance, imbalance
from .errors import (
    InvalidInputError,
    OversizeItemError,
    PlanningError,
    RegionParseError,
    RegionRangeError,
    SingularFitError,
    UndefinedMetricError,
)
from .geometry import CostModel, ImagePlan, flops_cost, plan_image
from .loadsim import IoReport, Topology, partition_from_assignment, simulate_io
from .packing import PackItem, PackPlan, attention_allowed, pack_ffd
from .regions import (
    Box3d,
    NormalizedBox,
    NormalizedPoint,
    emit_region,
    normalize_box,
    normalize_point,
    parse_region,
)
from .rope2d import PatchPosition, RopeParams, rope_dot, rope_rotate
from .scaling import (
    CHARTQA_VS_OCR_LOSS,
    GROUNDING_LOSS_VS_TOKENS,
    INFOVQA_VS_OCR_LOSS,
    OCR_LOSS_VS_TOKENS,
    MetricFit,
    PowerLawFit,
    fit_line,
    predict_loss,
    predict_metric,
)
from .video import (
    SamplingPolicy,
    TaskKind,
    VideoPlan,
    choose_fps,
    level_to_dims,
    plan_video,
    timestamp_token,
)

__version__ = "0.1.0"
