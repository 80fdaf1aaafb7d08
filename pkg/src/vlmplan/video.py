"""Budgeted video planning: frame rate, frame times, and per-frame token level.

A video is sampled at a task-dependent frame rate, then every sampled frame
gets the same tokens-per-frame level, chosen as the largest predefined level
that keeps the whole video inside a fixed token budget. If even the smallest
level cannot cover all sampled frames, the planner falls back to uniform
striding over the sampled frames so the full duration stays represented.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidInputError


class TaskKind(str, Enum):
    GENERAL = "general"
    TEMPORAL_DETAIL = "temporal_detail"
    DENSE_MOTION = "dense_motion"


@dataclass(frozen=True)
class SamplingPolicy:
    """Frame-rate map, token budget, and tokens-per-frame levels."""

    default_fps: float = 1.0
    detailed_fps: float = 2.0
    dense_fps: float = 5.0
    budget: int = 81920
    levels: tuple[int, ...] = (640, 512, 384, 256, 160, 128)

    def __post_init__(self):
        for name in ("default_fps", "detailed_fps", "dense_fps"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be positive")
        if not self.levels:
            raise InvalidInputError("levels must be non-empty")
        if any(level < 1 for level in self.levels):
            raise InvalidInputError("levels must be positive")
        if any(a <= b for a, b in zip(self.levels, self.levels[1:])):
            raise InvalidInputError("levels must be strictly descending")
        if self.budget < self.levels[-1]:
            raise InvalidInputError("budget must cover at least one minimum-level frame")


DEFAULT_POLICY = SamplingPolicy()


@dataclass(frozen=True)
class VideoPlan:
    frame_count: int
    frame_times: tuple[float, ...]
    level: int  # tokens per frame
    total_tokens: int
    fallback_applied: bool


def choose_fps(task_kind, policy: SamplingPolicy = DEFAULT_POLICY) -> float:
    """Frame rate for a task: 1 fps in general, 2 for temporal detail, 5 for dense motion."""
    try:
        kind = TaskKind(task_kind)
    except ValueError:
        raise InvalidInputError(f"unknown task kind {task_kind!r}") from None
    return {
        TaskKind.GENERAL: policy.default_fps,
        TaskKind.TEMPORAL_DETAIL: policy.detailed_fps,
        TaskKind.DENSE_MOTION: policy.dense_fps,
    }[kind]


def plan_video(duration: float, fps: float, policy: SamplingPolicy = DEFAULT_POLICY) -> VideoPlan:
    """Plan frame times and the tokens-per-frame level for one video.

    Nominal frames sit at interval centers (k + 0.5) / fps. The level is the
    largest one fitting all nominal frames in the budget; otherwise the
    smallest level is kept and floor(budget / level) frames are selected by
    uniform index striding (fallback_applied=True).
    """
    if duration <= 0:
        raise InvalidInputError(f"duration must be positive, got {duration}")
    if fps <= 0:
        raise InvalidInputError(f"fps must be positive, got {fps}")
    nominal = max(1, math.floor(duration * fps))
    level = next((lv for lv in policy.levels if nominal * lv <= policy.budget), None)
    if level is not None:
        indices = range(nominal)
        frame_count = nominal
        fallback = False
    else:
        level = policy.levels[-1]
        frame_count = policy.budget // level
        indices = (j * nominal // frame_count for j in range(frame_count))
        fallback = True
    times = tuple(_frame_time(k, fps, duration) for k in indices)
    return VideoPlan(
        frame_count=frame_count,
        frame_times=times,
        level=level,
        total_tokens=frame_count * level,
        fallback_applied=fallback,
    )


def _frame_time(k: int, fps: float, duration: float) -> float:
    t = (k + 0.5) / fps
    # A video shorter than one sampling interval still yields one frame;
    # place it mid-video so the time stays inside [0, duration).
    return t if t < duration else duration / 2.0


def level_to_dims(level: int, aspect: float) -> tuple[int, int]:
    """Frame resolution for a token level, as a multiple-of-28 width and height.

    Picks the patch-pair grid (gw, gh) with gw * gh <= level whose shape
    ratio gw / gh is closest to the requested aspect; among equally close
    grids the larger one wins, then the wider one.
    """
    if level < 1:
        raise InvalidInputError(f"level must be positive, got {level}")
    if aspect <= 0:
        raise InvalidInputError(f"aspect must be positive, got {aspect}")
    best_key = None
    best = (1, 1)
    for gh in range(1, level + 1):
        max_gw = level // gh
        # The deviation |gw/gh - aspect| is V-shaped in gw, so only grid
        # widths adjacent to aspect*gh (clamped to capacity) can win.
        center = int(aspect * gh)
        for gw in {
            min(max_gw, max(1, center - 1)),
            min(max_gw, max(1, center)),
            min(max_gw, max(1, center + 1)),
            min(max_gw, max(1, center + 2)),
        }:
            key = (abs(gw / gh - aspect), -gw * gh, -gw)
            if best_key is None or key < best_key:
                best_key = key
                best = (gw, gh)
    gw, gh = best
    return 28 * gw, 28 * gh


def timestamp_token(t: float) -> str:
    """Timestamp text prepended to a frame, e.g. ``[1.5 second]``."""
    if t < 0:
        raise InvalidInputError(f"timestamp must be non-negative, got {t}")
    return f"[{t:.1f} second]"
