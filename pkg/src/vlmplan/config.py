"""Built-in planning defaults and the optional TOML config file.

Planner constants (token budget, tokens-per-frame levels, frame-rate map,
cost coefficients) are data: the CLI reads them from an optional config
file, and individual flags override file values.
"""

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidInputError
from .geometry import CostModel
from .video import SamplingPolicy

# Reference encoder shape behind the default cost model: embedding dim 1280,
# 27 transformer blocks, MLP ratio 4.
EMBED_DIM = 1280
DEPTH = 27
MLP_RATIO = 4

# Per-patch work: each block is charged 8*d^2 MACs for attention projections
# and 8*d^2 for the ratio-4 MLP, x2 flops per MAC, x27 blocks.
DEFAULT_COST_ALPHA = float(DEPTH * (8 * EMBED_DIM**2 + 8 * EMBED_DIM**2) * 2)
# Per patch-pair work: 4*d MACs of attention scores/mixing per block, x2, x27.
DEFAULT_COST_BETA = float(DEPTH * 4 * EMBED_DIM * 2)


@dataclass(frozen=True)
class PlannerConfig:
    policy: SamplingPolicy
    cost_model: CostModel


def default_config() -> PlannerConfig:
    return PlannerConfig(
        policy=SamplingPolicy(),
        cost_model=CostModel(alpha=DEFAULT_COST_ALPHA, beta=DEFAULT_COST_BETA),
    )


_TOP_KEYS = {"budget", "levels", "fps", "cost_alpha", "cost_beta"}
_FPS_KEYS = {"general", "temporal_detail", "dense_motion"}


def load_config(path: str) -> PlannerConfig:
    """Read a TOML config file; missing keys keep their built-in defaults."""
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidInputError(f"config file {path}: {exc}") from None
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise InvalidInputError(f"config file {path}: unknown keys {sorted(unknown)}")
    fps = raw.get("fps", {})
    if not isinstance(fps, dict) or set(fps) - _FPS_KEYS:
        raise InvalidInputError(f"config file {path}: fps must map task kinds to rates")
    base = default_config()
    policy = SamplingPolicy(
        default_fps=float(fps.get("general", base.policy.default_fps)),
        detailed_fps=float(fps.get("temporal_detail", base.policy.detailed_fps)),
        dense_fps=float(fps.get("dense_motion", base.policy.dense_fps)),
        budget=int(raw.get("budget", base.policy.budget)),
        levels=tuple(int(v) for v in raw.get("levels", base.policy.levels)),
    )
    cost_model = CostModel(
        alpha=float(raw.get("cost_alpha", base.cost_model.alpha)),
        beta=float(raw.get("cost_beta", base.cost_model.beta)),
    )
    return PlannerConfig(policy=policy, cost_model=cost_model)
