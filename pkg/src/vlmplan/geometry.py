"""Native-resolution image geometry.

Images keep (approximately) their own resolution: each axis snaps to the
nearest multiple of 28 px, the snapped image splits into 14x14 px patches,
and a 2x2 pooling step turns every four patches into one downstream token.
This module computes those counts and the per-image FLOPS estimate used by
the workload balancer; it never touches pixel data.
"""

from dataclasses import dataclass

from .errors import InvalidInputError

PATCH_SIZE = 14
GRID_MULTIPLE = 28  # two patches per axis; one pooled token per 28x28 block


@dataclass(frozen=True)
class ImagePlan:
    """Resolved geometry for one image."""

    native_w: int
    native_h: int
    target_w: int
    target_h: int
    patch_grid_w: int
    patch_grid_h: int
    patch_count: int  # pre-pool patches
    token_count: int  # post-pool tokens, always patch_count / 4


@dataclass(frozen=True)
class CostModel:
    """Per-image FLOPS model: alpha per patch plus beta per patch pair.

    cost(n) = alpha * n + beta * n**2 for an image with n patches.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise InvalidInputError("cost coefficients must be non-negative")
        if self.alpha == 0 and self.beta == 0:
            raise InvalidInputError("cost model needs at least one nonzero coefficient")


def _snap(px: int) -> int:
    # Nearest multiple of 28, ties rounding up, never below 28 so every
    # image yields at least one token.
    return GRID_MULTIPLE * max(1, (px + GRID_MULTIPLE // 2) // GRID_MULTIPLE)


def plan_image(native_w: int, native_h: int) -> ImagePlan:
    """Snap a native resolution to the 28 px grid and derive its token counts."""
    if native_w < 1 or native_h < 1:
        raise InvalidInputError(
            f"image dimensions must be positive, got {native_w}x{native_h}"
        )
    target_w = _snap(native_w)
    target_h = _snap(native_h)
    grid_w = target_w // PATCH_SIZE
    grid_h = target_h // PATCH_SIZE
    return ImagePlan(
        native_w=native_w,
        native_h=native_h,
        target_w=target_w,
        target_h=target_h,
        patch_grid_w=grid_w,
        patch_grid_h=grid_h,
        patch_count=grid_w * grid_h,
        token_count=(target_w // GRID_MULTIPLE) * (target_h // GRID_MULTIPLE),
    )


def flops_cost(model: CostModel, patch_count: int) -> float:
    """Estimated FLOPS to encode an image with the given patch count."""
    if patch_count < 0:
        raise InvalidInputError(f"patch count must be non-negative, got {patch_count}")
    n = patch_count
    return model.alpha * n + model.beta * n * n
