"""Rotary position encoding over 2D patch-grid coordinates.

The head dimension splits in half: the first half rotates by angles derived
from the patch's x (column) coordinate, the second half from y (row).
Within each half, adjacent coordinate pairs (2i, 2i+1) form rotation planes
with the usual geometric frequency ladder base**(-2i / half_dim). Rotations
are length-preserving, and the inner product of two rotated vectors depends
only on the difference of their grid positions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class RopeParams:
    head_dim: int
    base: float = 10000.0

    def __post_init__(self):
        if self.head_dim <= 0 or self.head_dim % 4 != 0:
            raise InvalidInputError(
                f"head_dim must be a positive multiple of 4, got {self.head_dim}"
            )
        if not self.base > 1:
            raise InvalidInputError(f"base must exceed 1, got {self.base}")


@dataclass(frozen=True)
class PatchPosition:
    """Grid coordinates of a patch: x is the column, y the row."""

    x: int
    y: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise InvalidInputError(f"patch coordinates must be non-negative, got {self}")


def _xy(pos) -> tuple[float, float]:
    if isinstance(pos, PatchPosition):
        return float(pos.x), float(pos.y)
    x, y = pos
    return float(x), float(y)


def _pair_angles(pos, params: RopeParams) -> np.ndarray:
    # One angle per rotation plane: x angles for the first half of the
    # vector, y angles for the second.
    x, y = _xy(pos)
    half = params.head_dim // 2
    freqs = params.base ** (-2.0 * np.arange(half // 2, dtype=np.float64) / half)
    return np.concatenate([x * freqs, y * freqs])


def rope_rotate(v, pos, params: RopeParams) -> np.ndarray:
    """Rotate a head-dim vector by its patch position.

    Accepts any real sequence of length ``params.head_dim`` and a
    ``PatchPosition`` or ``(x, y)`` pair; returns a float64 array.
    """
    vec = np.asarray(v, dtype=np.float64)
    if vec.shape != (params.head_dim,):
        raise InvalidInputError(
            f"vector length {vec.size} does not match head_dim {params.head_dim}"
        )
    angles = _pair_angles(pos, params)
    cos = np.cos(angles)
    sin = np.sin(angles)
    even = vec[0::2]
    odd = vec[1::2]
    out = np.empty_like(vec)
    out[0::2] = even * cos - odd * sin
    out[1::2] = even * sin + odd * cos
    return out


def rope_dot(q, k, pos_q, pos_k, params: RopeParams) -> float:
    """Inner product of two position-rotated vectors.

    Depends only on the relative displacement pos_q - pos_k, which is the
    property that makes the encoding useful.
    """
    return float(np.dot(rope_rotate(q, pos_q, params), rope_rotate(k, pos_k, params)))
