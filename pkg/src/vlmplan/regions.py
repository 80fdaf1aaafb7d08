"""Normalized region coordinates and their token grammar.

Box and point coordinates are expressed as integers on a fixed [0, 999]
grid regardless of image resolution. The text forms are bit-exact:

    <bbox>x1 y1 x2 y2</bbox>
    <point>x y</point>
    <3dbbox>x_center y_center z_center x_size y_size z_size pitch yaw roll</3dbbox>

Single spaces, no leading zeros on integers. 3D boxes are carried purely as
syntax; no pose math happens here.
"""

import math
import re
from dataclasses import dataclass, fields

from .errors import InvalidInputError, RegionParseError, RegionRangeError

COORD_MAX = 999

_INT_RE = re.compile(r"0|[1-9][0-9]*")
_NUM_RE = re.compile(r"-?(?:[0-9]+(?:\.[0-9]+)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")


def _check_coord(name: str, value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= COORD_MAX:
        raise RegionRangeError(f"{name}={value} outside 0..{COORD_MAX}")


@dataclass(frozen=True)
class NormalizedBox:
    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        for f in fields(self):
            _check_coord(f.name, getattr(self, f.name))
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise InvalidInputError(f"box corners out of order: {self}")


@dataclass(frozen=True)
class NormalizedPoint:
    x: int
    y: int

    def __post_init__(self):
        _check_coord("x", self.x)
        _check_coord("y", self.y)


@dataclass(frozen=True)
class Box3d:
    """A 3D box as nine numbers: center, size, and Euler angles."""

    x_center: float
    y_center: float
    z_center: float
    x_size: float
    y_size: float
    z_size: float
    pitch: float
    yaw: float
    roll: float

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise InvalidInputError(f"{f.name} must be finite")


def _scale(value: float, dim: int) -> int:
    # Round half up onto the 0..999 grid; the far image edge maps to 999.
    return min(COORD_MAX, max(0, math.floor(value / dim * COORD_MAX + 0.5)))


def _check_pixel(name: str, value: float, dim: int) -> None:
    if not 0 <= value <= dim:
        raise InvalidInputError(f"{name}={value} outside image dimension {dim}")


def normalize_box(px_box, image_w: int, image_h: int) -> NormalizedBox:
    """Map a pixel-space (x1, y1, x2, y2) box onto the [0, 999] grid."""
    if image_w < 1 or image_h < 1:
        raise InvalidInputError(f"image dimensions must be positive, got {image_w}x{image_h}")
    x1, y1, x2, y2 = px_box
    if x1 > x2 or y1 > y2:
        raise InvalidInputError(f"inverted pixel box {px_box!r}")
    for name, value, dim in (("x1", x1, image_w), ("y1", y1, image_h),
                             ("x2", x2, image_w), ("y2", y2, image_h)):
        _check_pixel(name, value, dim)
    return NormalizedBox(
        x1=_scale(x1, image_w),
        y1=_scale(y1, image_h),
        x2=_scale(x2, image_w),
        y2=_scale(y2, image_h),
    )


def normalize_point(px_x: float, px_y: float, image_w: int, image_h: int) -> NormalizedPoint:
    """Map a pixel-space point onto the [0, 999] grid."""
    if image_w < 1 or image_h < 1:
        raise InvalidInputError(f"image dimensions must be positive, got {image_w}x{image_h}")
    _check_pixel("x", px_x, image_w)
    _check_pixel("y", px_y, image_h)
    return NormalizedPoint(x=_scale(px_x, image_w), y=_scale(px_y, image_h))


def to_pixels(value: int, dim: int) -> float:
    """Map a normalized coordinate back to pixel space (value / 999 * dim)."""
    return value / COORD_MAX * dim


def _fmt(value: float) -> str:
    return repr(float(value))


def emit_region(region) -> str:
    """Render a region in its exact text form."""
    if isinstance(region, NormalizedBox):
        return f"<bbox>{region.x1} {region.y1} {region.x2} {region.y2}</bbox>"
    if isinstance(region, NormalizedPoint):
        return f"<point>{region.x} {region.y}</point>"
    if isinstance(region, Box3d):
        body = " ".join(_fmt(getattr(region, f.name)) for f in fields(region))
        return f"<3dbbox>{body}</3dbbox>"
    raise InvalidInputError(f"not a region: {region!r}")


# tag -> (field count, integer-valued)
_TAGS = {"bbox": (4, True), "point": (2, True), "3dbbox": (9, False)}


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def parse_region(text: str):
    """Parse region text back into its value; the exact inverse of emit_region.

    Raises RegionParseError (with the failing byte offset) for malformed
    text and RegionRangeError for coordinates beyond 999.
    """
    if not text.startswith("<"):
        raise RegionParseError(0, "expected '<'")
    tag_end = text.find(">")
    if tag_end == -1:
        raise RegionParseError(_byte_offset(text, len(text)), "unterminated opening tag")
    tag = text[1:tag_end]
    if tag not in _TAGS:
        raise RegionParseError(_byte_offset(text, 1), f"unknown tag {tag!r}")
    arity, integral = _TAGS[tag]
    closing = f"</{tag}>"
    if not text.endswith(closing) or len(text) < tag_end + 1 + len(closing):
        raise RegionParseError(
            _byte_offset(text, len(text)), f"expected closing {closing!r} at end"
        )
    body_start = tag_end + 1
    body = text[body_start : len(text) - len(closing)]
    parts = body.split(" ")
    if len(parts) != arity:
        raise RegionParseError(
            _byte_offset(text, body_start),
            f"<{tag}> takes {arity} fields, found {len(parts)}",
        )
    values = []
    pos = body_start
    for part in parts:
        if integral:
            if not _INT_RE.fullmatch(part):
                raise RegionParseError(_byte_offset(text, pos), f"bad integer {part!r}")
            value = int(part)
            if value > COORD_MAX:
                raise RegionRangeError(f"coordinate {value} outside 0..{COORD_MAX}")
            values.append(value)
        else:
            if not _NUM_RE.fullmatch(part):
                raise RegionParseError(_byte_offset(text, pos), f"bad number {part!r}")
            values.append(float(part))
        pos += len(part) + 1
    if tag == "bbox":
        return NormalizedBox(*values)
    if tag == "point":
        return NormalizedPoint(*values)
    return Box3d(*values)
