"""Line fitting and prediction for loss-vs-tokens and metric-vs-loss curves.

Training loss versus token count is modelled as a power law, i.e. a straight
line in log-log space; downstream metrics are modelled as linear in the log
of the loss. Fits are plain unweighted least squares on already-transformed
coordinates supplied by the caller.
"""

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInputError, SingularFitError


@dataclass(frozen=True)
class PowerLawFit:
    """Line in (ln tokens, ln loss) space: ln(loss) = slope * ln(tokens) + intercept."""

    slope: float
    intercept: float

    def __post_init__(self):
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise InvalidInputError("fit coefficients must be finite")


@dataclass(frozen=True)
class MetricFit:
    """Metric as a function of loss: metric = slope * ln(loss) + intercept."""

    slope: float
    intercept: float

    def __post_init__(self):
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise InvalidInputError("fit coefficients must be finite")


# Published reference fits shipped as data. The loss fits live in log-log
# space of (training tokens, loss); the metric fits map ln(OCR loss) to
# benchmark accuracy.
OCR_LOSS_VS_TOKENS = PowerLawFit(slope=-0.1817, intercept=-0.7011)
GROUNDING_LOSS_VS_TOKENS = PowerLawFit(slope=-0.0785, intercept=-0.0745)
CHARTQA_VS_OCR_LOSS = MetricFit(slope=-0.0968, intercept=0.7139)
INFOVQA_VS_OCR_LOSS = MetricFit(slope=-0.1488, intercept=0.5319)


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Ordinary least squares in the given coordinates; returns (slope, intercept).

    The caller logs whichever columns the model calls for before fitting.
    Raises SingularFitError when the x values are all identical.
    """
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys):
        raise InvalidInputError(f"length mismatch: {len(xs)} xs vs {len(ys)} ys")
    if len(xs) < 2:
        raise InvalidInputError("need at least two points to fit a line")
    n = len(xs)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    sxx = math.fsum((x - mean_x) ** 2 for x in xs)
    if sxx == 0:
        raise SingularFitError("x values are all identical")
    sxy = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, mean_y - slope * mean_x


def predict_loss(fit: PowerLawFit, tokens: float) -> float:
    """Loss predicted at a token count: exp(intercept) * tokens**slope."""
    if tokens <= 0:
        raise InvalidInputError(f"token count must be positive, got {tokens}")
    return math.exp(fit.intercept) * tokens**fit.slope


def predict_metric(fit: MetricFit, loss: float) -> float:
    """Metric predicted at a loss value: slope * ln(loss) + intercept."""
    if loss <= 0:
        raise InvalidInputError(f"loss must be positive, got {loss}")
    return fit.slope * math.log(loss) + fit.intercept
