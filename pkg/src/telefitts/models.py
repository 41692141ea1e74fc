"""Predictor construction and prediction for the four movement-time models.

All four variants are linear in their predictors:

    Standard:  MT = a + b * log2(A/W + 1)
    Two-part:  MT = a + b1 * log2(A + W) - b2 * log2(W)
    Vergence:  MT = a + b  * log2(A/W + 1) + c * CTD
    Proposed:  MT = a + b1 * log2(A/W + 1) - b2 * log2(W / max(D, H) + 1)

Negative-signed terms are folded into the stored predictor, not the
coefficient, so fitted slopes are expected positive across the board; the
report layer re-renders equations in the conventional sign placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

#: Depth of the fixed start cube in front of the user, meters. Every trial
#: re-homes at the cube, so the default change-in-target-depth for a target
#: at depth D is |D - START_CUBE_DEPTH_M|.
START_CUBE_DEPTH_M = 0.59


class ModelKind(Enum):
    # Declaration order doubles as the deterministic tie-break order.
    STANDARD = "Standard"
    TWO_PART = "TwoPart"
    VERGENCE = "Vergence"
    PROPOSED = "Proposed"


class AmplitudeMode(Enum):
    """How nominal movement amplitude is built from the (D, H) grid."""

    EUCLIDEAN = "euclidean"
    DEPTH_ONLY = "depth"


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    predictor_count: int


MODEL_SPECS: dict[ModelKind, ModelSpec] = {
    ModelKind.STANDARD: ModelSpec(ModelKind.STANDARD, 1),
    ModelKind.TWO_PART: ModelSpec(ModelKind.TWO_PART, 2),
    ModelKind.VERGENCE: ModelSpec(ModelKind.VERGENCE, 2),
    ModelKind.PROPOSED: ModelSpec(ModelKind.PROPOSED, 2),
}


@dataclass(frozen=True)
class TargetGeometry:
    """Geometry of one pointing task.

    ``amplitude_m`` is the movement amplitude A, ``depth_m`` the horizontal
    depth D from user to target, ``altitude_m`` the magnitude H of the
    elevation difference, and ``ctd_m`` the change in target depth relative
    to the previous target.
    """

    amplitude_m: float
    width_m: float
    depth_m: float
    altitude_m: float
    ctd_m: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.width_m) and self.width_m > 0):
            raise ValueError(f"width_m must be positive, got {self.width_m}")
        if not (math.isfinite(self.amplitude_m) and self.amplitude_m >= 0):
            raise ValueError(f"amplitude_m must be non-negative, got {self.amplitude_m}")
        if not (math.isfinite(self.depth_m) and self.depth_m > 0):
            raise ValueError(f"depth_m must be positive, got {self.depth_m}")
        if not (math.isfinite(self.altitude_m) and self.altitude_m >= 0):
            raise ValueError(f"altitude_m must be non-negative, got {self.altitude_m}")
        if not (math.isfinite(self.ctd_m) and self.ctd_m >= 0):
            raise ValueError(f"ctd_m must be non-negative, got {self.ctd_m}")


@dataclass(frozen=True)
class PredictorRow:
    """One regression observation: predictors plus the mean movement time."""

    predictors: tuple[float, ...]
    response_mt_s: float


def id_shannon(amplitude_m: float, width_m: float) -> float:
    """Index of difficulty in bits: log2(A/W + 1)."""
    if not (math.isfinite(width_m) and width_m > 0):
        raise ValueError(f"width_m must be positive, got {width_m}")
    if not (math.isfinite(amplitude_m) and amplitude_m >= 0):
        raise ValueError(f"amplitude_m must be non-negative, got {amplitude_m}")
    return math.log2(amplitude_m / width_m + 1.0)


def predictors_standard(g: TargetGeometry) -> tuple[float, ...]:
    return (id_shannon(g.amplitude_m, g.width_m),)


def predictors_two_part(g: TargetGeometry) -> tuple[float, ...]:
    # Second predictor stored as -log2(W) so its fitted slope is positive.
    return (math.log2(g.amplitude_m + g.width_m), -math.log2(g.width_m))


def predictors_vergence(g: TargetGeometry) -> tuple[float, ...]:
    # The depth-change predictor carries meters; the model family accepts
    # the unit-bearing term as defined.
    return (id_shannon(g.amplitude_m, g.width_m), g.ctd_m)


def predictors_proposed(g: TargetGeometry) -> tuple[float, ...]:
    dominant = max(g.depth_m, g.altitude_m)
    if dominant <= 0:
        raise ValueError("max(depth_m, altitude_m) must be positive")
    return (
        id_shannon(g.amplitude_m, g.width_m),
        -math.log2(g.width_m / dominant + 1.0),
    )


_PREDICTOR_FNS = {
    ModelKind.STANDARD: predictors_standard,
    ModelKind.TWO_PART: predictors_two_part,
    ModelKind.VERGENCE: predictors_vergence,
    ModelKind.PROPOSED: predictors_proposed,
}


def predictors_for(kind: ModelKind, g: TargetGeometry) -> tuple[float, ...]:
    return _PREDICTOR_FNS[kind](g)


def predict_mt(kind: ModelKind, coefficients: Sequence[float], g: TargetGeometry) -> float:
    """Movement time from fitted coefficients: intercept + slopes . predictors."""
    preds = predictors_for(kind, g)
    expected = MODEL_SPECS[kind].predictor_count + 1
    if len(coefficients) != expected:
        raise ValueError(
            f"{kind.value} needs {expected} coefficients (intercept + slopes), "
            f"got {len(coefficients)}"
        )
    return coefficients[0] + sum(c * x for c, x in zip(coefficients[1:], preds))


def amplitude_from_grid(distance_m: float, height_m: float,
                        mode: AmplitudeMode = AmplitudeMode.EUCLIDEAN) -> float:
    """Nominal movement amplitude for a grid cell.

    Euclidean treats the move as covering depth and elevation jointly;
    DepthOnly reads the labeled teleport distance as the amplitude.
    """
    if not (math.isfinite(distance_m) and distance_m > 0):
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    if not (math.isfinite(height_m) and height_m >= 0):
        raise ValueError(f"height_m must be non-negative, got {height_m}")
    if mode is AmplitudeMode.EUCLIDEAN:
        return math.hypot(distance_m, height_m)
    return distance_m


def geometry_for_condition(
    width_m: float,
    distance_m: float,
    height_m: float,
    mode: AmplitudeMode = AmplitudeMode.EUCLIDEAN,
    start_depth_m: float = START_CUBE_DEPTH_M,
) -> TargetGeometry:
    """Build the task geometry for one (W, D, H) grid cell."""
    return TargetGeometry(
        amplitude_m=amplitude_from_grid(distance_m, height_m, mode),
        width_m=width_m,
        depth_m=distance_m,
        altitude_m=height_m,
        ctd_m=abs(distance_m - start_depth_m),
    )
