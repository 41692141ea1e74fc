"""Trial data model, log validation, and per-condition aggregation.

A trial log is a flat sequence of teleportation attempts. Regression and
throughput never consume raw trials directly: they work on per-condition
means (means-of-means), so the aggregation path here is the single source
of the observation units used downstream.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from scipy import stats as _sstats


class Technique(Enum):
    """Pointer/confirmation hand assignments; RPDW confirms by dwell."""

    RPRG = "RPRG"
    RPLG = "RPLG"
    LPLG = "LPLG"
    LPRG = "LPRG"
    RPDW = "RPDW"


class Posture(Enum):
    SITTING = "Sitting"
    STANDING = "Standing"


PAPER_ANGLES_DEG = (-10.0, 0.0, 10.0)

TRIAL_LOG_HEADER = (
    "participant_id,technique,posture,block,trial_index,width_m,distance_m,"
    "height_m,angle_deg,movement_time_s,endpoint_deviation_m,error_attempts,success"
)


@dataclass(frozen=True)
class Trial:
    """One teleportation attempt (the final, successful selection of a target).

    ``error_attempts`` counts failed selections made before the recorded
    one; ``endpoint_deviation_m`` is the shortest distance from the selection
    point to the target center.
    """

    participant_id: str
    technique: Technique
    posture: Posture
    block: int
    trial_index: int
    width_m: float
    distance_m: float
    height_m: float
    angle_deg: float
    movement_time_s: float
    endpoint_deviation_m: float
    error_attempts: int
    success: bool


@dataclass(frozen=True)
class Violation:
    """One invariant violation found in a trial log."""

    trial_index: int
    field: str
    message: str


def validate_log(trials: Sequence[Trial]) -> list[Violation]:
    """Check every trial against the data-model invariants.

    Returns an empty list iff the log is clean. Violations are data, not
    exceptions: a dirty log is a legitimate thing to inspect.
    """
    report: list[Violation] = []
    for i, t in enumerate(trials):
        if not (math.isfinite(t.movement_time_s) and t.movement_time_s > 0):
            report.append(Violation(i, "movement_time_s", "non-positive movement time"))
        if not (math.isfinite(t.width_m) and t.width_m > 0):
            report.append(Violation(i, "width_m", "non-positive target width"))
        if not (math.isfinite(t.distance_m) and t.distance_m > 0):
            report.append(Violation(i, "distance_m", "non-positive target distance"))
        if not (math.isfinite(t.height_m) and t.height_m >= 0):
            report.append(Violation(i, "height_m", "negative target height"))
        if not (math.isfinite(t.endpoint_deviation_m) and t.endpoint_deviation_m >= 0):
            report.append(Violation(i, "endpoint_deviation_m", "negative endpoint deviation"))
        elif t.success and t.endpoint_deviation_m > t.width_m / 2:
            report.append(
                Violation(
                    i,
                    "endpoint_deviation_m",
                    "successful selection landed outside the target radius",
                )
            )
        if t.error_attempts < 0:
            report.append(Violation(i, "error_attempts", "negative error count"))
        if t.block < 0:
            report.append(Violation(i, "block", "negative block index"))
        if t.trial_index < 0:
            report.append(Violation(i, "trial_index", "negative trial index"))
        if not math.isfinite(t.angle_deg):
            report.append(Violation(i, "angle_deg", "non-finite viewing angle"))
    return report


def _quantize_mm(value: float) -> float:
    # 1 mm quantization guards float-keyed equality for grid geometry.
    return round(value, 3)


@dataclass(frozen=True)
class ConditionKey:
    """Aggregation cell identity. ``None`` marks a collapsed factor.

    Viewing angle is deliberately not part of the key: it is randomized per
    trial to cancel directional bias and is kept on trials for audit only.
    """

    technique: Technique | None
    posture: Posture | None
    width_m: float
    distance_m: float
    height_m: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "width_m", _quantize_mm(self.width_m))
        object.__setattr__(self, "distance_m", _quantize_mm(self.distance_m))
        object.__setattr__(self, "height_m", _quantize_mm(self.height_m))

    @classmethod
    def for_trial(cls, trial: Trial) -> "ConditionKey":
        return cls(trial.technique, trial.posture, trial.width_m, trial.distance_m, trial.height_m)


@dataclass(frozen=True)
class ConditionSummary:
    """Descriptive statistics for one aggregation cell.

    ``error_rate`` is the fraction of trials that needed at least one failed
    attempt before succeeding. ``ci95_mt_s`` is the half-width of the 95%
    Student-t interval on the mean movement time (None for singleton cells).
    """

    key: ConditionKey
    n_trials: int
    mean_mt_s: float
    sd_mt_s: float
    mean_deviation_m: float
    sd_deviation_m: float
    error_rate: float
    ci95_mt_s: float | None


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    m = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) >= 2 else 0.0
    return m, sd


def _ci95_halfwidth(sd: float, n: int) -> float | None:
    if n < 2:
        return None
    t = float(_sstats.t.ppf(0.975, n - 1))
    return t * sd / math.sqrt(n)


def group_by_condition(trials: Sequence[Trial]) -> dict[ConditionKey, ConditionSummary]:
    """Aggregate trials into per-condition cells.

    Every trial lands in exactly one cell. Standard deviations use the n-1
    denominator; singleton cells get sd 0 by convention and no CI.
    """
    buckets: dict[ConditionKey, list[Trial]] = {}
    for t in trials:
        buckets.setdefault(ConditionKey.for_trial(t), []).append(t)

    out: dict[ConditionKey, ConditionSummary] = {}
    for key in sorted(buckets, key=_key_sort_token):
        cell = buckets[key]
        mts = [t.movement_time_s for t in cell]
        devs = [t.endpoint_deviation_m for t in cell]
        mean_mt, sd_mt = _mean_sd(mts)
        mean_dev, sd_dev = _mean_sd(devs)
        err = sum(1 for t in cell if t.error_attempts > 0) / len(cell)
        out[key] = ConditionSummary(
            key=key,
            n_trials=len(cell),
            mean_mt_s=mean_mt,
            sd_mt_s=sd_mt,
            mean_deviation_m=mean_dev,
            sd_deviation_m=sd_dev,
            error_rate=err,
            ci95_mt_s=_ci95_halfwidth(sd_mt, len(cell)),
        )
    return out


_COLLAPSIBLE = ("technique", "posture")


def _key_sort_token(key: ConditionKey) -> tuple:
    tech = -1 if key.technique is None else list(Technique).index(key.technique)
    post = -1 if key.posture is None else list(Posture).index(key.posture)
    return (tech, post, key.width_m, key.distance_m, key.height_m)


def collapse_over(
    summaries: Mapping[ConditionKey, ConditionSummary],
    drop: Iterable[str],
    pooled: bool = False,
) -> dict[ConditionKey, ConditionSummary]:
    """Remove factors from the keys, merging cells that become identical.

    Default is the unweighted mean of cell means (means-of-means). The
    ``pooled`` opt-in weights constituent cells by trial count instead,
    reconstructing plain pooled-trial statistics.
    """
    drop = set(drop)
    unknown = drop - set(_COLLAPSIBLE)
    if unknown:
        raise ValueError(f"unknown factor: {', '.join(sorted(unknown))}")
    if not drop:
        return dict(summaries)

    merged: dict[ConditionKey, list[ConditionSummary]] = {}
    for key, summary in summaries.items():
        new_key = replace(
            key,
            technique=None if "technique" in drop else key.technique,
            posture=None if "posture" in drop else key.posture,
        )
        merged.setdefault(new_key, []).append(summary)

    out: dict[ConditionKey, ConditionSummary] = {}
    for key in sorted(merged, key=_key_sort_token):
        cells = merged[key]
        n_total = sum(c.n_trials for c in cells)
        if pooled:
            w = [c.n_trials / n_total for c in cells]
        else:
            w = [1.0 / len(cells)] * len(cells)
        mean_mt = sum(wi * c.mean_mt_s for wi, c in zip(w, cells))
        mean_dev = sum(wi * c.mean_deviation_m for wi, c in zip(w, cells))
        err = sum(wi * c.error_rate for wi, c in zip(w, cells))
        if pooled:
            sd_mt = _pooled_sd([c.n_trials for c in cells], [c.mean_mt_s for c in cells],
                               [c.sd_mt_s for c in cells], mean_mt)
            sd_dev = _pooled_sd([c.n_trials for c in cells], [c.mean_deviation_m for c in cells],
                                [c.sd_deviation_m for c in cells], mean_dev)
            ci = _ci95_halfwidth(sd_mt, n_total)
        else:
            cell_means = [c.mean_mt_s for c in cells]
            sd_mt = statistics.stdev(cell_means) if len(cells) >= 2 else 0.0
            sd_dev = (statistics.stdev([c.mean_deviation_m for c in cells])
                      if len(cells) >= 2 else 0.0)
            ci = _ci95_halfwidth(sd_mt, len(cells))
        out[key] = ConditionSummary(
            key=key,
            n_trials=n_total,
            mean_mt_s=mean_mt,
            sd_mt_s=sd_mt,
            mean_deviation_m=mean_dev,
            sd_deviation_m=sd_dev,
            error_rate=err,
            ci95_mt_s=ci,
        )
    return out


def _pooled_sd(ns: Sequence[int], means: Sequence[float], sds: Sequence[float],
               grand_mean: float) -> float:
    n_total = sum(ns)
    if n_total < 2:
        return 0.0
    ss = sum((n - 1) * sd * sd + n * (m - grand_mean) ** 2
             for n, m, sd in zip(ns, means, sds))
    return math.sqrt(ss / (n_total - 1))


class LogFormatError(ValueError):
    """Raised when a trial-log file cannot be parsed; carries the 1-based line."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class IncompleteGridError(ValueError):
    """The data does not cover the full condition grid; ``missing`` names gaps."""

    def __init__(self, missing: Sequence[str]):
        super().__init__(f"incomplete condition grid, missing: {', '.join(missing)}")
        self.missing = tuple(missing)


def _format_float(x: float) -> str:
    return repr(float(x))


def write_trial_log(trials: Sequence[Trial], path: str) -> None:
    """Write a UTF-8 CSV log with full round-trip float precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRIAL_LOG_HEADER + "\n")
        for t in trials:
            row = [
                t.participant_id,
                t.technique.value,
                t.posture.value,
                str(t.block),
                str(t.trial_index),
                _format_float(t.width_m),
                _format_float(t.distance_m),
                _format_float(t.height_m),
                _format_float(t.angle_deg),
                _format_float(t.movement_time_s),
                _format_float(t.endpoint_deviation_m),
                str(t.error_attempts),
                "true" if t.success else "false",
            ]
            fh.write(",".join(row) + "\n")


def read_trial_log(path: str) -> list[Trial]:
    """Parse a trial log, raising LogFormatError with the offending line number."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LogFormatError("empty file, expected header row", 1) from None
        if ",".join(header) != TRIAL_LOG_HEADER:
            raise LogFormatError("unexpected header row", 1)
        trials: list[Trial] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 13:
                raise LogFormatError(f"expected 13 fields, found {len(row)}", line_no)
            try:
                trials.append(
                    Trial(
                        participant_id=row[0],
                        technique=Technique(row[1]),
                        posture=_parse_posture(row[2]),
                        block=int(row[3]),
                        trial_index=int(row[4]),
                        width_m=float(row[5]),
                        distance_m=float(row[6]),
                        height_m=float(row[7]),
                        angle_deg=float(row[8]),
                        movement_time_s=float(row[9]),
                        endpoint_deviation_m=float(row[10]),
                        error_attempts=int(row[11]),
                        success=_parse_bool(row[12], line_no),
                    )
                )
            except LogFormatError:
                raise
            except ValueError as exc:
                raise LogFormatError(str(exc), line_no) from None
    return trials


def _parse_posture(text: str) -> Posture:
    for p in Posture:
        if text.lower() == p.value.lower():
            return p
    raise ValueError(f"'{text}' is not a valid Posture")


def _parse_bool(text: str, line_no: int) -> bool:
    lowered = text.strip().lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise LogFormatError(f"'{text}' is not a boolean (expected true/false)", line_no)
