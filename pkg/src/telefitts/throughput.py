"""ISO-9241-9-style throughput with the accuracy correction.

Effective width rescales the nominal target width to the spread actually
produced by the user (W_e = 4.133 x SD of selection endpoints), effective
amplitude is the realized movement distance, and throughput is the
means-of-means average of ID_e / MT over the amplitude x width grid.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from .models import AmplitudeMode, amplitude_from_grid
from .trials import IncompleteGridError, Posture, Technique, Trial

#: Endpoint-spread multiplier mapping an SD to the width containing ~96% of hits.
WE_SD_FACTOR = 4.133

#: The amplitude x width grid behind the means-of-means N: four (D, H)
#: amplitude levels by two widths.
GRID_DISTANCES_M = (3.0, 9.0)
GRID_HEIGHTS_M = (0.0, 3.0)
GRID_WIDTHS_M = (0.2, 1.35)


def effective_width(endpoint_deviations_m: Sequence[float]) -> float:
    """W_e = 4.133 x sample SD (n-1 denominator) of the scalar deviations."""
    if len(endpoint_deviations_m) < 2:
        raise ValueError(
            f"effective width needs >= 2 endpoint samples, got {len(endpoint_deviations_m)}"
        )
    return WE_SD_FACTOR * statistics.stdev(endpoint_deviations_m)


def effective_amplitude(amplitudes_m: Sequence[float]) -> float:
    """Mean realized movement amplitude over a cell's trials."""
    if not amplitudes_m:
        raise ValueError("effective amplitude needs at least one trial")
    return statistics.fmean(amplitudes_m)


def effective_id(ae_m: float, we_m: float) -> float:
    """Accuracy-adjusted index of difficulty: log2(A_e / W_e + 1)."""
    if we_m <= 0:
        raise ValueError(f"effective width must be positive, got {we_m}")
    if ae_m < 0:
        raise ValueError(f"effective amplitude must be non-negative, got {ae_m}")
    return math.log2(ae_m / we_m + 1.0)


@dataclass(frozen=True)
class ThroughputCell:
    """One amplitude x width cell of a technique/posture group."""

    technique: Technique
    posture: Posture
    width_m: float
    distance_m: float
    height_m: float
    n_trials: int
    ae_m: float
    we_m: float
    ide_bits: float
    mean_mt_s: float
    tp_bits_per_s: float


@dataclass(frozen=True)
class ThroughputSummary:
    """Per-(technique, posture) throughput with its per-cell detail."""

    technique: Technique
    posture: Posture
    tp_bits_per_s: float
    cells: tuple[ThroughputCell, ...]
    degenerate_cells: int


def throughput_mean_of_means(
    cells: Sequence[ThroughputCell], require_full_grid: bool = True
) -> float:
    """Unweighted mean of per-cell ID_e / MT.

    With ``require_full_grid`` the cells must cover every (D, H, W) combo of
    the standard grid; pass False for ad-hoc data.
    """
    if not cells:
        raise ValueError("no throughput cells")
    if require_full_grid:
        have = {(c.distance_m, c.height_m, c.width_m) for c in cells}
        missing = [
            f"D={d}m H={h}m W={w}m"
            for d in GRID_DISTANCES_M
            for h in GRID_HEIGHTS_M
            for w in GRID_WIDTHS_M
            if (d, h, w) not in have
        ]
        if missing:
            raise IncompleteGridError(missing)
    return statistics.fmean(c.tp_bits_per_s for c in cells)


def throughput_by_group(
    trials: Sequence[Trial],
    amplitude_mode: AmplitudeMode = AmplitudeMode.EUCLIDEAN,
    allow_partial_grid: bool = False,
) -> list[ThroughputSummary]:
    """Throughput for every (technique, posture) present in the log.

    Logs carry no realized pointer amplitudes, so A_e falls back to the
    nominal grid amplitude. Cells whose endpoint spread is exactly zero
    cannot produce a finite ID_e; they are dropped and counted, shrinking
    that group's cell average.
    """
    groups: dict[tuple[Technique, Posture], dict[tuple[float, float, float], list[Trial]]] = {}
    for t in trials:
        cellkey = (round(t.distance_m, 3), round(t.height_m, 3), round(t.width_m, 3))
        groups.setdefault((t.technique, t.posture), {}).setdefault(cellkey, []).append(t)

    summaries: list[ThroughputSummary] = []
    tech_order = {t: i for i, t in enumerate(Technique)}
    post_order = {p: i for i, p in enumerate(Posture)}
    for gkey in sorted(groups, key=lambda g: (tech_order[g[0]], post_order[g[1]])):
        cells_by_key = groups[gkey]
        if not allow_partial_grid:
            missing = [
                f"{gkey[0].value}/{gkey[1].value} D={d}m H={h}m W={w}m"
                for d in GRID_DISTANCES_M
                for h in GRID_HEIGHTS_M
                for w in GRID_WIDTHS_M
                if (d, h, w) not in cells_by_key
            ]
            if missing:
                raise IncompleteGridError(missing)
        cells: list[ThroughputCell] = []
        degenerate = 0
        for cellkey in sorted(cells_by_key):
            cell_trials = cells_by_key[cellkey]
            d, h, w = cellkey
            devs = [t.endpoint_deviation_m for t in cell_trials]
            if len(devs) < 2:
                degenerate += 1
                continue
            we = effective_width(devs)
            if we == 0.0:
                degenerate += 1
                continue
            ae = amplitude_from_grid(d, h, amplitude_mode)
            ide = effective_id(ae, we)
            mean_mt = statistics.fmean(t.movement_time_s for t in cell_trials)
            cells.append(
                ThroughputCell(
                    technique=gkey[0],
                    posture=gkey[1],
                    width_m=w,
                    distance_m=d,
                    height_m=h,
                    n_trials=len(cell_trials),
                    ae_m=ae,
                    we_m=we,
                    ide_bits=ide,
                    mean_mt_s=mean_mt,
                    tp_bits_per_s=ide / mean_mt,
                )
            )
        if not cells:
            raise ValueError(
                f"all cells of group {gkey[0].value}/{gkey[1].value} have zero "
                f"endpoint spread; throughput undefined"
            )
        tp = throughput_mean_of_means(cells, require_full_grid=False)
        summaries.append(
            ThroughputSummary(
                technique=gkey[0],
                posture=gkey[1],
                tp_bits_per_s=tp,
                cells=tuple(cells),
                degenerate_cells=degenerate,
            )
        )
    return summaries


def render_throughput_records(summaries: Sequence[ThroughputSummary]) -> str:
    """One JSON record per (technique, posture) with nested cell detail."""
    import json

    lines = []
    for s in summaries:
        record = {
            "technique": s.technique.value,
            "posture": s.posture.value,
            "tp_bits_per_s": s.tp_bits_per_s,
            "degenerate_cells": s.degenerate_cells,
            "cells": [
                {
                    "width_m": c.width_m,
                    "distance_m": c.distance_m,
                    "height_m": c.height_m,
                    "n_trials": c.n_trials,
                    "ae_m": c.ae_m,
                    "we_m": c.we_m,
                    "ide_bits": c.ide_bits,
                    "mean_mt_s": c.mean_mt_s,
                    "tp_bits_per_s": c.tp_bits_per_s,
                }
                for c in s.cells
            ],
        }
        lines.append(json.dumps(record, sort_keys=True))
    return "\n".join(lines) + "\n"
