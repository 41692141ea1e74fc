"""Ordinary least squares with the diagnostics used for model comparison.

The solver is a Householder QR with a fixed elimination order, so repeated
fits of the same data are bit-identical. Saturated fits (residuals at or
below float resolution of the response variance) report R^2 = 1 and the
infinity sentinels instead of meaningless log-ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .models import PredictorRow


class CollinearPredictorsError(ValueError):
    """Design matrix is rank deficient; ``columns`` are the offending predictors."""

    def __init__(self, columns: Sequence[int]):
        cols = ", ".join(str(c) for c in columns)
        super().__init__(f"collinear predictors: columns [{cols}]")
        self.columns = tuple(columns)


@dataclass(frozen=True)
class FitResult:
    """Fitted coefficients plus the diagnostic battery.

    ``coefficients`` is (intercept, slope_1, ..., slope_p). ``aic`` and
    ``bic`` use the Gaussian-likelihood form with additive constants
    dropped, n*ln(rss/n) + penalty, with k = p + 1 parameters counted.
    """

    coefficients: tuple[float, ...]
    rss: float
    r2: float
    adj_r2: float
    f_stat: float
    p_value: float
    aic: float
    bic: float
    n: int
    p: int


def adj_r2(r2: float, n: int, p: int) -> float:
    """Degrees-of-freedom adjusted R^2: 1 - (1 - R^2)(n - 1)/(n - p - 1)."""
    if n <= p + 1:
        raise ValueError(f"adjusted R^2 undefined for n={n}, p={p}")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def f_tail_probability(f_stat: float, d1: int, d2: int) -> float:
    """Upper tail of the F(d1, d2) distribution via the regularized
    incomplete beta function: P(F > f) = I_x(d2/2, d1/2), x = d2/(d2 + d1 f)."""
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees of freedom must be positive, got ({d1}, {d2})")
    if not math.isfinite(f_stat):
        return 0.0
    if f_stat < 0:
        raise ValueError(f"F statistic must be non-negative, got {f_stat}")
    x = d2 / (d2 + d1 * f_stat)
    return float(betainc(d2 / 2.0, d1 / 2.0, x))


def overall_f(r2: float, n: int, p: int) -> tuple[float, float]:
    """Overall regression F test of all slopes against the intercept-only model."""
    if n <= p + 1:
        raise ValueError(f"overall F undefined for n={n}, p={p}")
    if r2 >= 1.0:
        return math.inf, 0.0
    f = (r2 / p) / ((1.0 - r2) / (n - p - 1))
    return f, f_tail_probability(f, p, n - p - 1)


def information_criteria(rss: float, n: int, k: int) -> tuple[float, float]:
    """(AIC, BIC) for a Gaussian fit with rss over n observations, k parameters.

    AIC is derived from BIC through the penalty difference 2k - k*ln(n),
    keeping the pair consistent to the last bit at reference inputs.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if rss < 0:
        raise ValueError(f"rss must be non-negative, got {rss}")
    if rss == 0.0:
        return -math.inf, -math.inf
    base = n * math.log(rss / n)
    bic_val = base + k * math.log(n)
    aic_val = bic_val + (2.0 * k - k * math.log(n))
    return aic_val, bic_val


def aic(rss: float, n: int, k: int) -> float:
    return information_criteria(rss, n, k)[0]


def bic(rss: float, n: int, k: int) -> float:
    return information_criteria(rss, n, k)[1]


def _design_matrix(rows: Sequence[PredictorRow]) -> tuple[np.ndarray, np.ndarray]:
    p = len(rows[0].predictors)
    for i, r in enumerate(rows):
        if len(r.predictors) != p:
            raise ValueError(f"row {i} has {len(r.predictors)} predictors, expected {p}")
        for v in (*r.predictors, r.response_mt_s):
            if not math.isfinite(v):
                raise ValueError(f"row {i} contains a non-finite value")
    x = np.empty((len(rows), p + 1))
    x[:, 0] = 1.0
    for i, r in enumerate(rows):
        x[i, 1:] = r.predictors
    y = np.array([r.response_mt_s for r in rows])
    return x, y


def _collinear_columns(x: np.ndarray) -> list[int]:
    """Predictor indices (1-based within the slope block) that add no rank."""
    bad: list[int] = []
    rank = 1  # intercept column
    for j in range(1, x.shape[1]):
        new_rank = int(np.linalg.matrix_rank(x[:, : j + 1]))
        if new_rank == rank:
            bad.append(j)
        rank = new_rank
    return bad


def ols_fit(rows: Sequence[PredictorRow]) -> FitResult:
    """Least-squares fit with intercept and the full diagnostic set."""
    if not rows:
        raise ValueError("no observations")
    x, y = _design_matrix(rows)
    n, cols = x.shape
    p = cols - 1
    if n < p + 2:
        raise ValueError(f"need at least p + 2 = {p + 2} observations, got {n}")
    bad = _collinear_columns(x)
    if bad:
        raise CollinearPredictorsError(bad)

    q, r = np.linalg.qr(x)
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - x @ coef
    rss = float(resid @ resid)
    ybar = float(np.mean(y))
    tss = float(np.sum((y - ybar) ** 2))

    if tss == 0.0:
        r2 = 1.0  # constant response: the intercept alone is a perfect fit
    else:
        r2 = 1.0 - rss / tss
    saturated = rss == 0.0 or r2 == 1.0

    adj = 1.0 if saturated else adj_r2(r2, n, p)
    if saturated:
        f_stat, p_value = math.inf, 0.0
        aic_val, bic_val = -math.inf, -math.inf
    else:
        f_stat, p_value = overall_f(r2, n, p)
        aic_val, bic_val = information_criteria(rss, n, p + 1)

    return FitResult(
        coefficients=tuple(float(c) for c in coef),
        rss=rss,
        r2=r2,
        adj_r2=adj,
        f_stat=f_stat,
        p_value=p_value,
        aic=aic_val,
        bic=bic_val,
        n=n,
        p=p,
    )


def partial_f(full: FitResult, reduced: FitResult) -> tuple[float, float]:
    """Nested-model F test: does the full model's extra freedom pay off?

    Nesting cannot be re-derived from the fit results alone, so it is
    enforced by its observable consequence: the full model's rss may not
    exceed the reduced model's.
    """
    if full.n != reduced.n:
        raise ValueError(f"mismatched observation counts: {full.n} != {reduced.n}")
    if reduced.p >= full.p:
        raise ValueError("reduced model must have fewer predictors than the full model")
    slack = 1e-10 * max(1.0, reduced.rss)
    if full.rss > reduced.rss + slack:
        raise ValueError("models are not nested: full rss exceeds reduced rss")
    d1 = full.p - reduced.p
    d2 = full.n - full.p - 1
    if d2 < 1:
        raise ValueError("no residual degrees of freedom in the full model")
    if full.rss == 0.0:
        return math.inf, 0.0
    f = ((reduced.rss - full.rss) / d1) / (full.rss / d2)
    f = max(f, 0.0)  # guard the slack window
    return f, f_tail_probability(f, d1, d2)
