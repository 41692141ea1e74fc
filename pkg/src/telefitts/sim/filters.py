"""Pointer stabilization: constant-velocity Kalman smoothing and the
last-moment rollback that cancels confirmation-gesture spikes."""

from __future__ import annotations

import numpy as np

from .hands import HandSample, check_monotonic


def kalman_smooth(
    trace: list[HandSample],
    process_noise: float = 50.0,
    measurement_noise: float = 1e-4,
) -> list[HandSample]:
    """Per-axis constant-velocity Kalman filter over positions and directions.

    State per channel is (value, velocity); the six channels (three position
    axes, three direction components) share one gain sequence because they
    share the same noise model and time steps. Direction components are
    renormalized to unit length after filtering. The filter initializes on
    the first sample with zero velocity, so a constant trace passes through
    untouched. Deterministic given the trace and the two noise scalars.
    """
    if process_noise <= 0 or measurement_noise <= 0:
        raise ValueError("noise parameters must be positive")
    if not trace:
        return []
    check_monotonic(trace)

    q, r = float(process_noise), float(measurement_noise)
    # channels: columns [px py pz dx dy dz]
    z = np.array([np.concatenate([s.position_m, s.direction]) for s in trace])
    x = np.zeros((2, 6))
    x[0] = z[0]
    p = np.array([[r, 0.0], [0.0, 1.0]])

    out = [HandSample(trace[0].t_s, z[0, :3].copy(), _unit(z[0, 3:]), trace[0].pinch)]
    for i in range(1, len(trace)):
        dt = trace[i].t_s - trace[i - 1].t_s
        f = np.array([[1.0, dt], [0.0, 1.0]])
        qk = q * np.array(
            [[dt ** 4 / 4.0, dt ** 3 / 2.0], [dt ** 3 / 2.0, dt ** 2]]
        )
        x = f @ x
        p = f @ p @ f.T + qk
        s = p[0, 0] + r
        k = p[:, 0] / s  # gain for the scalar position measurement
        innov = z[i] - x[0]
        x = x + np.outer(k, innov)
        p = p - np.outer(k, p[0, :])
        out.append(HandSample(trace[i].t_s, x[0, :3].copy(), _unit(x[0, 3:]), trace[i].pinch))
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        return np.array([0.0, 0.0, 1.0])
    return v / norm


def spike_compensate(
    trace: list[HandSample], confirmation_time_s: float, lookback_s: float = 0.1
) -> HandSample:
    """Pointer sample used for the selection: the state ``lookback_s`` before
    the confirmation, linearly interpolated.

    The confirmation gesture itself jerks the hand, so the selection rolls
    back to just before the gesture started. A lookback reaching past the
    trace start clamps to the first sample.
    """
    if not trace:
        raise ValueError("empty trace")
    check_monotonic(trace)
    if lookback_s < 0:
        raise ValueError(f"lookback_s must be non-negative, got {lookback_s}")
    if not (trace[0].t_s <= confirmation_time_s <= trace[-1].t_s):
        raise ValueError(
            f"confirmation time {confirmation_time_s} outside trace span "
            f"[{trace[0].t_s}, {trace[-1].t_s}]"
        )
    return sample_at(trace, confirmation_time_s - lookback_s)


def sample_at(trace: list[HandSample], t_s: float) -> HandSample:
    """Linearly interpolated sample at ``t_s``, clamped to the trace span."""
    if t_s <= trace[0].t_s:
        s = trace[0]
        return HandSample(trace[0].t_s, s.position_m.copy(), s.direction.copy(), s.pinch)
    if t_s >= trace[-1].t_s:
        s = trace[-1]
        return HandSample(trace[-1].t_s, s.position_m.copy(), s.direction.copy(), s.pinch)
    times = [s.t_s for s in trace]
    import bisect

    hi = bisect.bisect_right(times, t_s)
    lo = hi - 1
    a, b = trace[lo], trace[hi]
    w = (t_s - a.t_s) / (b.t_s - a.t_s)
    pos = a.position_m * (1 - w) + b.position_m * w
    direction = _unit(a.direction * (1 - w) + b.direction * w)
    return HandSample(t_s, pos, direction, a.pinch)
