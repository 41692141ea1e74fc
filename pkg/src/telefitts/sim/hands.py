"""Synthetic hand-tracking traces.

Coordinate frame: x right, y up, z forward (meters). A trace is a list of
time-stamped samples with position, unit pointing direction, and the
index-finger pinch state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_UNIT_TOL = 1e-9


@dataclass
class HandSample:
    t_s: float
    position_m: np.ndarray
    direction: np.ndarray
    pinch: bool = False

    def __post_init__(self) -> None:
        self.position_m = np.asarray(self.position_m, dtype=float)
        self.direction = np.asarray(self.direction, dtype=float)
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > _UNIT_TOL:
            raise ValueError(f"direction must be unit length, |d| = {norm}")


def check_monotonic(trace: list[HandSample]) -> None:
    for a, b in zip(trace, trace[1:]):
        if b.t_s <= a.t_s:
            raise ValueError(
                f"timestamps must be strictly increasing, got {a.t_s} -> {b.t_s}"
            )


def minimum_jerk_profile(tau: float) -> float:
    """Normalized minimum-jerk position profile: 10 tau^3 - 15 tau^4 + 6 tau^5."""
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))


def synth_hand_trace(
    from_point_m: np.ndarray,
    to_point_m: np.ndarray,
    duration_s: float,
    tremor_sd_m: float = 0.0,
    sample_rate_hz: float = 100.0,
    seed: int = 0,
    direction: np.ndarray | None = None,
    pinch_at_s: float | None = None,
) -> list[HandSample]:
    """Point-to-point reach with a minimum-jerk profile plus Gaussian tremor.

    Deterministic per seed. ``pinch_at_s`` closes the index finger from that
    time onward, producing a single rising edge.
    """
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    if sample_rate_hz <= 0:
        raise ValueError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
    start = np.asarray(from_point_m, dtype=float)
    end = np.asarray(to_point_m, dtype=float)
    if direction is None:
        direction = np.array([0.0, 0.0, 1.0])
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)

    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate_hz)) + 1
    trace: list[HandSample] = []
    for i in range(n):
        t = i / sample_rate_hz
        tau = min(t / duration_s, 1.0)
        pos = start + (end - start) * minimum_jerk_profile(tau)
        if tremor_sd_m > 0:
            pos = pos + rng.normal(0.0, tremor_sd_m, size=3)
        pinch = pinch_at_s is not None and t >= pinch_at_s
        trace.append(HandSample(t_s=t, position_m=pos, direction=direction.copy(), pinch=pinch))
    return trace


@dataclass
class StationaryHand:
    """Convenience factory for a hand that stays put (confirmation hand)."""

    position_m: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.2, 0.2]))
    direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def trace(self, duration_s: float, sample_rate_hz: float = 100.0,
              pinch_at_s: float | None = None) -> list[HandSample]:
        n = int(round(duration_s * sample_rate_hz)) + 1
        out = []
        for i in range(n):
            t = i / sample_rate_hz
            pinch = pinch_at_s is not None and t >= pinch_at_s
            out.append(
                HandSample(t, self.position_m.copy(), self.direction.copy(), pinch)
            )
        return out
