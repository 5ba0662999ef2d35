"""Disturbance scheduling and the series-injection reference.

The compensator is feed-forward: the injected voltage reference is the
desired load-side waveform minus the measured grid voltage, phase by phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import PHASE_OFFSETS
from .errors import ConfigError
from .timeseries import TimeSeries

EVENT_KINDS = ("sag", "swell")


@dataclass(frozen=True)
class Event:
    """Step change of the grid amplitude on ``[start, end)``.

    ``end=math.inf`` leaves the event active until the end of the run.
    """

    kind: str
    start: float
    magnitude: float
    end: float = math.inf

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ConfigError(f"event kind must be one of {EVENT_KINDS}, got {self.kind!r}")
        if not self.start < self.end:
            raise ConfigError(f"event start {self.start} must precede end {self.end}")
        if not self.magnitude > 0:
            raise ConfigError(f"event magnitude must be positive, got {self.magnitude}")
        if self.kind == "sag" and not self.magnitude < 1:
            raise ConfigError(f"sag magnitude must be below 1, got {self.magnitude}")
        if self.kind == "swell" and not self.magnitude >= 1:
            raise ConfigError(f"swell magnitude must be at least 1, got {self.magnitude}")

    def active(self, t):
        t = np.asarray(t)
        return (t >= self.start) & (t < self.end)


def check_events(events) -> None:
    ordered = sorted(events, key=lambda e: e.start)
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise ConfigError(f"events overlap: {a.kind} [{a.start}, {a.end}) and {b.kind} [{b.start}, {b.end})")


def apply_events(events, t):
    """Grid amplitude factor at ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    scale = np.ones(t.shape)
    for ev in events:
        scale = np.where(ev.active(t), scale * ev.magnitude, scale)
    return float(scale) if scale.ndim == 0 else scale


@dataclass(frozen=True)
class ReferenceSpec:
    """Desired load-side waveform: balanced sines of the given rms."""

    nominal_rms: float
    frequency: float = 50.0
    offsets: tuple[float, float, float] = PHASE_OFFSETS

    def __post_init__(self):
        if not self.nominal_rms > 0:
            raise ConfigError(f"reference rms must be positive, got {self.nominal_rms}")

    def waveform(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ph = np.array(self.offsets).reshape((3,) + (1,) * t.ndim)
        return self.nominal_rms * math.sqrt(2) * np.sin(2 * math.pi * self.frequency * t + ph)


def injection_reference(v_ref_load, v_grid_measured):
    return np.asarray(v_ref_load) - np.asarray(v_grid_measured)


def sliding_rms(series: TimeSeries, window: float) -> TimeSeries:
    """Causal RMS over the trailing ``window`` seconds.

    Samples before the first full window are NaN (warm-up).
    """
    n = int(round(window / series.dt))
    if n < 2:
        raise ConfigError(f"rms window of {window} s spans fewer than 2 samples at dt={series.dt}")
    x2 = series.values**2
    csum = np.concatenate([[0.0], np.cumsum(x2)])
    out = np.full(len(x2), np.nan)
    if len(x2) >= n:
        out[n - 1 :] = np.sqrt(np.maximum(csum[n:] - csum[:-n], 0.0) / n)
    return TimeSeries(f"{series.name}_rms", series.unit, out, series.dt, series.t0)


def recovery_time(rms: TimeSeries, start: float, nominal: float, band: float = 0.02, until: float | None = None):
    """Seconds after ``start`` until ``rms`` enters and stays inside the band.

    The band is ``nominal * (1 +/- band)`` and must hold from the returned
    instant up to ``until`` (default: end of record).  Returns None if it
    never settles.
    """
    t = rms.t
    sel = (t >= start) & (t <= (until if until is not None else t[-1]))
    vals = rms.values[sel]
    ts = t[sel]
    if len(vals) == 0:
        return None
    outside = ~(np.abs(vals - nominal) <= band * nominal)
    if not outside.any():
        return 0.0
    last_bad = int(np.flatnonzero(outside)[-1])
    if last_bad == len(vals) - 1:
        return None
    return float(ts[last_bad + 1] - start)
