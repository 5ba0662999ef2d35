"""Harmonic and power analysis of simulated waveforms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError
from .timeseries import TimeSeries

DEFAULT_HARMONICS = 49


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Peak magnitudes of harmonics 1..H.

    ``phasors[h-1]`` is the complex peak amplitude of harmonic ``h`` (cosine
    reference); ``magnitudes`` is its absolute value.
    """

    fundamental: float
    phasors: np.ndarray
    dc: float = 0.0

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.phasors)

    @property
    def H(self) -> int:
        return len(self.phasors)

    def __getitem__(self, h: int) -> float:
        return float(abs(self.phasors[h - 1]))


@dataclass(frozen=True)
class PowerSeries:
    p: np.ndarray
    q: np.ndarray
    dt: float
    t0: float = 0.0


def samples_per_cycle(dt: float, fundamental: float) -> int:
    spc = 1.0 / (fundamental * dt)
    n = int(round(spc))
    if n < 1 or abs(spc - n) > 1e-6 * spc:
        raise AnalysisError(f"sample interval {dt} s does not divide the {fundamental} Hz period ({spc:.6f} samples)")
    return n


def cycle_window(series: TimeSeries, fundamental: float, cycles: int, start_cycle: int = 0) -> np.ndarray:
    spc = samples_per_cycle(series.dt, fundamental)
    if cycles < 1 or start_cycle < 0:
        raise AnalysisError(f"need cycles >= 1 and start_cycle >= 0, got {cycles}, {start_cycle}")
    need = (start_cycle + cycles) * spc
    if len(series) < need:
        raise AnalysisError(
            f"window of cycles {start_cycle}..{start_cycle + cycles} needs {need} samples, "
            f"series '{series.name}' has {len(series)}"
        )
    return series.values[start_cycle * spc : need]


def harmonic_spectrum(
    series: TimeSeries, fundamental: float, cycles: int, start_cycle: int = 0, H: int = DEFAULT_HARMONICS
) -> HarmonicSpectrum:
    """Rectangular-window DFT over exactly ``cycles`` whole periods."""
    if H < 2:
        raise AnalysisError(f"need at least 2 harmonics, got H={H}")
    spc = samples_per_cycle(series.dt, fundamental)
    if spc < 2 * H + 2:
        raise AnalysisError(f"{spc} samples per cycle cannot resolve {H} harmonics (need {2 * H + 2})")
    x = cycle_window(series, fundamental, cycles, start_cycle)
    X = np.fft.rfft(x)
    n = len(x)
    bins = np.arange(1, H + 1) * cycles
    phasors = 2 * X[bins] / n
    return HarmonicSpectrum(fundamental, phasors, float(X[0].real / n))


def thd(spectrum: HarmonicSpectrum) -> float:
    """Total harmonic distortion relative to the fundamental, in percent."""
    m = spectrum.magnitudes
    if not m[0] > 0:
        raise AnalysisError("THD undefined: fundamental magnitude is zero")
    return 100.0 * math.sqrt(float(np.sum(m[1:] ** 2))) / m[0]


def instantaneous_powers(v, i, dt: float = 1.0, t0: float = 0.0) -> PowerSeries:
    """Three-phase instantaneous active and reactive power.

    ``v`` and ``i`` are (3, N) arrays or sequences of three TimeSeries.
    Reactive power is positive for lagging current.
    """
    v = _stack(v)
    i = _stack(i)
    if v.shape != i.shape or v.shape[0] != 3:
        raise AnalysisError(f"voltage and current must both be 3 x N, got {v.shape} and {i.shape}")
    va, vb, vc = v
    ia, ib, ic = i
    p = va * ia + vb * ib + vc * ic
    q = ((va - vb) * ic + (vb - vc) * ia + (vc - va) * ib) / math.sqrt(3)
    return PowerSeries(p, q, dt, t0)


def _stack(x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x
    return np.vstack([s.values if isinstance(s, TimeSeries) else np.asarray(s) for s in x])


def rms(series: TimeSeries, over: int, fundamental: float, start_cycle: int = 0) -> float:
    x = cycle_window(series, fundamental, over, start_cycle)
    return float(np.sqrt(np.mean(x**2)))
