"""Scalar summary of a simulated scenario."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import cycle_window, harmonic_spectrum, rms, thd
from .circuit import PHASES
from .control import recovery_time, sliding_rms
from .scenario import Scenario
from .timeseries import SignalBundle, TimeSeries

RESTORE_BAND = 0.02


@dataclass
class Summary:
    thd_load: dict[str, float]
    rms_grid: dict[str, float]
    rms_load: dict[str, float]
    mean_p: float
    mean_q: float
    inj_levels: dict[str, int]
    window: tuple[int, int]
    recovery: list[tuple[str, float, float | None]] = field(default_factory=list)

    def lines(self, stages: int) -> list[str]:
        c0, n = self.window
        out = [f"analysis window: cycles {c0}..{c0 + n} ({n} cycles)"]
        for ph in PHASES:
            out.append(
                f"phase {ph}: load THD {self.thd_load[ph]:.3f} %  grid rms {self.rms_grid[ph]:.1f} V  "
                f"load rms {self.rms_load[ph]:.1f} V  injected levels {self.inj_levels[ph]}"
            )
        out.append(f"{stages}-stage load THD (phase mean): {np.mean(list(self.thd_load.values())):.3f} %")
        out.append(f"mean p {self.mean_p:.1f} W  mean q {self.mean_q:.1f} var")
        for kind, start, rec in self.recovery:
            txt = "not restored" if rec is None else f"{rec:.4f} s"
            out.append(f"{kind} at {start:g} s: load rms recovery {txt}")
        return out


def mean_load_rms(bundle: SignalBundle, period: float) -> TimeSeries:
    """One-cycle sliding rms averaged over the three load phases."""
    traces = [sliding_rms(bundle.series(f"v_load_{ph}"), period).values for ph in PHASES]
    return TimeSeries("v_load_rms", "V", np.mean(traces, axis=0), bundle.dt, bundle.t0)


def event_recovery(bundle: SignalBundle, scenario: Scenario, band: float = RESTORE_BAND):
    """Per event: (kind, start, seconds until load rms settles within band).

    The reference level is the sliding rms one sample before the event.
    """
    trace = mean_load_rms(bundle, scenario.grid.period)
    out = []
    for ev in scenario.events:
        k = int(round(ev.start / bundle.dt)) - 1
        if k < 0 or not np.isfinite(trace.values[k]):
            out.append((ev.kind, ev.start, None))
            continue
        until = None if np.isinf(ev.end) else ev.end
        out.append((ev.kind, ev.start, recovery_time(trace, ev.start, trace.values[k], band, until)))
    return out


def summarize(bundle: SignalBundle, scenario: Scenario) -> Summary:
    f = scenario.frequency
    c0, n, H = scenario.start_cycle, scenario.cycles, scenario.harmonics
    thd_load, rms_g, rms_l, levels = {}, {}, {}, {}
    for ph in PHASES:
        load = bundle.series(f"v_load_{ph}")
        thd_load[ph] = thd(harmonic_spectrum(load, f, n, c0, H))
        rms_l[ph] = rms(load, n, f, c0)
        rms_g[ph] = rms(bundle.series(f"v_grid_{ph}"), n, f, c0)
        levels[ph] = int(len(np.unique(bundle[f"v_inj_{ph}"])))
    p = cycle_window(bundle.series("p"), f, n, c0)
    q = cycle_window(bundle.series("q"), f, n, c0)
    s = Summary(thd_load, rms_g, rms_l, float(np.mean(p)), float(np.mean(q)), levels, (c0, n))
    s.recovery = event_recovery(bundle, scenario)
    return s
