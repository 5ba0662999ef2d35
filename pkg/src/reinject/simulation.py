"""Time-domain run of a scenario, producing the full signal bundle."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .analysis import harmonic_spectrum, instantaneous_powers
from .circuit import PHASES, branch_derivative, grid_emf, injected_voltage, integrate
from .control import ReferenceSpec, apply_events, injection_reference
from .converter import nearest_states
from .errors import ConfigError
from .scenario import Scenario
from .timeseries import SignalBundle, TimeSeries

# references beyond this multiple of the largest level are treated as misconfiguration
RANGE_LIMIT = 2.0
ZERO_SNAP = 1e-12


@lru_cache(maxsize=32)
def warmup_reference(scenario: Scenario) -> float:
    """Steady-state load fundamental (rms, averaged over phases) with the converter off."""
    n = scenario.warmup_cycles
    base = scenario.with_(
        converter_enabled=False,
        events=(),
        duration=n / scenario.frequency,
        start_cycle=n - 2,
        cycles=2,
        harmonics=2,
    )
    bundle = run_simulation(base)
    amps = [
        harmonic_spectrum(bundle.series(f"v_load_{ph}"), scenario.frequency, 2, n - 2, H=2)[1] for ph in PHASES
    ]
    return float(np.mean(amps)) / math.sqrt(2)


def reference_spec(scenario: Scenario) -> ReferenceSpec:
    rms = scenario.reference_rms if scenario.reference_rms is not None else warmup_reference(scenario)
    return ReferenceSpec(rms, scenario.frequency, scenario.grid.offsets)


def run_simulation(scenario: Scenario) -> SignalBundle:
    """Simulate ``scenario`` from a zero initial state.

    Signals (phase suffix ``_a``/``_b``/``_c``): ``v_grid``, ``i_grid``,
    ``v_load``, ``v_inj`` (total series EMF), ``v_stage<k>`` (stage k
    secondary EMF), ``v_saf`` (injected EMF less the stages' series drop),
    plus ``p`` and ``q`` at the load terminals.
    """
    dt = scenario.dt
    n = scenario.n_samples
    t = np.arange(n) * dt
    scale = apply_events(scenario.events, t)
    v_grid = grid_emf(t, scenario.grid, scale)
    params = scenario.converter
    stages = scenario.transformer_stages
    meta = {
        "scenario": scenario.digest(),
        "dt_s": dt,
        "duration_s": scenario.duration,
        "stages": params.p,
        "v_dc_V": params.v_dc,
    }

    if scenario.converter_enabled:
        ref = reference_spec(scenario)
        inj_ref = injection_reference(ref.waveform(t), v_grid)
        # rounding noise at zero crossings would otherwise pick the tie side at random
        inj_ref[np.abs(inj_ref) < ZERO_SNAP * scenario.grid.peak] = 0.0
        full_swing = params.max_level * scenario.turns_scale
        worst = float(np.max(np.abs(inj_ref)))
        if worst > RANGE_LIMIT * full_swing:
            raise ConfigError(
                f"injection reference peaks at {worst:.1f} V, more than {RANGE_LIMIT:g}x the "
                f"{params.p}-stage range of {full_swing:.1f} V (raise converter.v_dc_volt or converter.stages)",
                key="converter.v_dc_volt",
            )
        codes = nearest_states(inj_ref / scenario.turns_scale, params)
        v_inj, per_stage = injected_voltage(codes, params, stages)
        meta["reference_rms_V"] = ref.nominal_rms
        meta["saturated"] = worst > full_swing
    else:
        v_inj = np.zeros_like(v_grid)
        per_stage = [np.zeros_like(v_grid) for _ in stages]

    network = scenario.network
    drive = v_grid + v_inj
    i_line, v_load = integrate(network, drive, dt)

    r_st, l_st = scenario.stage_series()
    didt = branch_derivative(network, drive, i_line, v_load)
    v_saf = v_inj - r_st * i_line - l_st * didt
    pq = instantaneous_powers(v_load, i_line, dt)

    meta["r_tot_ohm"] = network.r_tot
    meta["l_tot_H"] = network.l_tot
    bundle = SignalBundle(dt, metadata=meta)
    for k, ph in enumerate(PHASES):
        bundle.add(f"v_grid_{ph}", "V", v_grid[k])
    for k, ph in enumerate(PHASES):
        bundle.add(f"i_grid_{ph}", "A", i_line[k])
    for k, ph in enumerate(PHASES):
        bundle.add(f"v_load_{ph}", "V", v_load[k])
    for k, ph in enumerate(PHASES):
        bundle.add(f"v_inj_{ph}", "V", v_inj[k])
    for s, vs in enumerate(per_stage, start=1):
        for k, ph in enumerate(PHASES):
            bundle.add(f"v_stage{s}_{ph}", "V", vs[k])
    for k, ph in enumerate(PHASES):
        bundle.add(f"v_saf_{ph}", "V", v_saf[k])
    bundle.add("p", "W", pq.p)
    bundle.add("q", "var", pq.q)
    return bundle


def load_series(bundle: SignalBundle, phase: str = "a") -> TimeSeries:
    return bundle.series(f"v_load_{phase}")
