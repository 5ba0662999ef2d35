"""Time-domain simulation of a grid-to-load link with a series, binary-weighted
multi-stage voltage-reinjection converter."""

__version__ = "0.1.0"

from .analysis import HarmonicSpectrum, PowerSeries, harmonic_spectrum, instantaneous_powers, rms, thd
from .circuit import (
    CircuitState,
    GridSource,
    LineParams,
    LoadParams,
    Network,
    TransformerStage,
    grid_emf,
    injected_voltage,
    referred_stage_impedance,
    step,
)
from .control import Event, ReferenceSpec, apply_events, injection_reference, sliding_rms
from .converter import (
    ConverterParams,
    LevelTableRow,
    StateWord,
    enumerate_states,
    nearest_state,
    phase_voltage,
    pole_voltage,
    quantize_waveform,
)
from .errors import AnalysisError, ConfigError, SimulationError
from .export import read_csv, write_csv
from .scenario import Scenario, load_scenario, parse_scenario
from .simulation import run_simulation
from .timeseries import SignalBundle, TimeSeries
