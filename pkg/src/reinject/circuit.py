"""Per-phase network between grid and load, integrated with the trapezoidal rule.

Each phase is a series branch (line plus the leakage of every injection
stage) feeding the load terminal::

    L_tot di/dt = v_grid + v_inj - R_tot i - v_load

With the linear load (R parallel C) ``v_load`` is the capacitor voltage and
``C dv/dt = i - v/R``.  The diode-bridge variant keeps a capacitor ``C`` on
every phase terminal and rectifies into a DC bus (``R`` parallel ``C_dc``)
through an ideal bridge with a small conduction resistance; diode states are
re-evaluated only at sample boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .converter import ConverterParams, pole_voltage
from .errors import ConfigError, SimulationError

PHASES = "abc"
PHASE_OFFSETS = (0.0, -2 * math.pi / 3, 2 * math.pi / 3)

LOAD_MODELS = ("rc", "diode_bridge")


@dataclass(frozen=True)
class TransformerStage:
    """One series injection transformer.

    Per-unit winding values are on ``v_base``/``s_base``; the LV winding
    defaults to the HV values.  ``ratio`` scales the converter pole voltage
    into the series EMF.
    """

    ratio: float
    r_pu: float = 0.002
    x_pu: float = 0.08
    v_base: float = 3000.0
    s_base: float = 1e6
    r_lv_pu: float | None = None
    x_lv_pu: float | None = None

    def __post_init__(self):
        for name in ("r_pu", "x_pu", "r_lv_pu", "x_lv_pu"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ConfigError(f"stage {name} must be non-negative, got {val}")
        if self.v_base <= 0 or self.s_base <= 0:
            raise ConfigError(f"stage bases must be positive, got v_base={self.v_base}, s_base={self.s_base}")

    @property
    def z_base(self) -> float:
        return self.v_base**2 / self.s_base


@dataclass(frozen=True)
class LineParams:
    l_line: float = 0.010
    r_line: float = 0.01

    def __post_init__(self):
        if not self.l_line > 0:
            raise ConfigError(f"line inductance must be positive, got {self.l_line}")
        if self.r_line < 0:
            raise ConfigError(f"line resistance must be non-negative, got {self.r_line}")


@dataclass(frozen=True)
class LoadParams:
    r_load: float = 60.0
    c_load: float = 150e-6
    model: str = "rc"
    # diode-bridge variant only
    diode_r: float = 1.0
    dc_c: float = 1e-3

    def __post_init__(self):
        if not self.r_load > 0 or not self.c_load > 0:
            raise ConfigError(f"load R and C must be positive, got R={self.r_load}, C={self.c_load}")
        if self.model not in LOAD_MODELS:
            raise ConfigError(f"load model must be one of {LOAD_MODELS}, got {self.model!r}")
        if not self.diode_r > 0 or not self.dc_c > 0:
            raise ConfigError("diode conduction resistance and DC capacitance must be positive")


@dataclass(frozen=True)
class GridSource:
    v_rms_ll: float = 11000.0
    frequency: float = 50.0
    offsets: tuple[float, float, float] = PHASE_OFFSETS

    def __post_init__(self):
        if not self.v_rms_ll > 0 or not self.frequency > 0:
            raise ConfigError("grid voltage and frequency must be positive")

    @property
    def peak(self) -> float:
        return self.v_rms_ll * math.sqrt(2) / math.sqrt(3)

    @property
    def period(self) -> float:
        return 1.0 / self.frequency


@dataclass
class CircuitState:
    i_line: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v_cap: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t: float = 0.0
    v_bus: float = 0.0

    def __post_init__(self):
        self.i_line = np.asarray(self.i_line, dtype=float)
        self.v_cap = np.asarray(self.v_cap, dtype=float)


def grid_emf(t, src: GridSource, scale=1.0) -> np.ndarray:
    """Phase-to-neutral grid EMF; shape (3,) for scalar ``t``, else (3, N)."""
    t = np.asarray(t, dtype=float)
    w = 2 * math.pi * src.frequency
    ph = np.array(src.offsets).reshape((3,) + (1,) * t.ndim)
    return np.asarray(scale) * src.peak * np.sin(w * t + ph)


def referred_stage_impedance(stage: TransformerStage, frequency: float) -> tuple[float, float]:
    """Series (R, L) of one stage with both windings lumped on its base."""
    if not frequency > 0:
        raise ConfigError(f"frequency must be positive, got {frequency}")
    r_lv = stage.r_pu if stage.r_lv_pu is None else stage.r_lv_pu
    x_lv = stage.x_pu if stage.x_lv_pu is None else stage.x_lv_pu
    zb = stage.z_base
    return (stage.r_pu + r_lv) * zb, (stage.x_pu + x_lv) * zb / (2 * math.pi * frequency)


def injected_voltage(codes, params: ConverterParams, stages: list[TransformerStage]):
    """Series EMF from per-phase state values.

    ``codes`` holds integer state values (any shape).  Returns the total EMF
    and a list with each stage's secondary EMF; the total is the running sum
    of the stage list in order, so the two agree exactly.
    """
    if len(stages) != params.p:
        raise ConfigError(f"{len(stages)} transformer stages for a {params.p}-stage converter")
    codes = np.asarray(codes)
    per_stage = [st.ratio * pole_voltage((codes >> k) & 1, params.v_dc) for k, st in enumerate(stages)]
    total = np.zeros(codes.shape)
    for v in per_stage:
        total = total + v
    return total, per_stage


@dataclass(frozen=True)
class Network:
    """Lumped per-phase series branch plus load."""

    r_tot: float
    l_tot: float
    load: LoadParams | None

    def __post_init__(self):
        if not self.l_tot > 0 or self.r_tot < 0:
            raise ConfigError(f"series branch needs L > 0 and R >= 0, got R={self.r_tot}, L={self.l_tot}")

    @property
    def bridge(self) -> bool:
        return self.load is not None and self.load.model == "diode_bridge"

    def matrices(self, dt: float, mode=None) -> tuple[np.ndarray, np.ndarray]:
        return _matrices(self, float(dt), mode)


def _state_matrix(net: Network, mode):
    """Continuous-time (M, N) with dx/dt = M x + N u.

    Linear load: x = [i, v] per phase, u = drive.  Shorted load (``load`` is
    None): x = [i].  Bridge: x = [i_a, i_b, i_c, v_a, v_b, v_c, v_bus],
    u = 3 drives, ``mode`` = (hi, lo) conducting pair or None.
    """
    R, L = net.r_tot, net.l_tot
    if net.load is None:
        return np.array([[-R / L]]), np.array([1 / L])
    ld = net.load
    if not net.bridge:
        C, Rl = ld.c_load, ld.r_load
        return np.array([[-R / L, -1 / L], [1 / C, -1 / (Rl * C)]]), np.array([1 / L, 0.0])
    M = np.zeros((7, 7))
    N = np.zeros((7, 3))
    for k in range(3):
        M[k, k] = -R / L
        M[k, 3 + k] = -1 / L
        M[3 + k, k] = 1 / ld.c_load
        N[k, k] = 1 / L
    M[6, 6] = -1 / (ld.r_load * ld.dc_c)
    if mode is not None:
        hi, lo = mode
        g = 1 / ld.diode_r
        # i_d = g (v_hi - v_lo - v_bus) leaves node hi, enters node lo and the bus
        row = np.zeros(7)
        row[3 + hi], row[3 + lo], row[6] = g, -g, -g
        M[3 + hi] -= row / ld.c_load
        M[3 + lo] += row / ld.c_load
        M[6] += row / ld.dc_c
    return M, N


@lru_cache(maxsize=64)
def _matrices(net: Network, dt: float, mode):
    M, N = _state_matrix(net, mode)
    n = M.shape[0]
    lhs = np.eye(n) - dt / 2 * M
    A = np.linalg.solve(lhs, np.eye(n) + dt / 2 * M)
    B = np.linalg.solve(lhs, dt / 2 * N.reshape(n, -1))
    return A, B


def bridge_mode(v_cap, v_bus: float):
    """Conducting (hi, lo) phase pair of the ideal bridge, or None."""
    hi, lo = int(np.argmax(v_cap)), int(np.argmin(v_cap))
    if v_cap[hi] - v_cap[lo] - v_bus > 0:
        return hi, lo
    return None


def step(state: CircuitState, drive_start, drive_end, network: Network, dt: float) -> CircuitState:
    """Advance one trapezoidal step.

    ``drive_*`` is the per-phase series EMF (grid plus injected) at the two
    ends of the step.  With ``network.load`` None the load terminal is
    shorted and ``v_cap`` stays at zero.
    """
    if not dt > 0:
        raise ConfigError(f"time step must be positive, got {dt}")
    w = np.asarray(drive_start, dtype=float) + np.asarray(drive_end, dtype=float)
    if network.bridge:
        mode = bridge_mode(state.v_cap, state.v_bus)
        A, B = network.matrices(dt, mode)
        x = np.concatenate([state.i_line, state.v_cap, [state.v_bus]])
        x = A @ x + B @ w
        new = CircuitState(x[:3], x[3:6], state.t + dt, float(x[6]))
    elif network.load is None:
        A, B = network.matrices(dt)
        i = A[0, 0] * state.i_line + B[0, 0] * w
        new = CircuitState(i, np.zeros(3), state.t + dt)
    else:
        A, B = network.matrices(dt)
        x = A @ np.vstack([state.i_line, state.v_cap]) + B @ w[None, :]
        new = replace(state, i_line=x[0], v_cap=x[1], t=state.t + dt)
    check_finite(new)
    return new


def check_finite(state: CircuitState) -> None:
    for arr, label in ((state.i_line, "line current"), (state.v_cap, "load voltage")):
        bad = ~np.isfinite(arr)
        if bad.any():
            k = int(np.argmax(bad))
            raise SimulationError(
                f"non-finite {label} at t={state.t:.6g} s, phase {PHASES[k]}: "
                f"i={state.i_line.tolist()}, v={state.v_cap.tolist()}"
            )


def integrate(network: Network, drive: np.ndarray, dt: float, state: CircuitState | None = None):
    """Integrate over a sampled drive of shape (3, N).

    Returns ``(i_line, v_load)`` arrays of shape (3, N) whose column 0 is
    the initial state.  The recurrence is the same one ``step`` applies.
    """
    state = state or CircuitState()
    n = drive.shape[1]
    i_out = np.empty((3, n))
    v_out = np.empty((3, n))
    i_out[:, 0], v_out[:, 0] = state.i_line, state.v_cap
    w = drive[:, :-1] + drive[:, 1:]
    if network.bridge:
        _integrate_bridge(network, w, dt, state, i_out, v_out)
    else:
        A, B = network.matrices(dt)
        # plain-float inner loop per phase; several times faster than numpy on 3-vectors
        shorted = network.load is None
        a00, b0 = float(A[0, 0]), float(B[0, 0])
        if not shorted:
            a01, a10, a11, b1 = float(A[0, 1]), float(A[1, 0]), float(A[1, 1]), float(B[1, 0])
        for ph in range(3):
            i, v = float(state.i_line[ph]), float(state.v_cap[ph])
            io, vo = [i], [v]
            if shorted:
                for wk in w[ph].tolist():
                    i = a00 * i + b0 * wk
                    io.append(i)
                vo = [0.0] * n
            else:
                for wk in w[ph].tolist():
                    i, v = a00 * i + a01 * v + b0 * wk, a10 * i + a11 * v + b1 * wk
                    io.append(i)
                    vo.append(v)
            i_out[ph] = io
            v_out[ph] = vo
    _locate_non_finite(i_out, v_out, state.t, dt)
    return i_out, v_out


def _integrate_bridge(network, w, dt, state, i_out, v_out):
    x = np.concatenate([state.i_line, state.v_cap, [state.v_bus]])
    for k in range(w.shape[1]):
        A, B = network.matrices(dt, bridge_mode(x[3:6], x[6]))
        x = A @ x + B @ w[:, k]
        i_out[:, k + 1] = x[:3]
        v_out[:, k + 1] = x[3:6]


def _locate_non_finite(i_out, v_out, t0, dt):
    bad = ~(np.isfinite(i_out) & np.isfinite(v_out))
    if bad.any():
        k = int(np.flatnonzero(bad.any(axis=0))[0])
        ph = int(np.argmax(bad[:, k]))
        raise SimulationError(
            f"non-finite state at t={t0 + k * dt:.6g} s, phase {PHASES[ph]}: "
            f"i={i_out[ph, k]}, v={v_out[ph, k]}"
        )


def branch_derivative(network: Network, drive, i_line, v_load):
    """di/dt of the series branch evaluated at each sample."""
    return (drive - network.r_tot * i_line - v_load) / network.l_tot


def kvl_residual(network: Network, drive, i_line, v_load, dt: float) -> np.ndarray:
    """Per-step residual of the branch equation under the trapezoidal scheme.

    For step n the scheme asserts
    L (i[n+1]-i[n])/dt = mean(drive) - R mean(i) - mean(v_load)
    over the step end points; the return value is the left side minus the
    right side, shape (3, N-1).
    """
    mid = lambda x: (x[:, :-1] + x[:, 1:]) / 2  # noqa: E731
    didt = np.diff(i_line, axis=1) / dt
    return mid(drive) - network.r_tot * mid(i_line) - network.l_tot * didt - mid(v_load)
