"""Switching mathematics of the binary-weighted multi-stage converter.

Each stage is a two-level converter leg whose pole sits at +v_dc/2 (switch
on) or -v_dc/2 (switch off).  Stage k is coupled through a transformer with
weight 2**(k-1), so a p-stage stack synthesises the 2**p odd multiples of
v_dc/2 between -(2**p - 1) and +(2**p - 1).  There is no zero level.

State words are written most-significant stage first, so the rightmost
character of ``"001"`` is stage 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .timeseries import TimeSeries

MAX_STAGES = 16

WEIGHTINGS = ("binary", "identical")


@dataclass(frozen=True)
class StateWord:
    """Switch states of one phase's converter stack.

    ``bits[0]`` is stage 1 (least significant).
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ConfigError("state word needs at least one stage")
        if any(b not in (0, 1) for b in self.bits):
            raise ConfigError(f"state word bits must be 0/1, got {self.bits}")

    @property
    def p(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        return sum(b << k for k, b in enumerate(self.bits))

    @classmethod
    def from_int(cls, b: int, p: int) -> StateWord:
        if not 0 <= b < 2**p:
            raise ConfigError(f"state value {b} outside [0, {2**p - 1}] for p={p}")
        return cls(tuple((b >> k) & 1 for k in range(p)))

    @classmethod
    def from_string(cls, text: str) -> StateWord:
        return cls(tuple(int(c) for c in reversed(text.strip())))

    def __str__(self) -> str:
        return "".join(str(b) for b in reversed(self.bits))


@dataclass(frozen=True)
class ConverterParams:
    """Stage count and DC link voltage.

    ``weighting="identical"`` gives every stage weight 1; it exists only to
    compare against the binary stack and breaks the one-to-one mapping
    between words and levels.
    """

    p: int
    v_dc: float
    weighting: str = "binary"
    weights: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not 1 <= self.p <= MAX_STAGES:
            raise ConfigError(f"stage count must be an integer in [1, {MAX_STAGES}], got {self.p!r}")
        if not np.isfinite(self.v_dc) or self.v_dc <= 0:
            raise ConfigError(f"DC link voltage must be positive, got {self.v_dc!r}")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if self.weighting == "binary":
            w = tuple(2**k for k in range(self.p))
        else:
            w = (1,) * self.p
        object.__setattr__(self, "weights", w)

    @property
    def n_levels(self) -> int:
        return 2**self.p

    @property
    def max_level(self) -> float:
        return sum(self.weights) * self.v_dc / 2


@dataclass(frozen=True)
class LevelTableRow:
    word: StateWord
    state_value: int
    voltage: float


def pole_voltage(n, v_dc):
    """Output of one two-level leg: +v_dc/2 when on, -v_dc/2 when off.

    Works elementwise on arrays of switch states.
    """
    if np.ndim(n):
        return (2 * np.asarray(n) - 1) * (v_dc / 2)
    return (2 * n - 1) * (v_dc / 2)


def _check_word(word: StateWord, params: ConverterParams):
    if word.p != params.p:
        raise ConfigError(f"state word has {word.p} stages, converter has {params.p}")


def phase_voltage(word: StateWord, params: ConverterParams) -> float:
    _check_word(word, params)
    return float(sum(w * pole_voltage(b, params.v_dc) for w, b in zip(params.weights, word.bits)))


def level_of(b, params: ConverterParams):
    """Synthesised voltage for integer state value(s) ``b``."""
    b = np.asarray(b)
    total = np.zeros(b.shape)
    for k, w in enumerate(params.weights):
        total = total + w * pole_voltage((b >> k) & 1, params.v_dc)
    return total


def enumerate_states(params: ConverterParams) -> list[LevelTableRow]:
    """All 2**p switching states, ascending by voltage (ties by state value)."""
    rows = []
    for b in range(params.n_levels):
        word = StateWord.from_int(b, params.p)
        v = phase_voltage(word, params)
        # state value expressed in units of v_dc/2
        rows.append(LevelTableRow(word, int(round(2 * v / params.v_dc)), v))
    rows.sort(key=lambda r: (r.voltage, r.word.value))
    return rows


def nearest_states(v_ref, params: ConverterParams) -> np.ndarray:
    """Vectorised nearest-level selection returning integer state values.

    Exact ties go to the higher level; references beyond the synthesisable
    range saturate at the extreme words.
    """
    v = np.asarray(v_ref, dtype=float)
    if params.weighting == "binary":
        top = params.n_levels - 1
        half = params.v_dc / 2
        b0 = np.clip(np.floor((v / half + top) / 2 + 0.5), 0, top).astype(np.int64)
        # the division can round a near-tie either way; settle it on actual distances
        cands = np.clip(np.stack([b0 + 1, b0, b0 - 1]), 0, top)
        dist = np.abs(v - (2 * cands - top) * half)
        # candidates run high to low, so argmin keeps the higher level on a tie
        return np.take_along_axis(cands, np.argmin(dist, axis=0)[None], axis=0)[0]
    # general weights: pick among distinct levels, lowest word per level
    rows = enumerate_states(params)
    levels, first = [], []
    for r in rows:
        if not levels or r.voltage != levels[-1]:
            levels.append(r.voltage)
            first.append(r.word.value)
    levels = np.array(levels)
    mids = (levels[:-1] + levels[1:]) / 2
    # side="right" sends a reference sitting on a midpoint upward
    idx = np.searchsorted(mids, v, side="right")
    return np.array(first, dtype=np.int64)[idx]


def nearest_state(v_ref: float, params: ConverterParams) -> StateWord:
    return StateWord.from_int(int(nearest_states(v_ref, params)), params.p)


def quantize_waveform(reference: TimeSeries, params: ConverterParams) -> tuple[TimeSeries, np.ndarray]:
    """Nearest-level staircase for a sampled reference.

    Returns the staircase and the per-sample integer state values (use
    ``StateWord.from_int`` to expand one).
    """
    codes = nearest_states(reference.values, params)
    stair = TimeSeries(reference.name, reference.unit, level_of(codes, params), reference.dt, reference.t0)
    return stair, codes
