"""Uniformly sampled signals and named bundles of them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class TimeSeries:
    name: str
    unit: str
    values: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.dt <= 0:
            raise ConfigError(f"sample interval must be positive, got {self.dt}")

    def __len__(self):
        return len(self.values)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.values)) * self.dt


@dataclass
class SignalBundle:
    """Named signals sharing one time base.

    ``signals`` maps a signal name (``v_load_a``) to its sample array and
    ``units`` maps the same name to its unit suffix (``V``).
    """

    dt: float
    signals: dict[str, np.ndarray] = field(default_factory=dict)
    units: dict[str, str] = field(default_factory=dict)
    t0: float = 0.0
    metadata: dict = field(default_factory=dict)

    def add(self, name: str, unit: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if self.signals and len(values) != self.n_samples:
            raise ConfigError(f"signal '{name}' has {len(values)} samples, bundle has {self.n_samples}")
        self.signals[name] = values
        self.units[name] = unit

    @property
    def n_samples(self) -> int:
        if not self.signals:
            return 0
        return len(next(iter(self.signals.values())))

    @property
    def t(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_samples) * self.dt

    def __getitem__(self, name: str) -> np.ndarray:
        return self.signals[name]

    def __contains__(self, name: str) -> bool:
        return name in self.signals

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(name, self.units[name], self.signals[name], self.dt, self.t0)

    def phases(self, prefix: str) -> np.ndarray:
        """Stack ``prefix_a``, ``prefix_b``, ``prefix_c`` into a (3, N) array."""
        return np.vstack([self.signals[f"{prefix}_{ph}"] for ph in "abc"])

    def select(self, patterns) -> SignalBundle:
        """Sub-bundle of signals whose names match any fnmatch pattern."""
        from fnmatch import fnmatchcase

        out = SignalBundle(self.dt, t0=self.t0, metadata=dict(self.metadata))
        for name, vals in self.signals.items():
            if any(fnmatchcase(name, pat) for pat in patterns):
                out.add(name, self.units[name], vals)
        return out
