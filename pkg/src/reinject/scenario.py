"""Scenario configuration: a flat ``section.key = value`` document.

Lines are ``key = value`` with ``#`` starting a comment.  Values are
numbers, ``true``/``false``, ``auto``, ``inf`` or bare/quoted strings.
Events are indexed: ``events[0].kind = sag``.  Unknown keys are errors.

Physical quantities carry their SI unit in the key name.  Per-unit values
appear only under ``stage.*`` together with their bases.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, replace

from .circuit import GridSource, LineParams, LoadParams, Network, TransformerStage, referred_stage_impedance
from .control import Event, check_events
from .converter import MAX_STAGES, ConverterParams
from .errors import ConfigError

AUTO = "auto"

_BOOL = {"true": True, "false": False, "yes": True, "no": False, "on": True, "off": False}


def _float(text):
    return float(text)


def _pos_float(text):
    v = float(text)
    if not v > 0:
        raise ValueError("must be positive")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise ValueError("must be non-negative")
    return v


def _int(text):
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ValueError("expected an integer")
    return int(text)


def _bool(text):
    try:
        return _BOOL[text.lower()]
    except KeyError:
        raise ValueError("expected true or false") from None


def _auto_or(conv):
    def parse(text):
        return None if text.lower() == AUTO else conv(text)

    return parse


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _patterns(text):
    pats = [p.strip() for p in text.split(",") if p.strip()]
    if not pats:
        raise ValueError("expected a comma-separated list of signal names or patterns")
    return tuple(pats)


# key -> (converter, default); defaults are the document-level values
SCHEMA = {
    "grid.v_rms_ll_volt": (_pos_float, 11000.0),
    "grid.frequency_hz": (_pos_float, 50.0),
    "converter.stages": (_int, 3),
    "converter.v_dc_volt": (_auto_or(_pos_float), None),
    "converter.enabled": (_bool, True),
    "converter.reference_rms_volt": (_auto_or(_pos_float), None),
    "converter.r_on_ohm": (_nonneg_float, 1e-3),
    "converter.snubber_r_ohm": (_pos_float, 1e5),
    "converter.snubber_c_farad": (_pos_float, math.inf),
    "stage.weighting": (_choice("binary", "identical"), "binary"),
    "stage.turns_scale": (_pos_float, 1.0),
    "stage.lv_v_rms_volt": (_pos_float, 3000.0),
    "stage.s_base_va": (_pos_float, 1e6),
    "stage.hv_r_pu": (_nonneg_float, 0.002),
    "stage.hv_x_pu": (_nonneg_float, 0.08),
    "stage.lv_r_pu": (_nonneg_float, 0.002),
    "stage.lv_x_pu": (_nonneg_float, 0.08),
    "stage.mag_r_pu": (_pos_float, 6.0),
    "stage.mag_x_pu": (_pos_float, 0.038),
    "line.l_henry": (_float, 0.010),
    "line.r_ohm": (_float, 0.01),
    "load.model": (_choice("rc", "diode_bridge"), "rc"),
    "load.r_ohm": (_float, 60.0),
    "load.c_farad": (_float, 150e-6),
    "load.diode_r_ohm": (_pos_float, 1.0),
    "load.dc_c_farad": (_pos_float, 1e-3),
    "sim.duration_s": (_pos_float, 2.5),
    "sim.dt_s": (_pos_float, 1e-5),
    "sim.warmup_cycles": (_int, 10),
    "sim.output": (_patterns, ("*",)),
    "analysis.start_cycle": (_int, 75),
    "analysis.cycles": (_int, 50),
    "analysis.harmonics": (_int, 49),
    "analysis.phase": (_choice("a", "b", "c"), "a"),
}

EVENT_SCHEMA = {
    "kind": (_choice("sag", "swell"), None),
    "start_s": (_nonneg_float, None),
    "end_s": (_pos_float, math.inf),
    "magnitude": (_pos_float, None),
}

# rated system parameter -> config key carrying it (one each)
RATED_KEYS = {
    "HV side rated voltage 11 kV": ("grid.v_rms_ll_volt", 11000.0),
    "HV winding resistance 0.002 pu": ("stage.hv_r_pu", 0.002),
    "HV winding reactance 0.08 pu": ("stage.hv_x_pu", 0.08),
    "LV side rated voltage 3 kV": ("stage.lv_v_rms_volt", 3000.0),
    "LV winding resistance 0.002 pu": ("stage.lv_r_pu", 0.002),
    "LV winding reactance 0.08 pu": ("stage.lv_x_pu", 0.08),
    "magnetization resistance 6 pu": ("stage.mag_r_pu", 6.0),
    "magnetization reactance 0.038 pu": ("stage.mag_x_pu", 0.038),
    "number of stages 3": ("converter.stages", 3),
    "IGBT on resistance 1 mOhm": ("converter.r_on_ohm", 1e-3),
    "snubber resistance 100 kOhm": ("converter.snubber_r_ohm", 1e5),
    "snubber capacitance infinite": ("converter.snubber_c_farad", math.inf),
    "load resistance 60 Ohm": ("load.r_ohm", 60.0),
    "load capacitance 150 uF": ("load.c_farad", 150e-6),
    "line inductance 10 mH": ("line.l_henry", 0.010),
}


def default_v_dc(stages: int, lv_v_rms: float = 3000.0, turns_scale: float = 1.0) -> float:
    """DC link voltage whose full binary swing equals the LV winding peak."""
    return 2 * math.sqrt(2) * lv_v_rms / ((2**stages - 1) * turns_scale)


@dataclass(frozen=True)
class Scenario:
    """Validated simulation scenario.

    ``v_dc`` and ``reference_rms`` may be None, meaning: derive from the
    stage count (full swing = LV winding peak) and from a disturbance-free
    warm-up run respectively.  Magnetizing-branch, IGBT and snubber values
    are recorded for completeness and do not enter the dynamics.
    """

    grid: GridSource = field(default_factory=GridSource)
    stages: int = 3
    v_dc: float | None = None
    converter_enabled: bool = True
    reference_rms: float | None = None
    r_on: float = 1e-3
    snubber_r: float = 1e5
    snubber_c: float = math.inf
    weighting: str = "binary"
    turns_scale: float = 1.0
    lv_v_rms: float = 3000.0
    s_base: float = 1e6
    hv_r_pu: float = 0.002
    hv_x_pu: float = 0.08
    lv_r_pu: float = 0.002
    lv_x_pu: float = 0.08
    mag_r_pu: float = 6.0
    mag_x_pu: float = 0.038
    line: LineParams = field(default_factory=LineParams)
    load: LoadParams = field(default_factory=LoadParams)
    events: tuple[Event, ...] = ()
    duration: float = 2.5
    dt: float = 1e-5
    warmup_cycles: int = 10
    output: tuple[str, ...] = ("*",)
    start_cycle: int = 75
    cycles: int = 50
    harmonics: int = 49
    phase: str = "a"

    def __post_init__(self):
        validate(self)

    @property
    def frequency(self) -> float:
        return self.grid.frequency

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.dt)) + 1

    @property
    def samples_per_cycle(self) -> int:
        return int(round(1 / (self.frequency * self.dt)))

    @property
    def converter(self) -> ConverterParams:
        v_dc = self.v_dc if self.v_dc is not None else default_v_dc(self.stages, self.lv_v_rms, self.turns_scale)
        return ConverterParams(self.stages, v_dc, self.weighting)

    @property
    def transformer_stages(self) -> list[TransformerStage]:
        weights = self.converter.weights
        return [
            TransformerStage(
                ratio=w * self.turns_scale,
                r_pu=self.hv_r_pu,
                x_pu=self.hv_x_pu,
                v_base=self.lv_v_rms,
                s_base=self.s_base,
                r_lv_pu=self.lv_r_pu,
                x_lv_pu=self.lv_x_pu,
            )
            for w in weights
        ]

    @property
    def network(self) -> Network:
        r, l = self.line.r_line, self.line.l_line
        for st in self.transformer_stages:
            rs, ls = referred_stage_impedance(st, self.frequency)
            r += rs
            l += ls
        return Network(r, l, self.load)

    def stage_series(self) -> tuple[float, float]:
        """Summed (R, L) of the injection stages alone."""
        net = self.network
        return net.r_tot - self.line.r_line, net.l_tot - self.line.l_line

    def with_(self, **changes) -> Scenario:
        return replace(self, **changes)

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()[:16]


def validate(sc: Scenario) -> None:
    if not 1 <= sc.stages <= MAX_STAGES:
        raise ConfigError(f"must be in [1, {MAX_STAGES}], got {sc.stages}", key="converter.stages")
    if sc.dt > sc.grid.period / 200:
        raise ConfigError(
            f"{sc.dt} s exceeds the resolution floor of period/200 = {sc.grid.period / 200:.3g} s", key="sim.dt_s"
        )
    spc = 1 / (sc.frequency * sc.dt)
    if abs(spc - round(spc)) > 1e-6 * spc:
        raise ConfigError(f"{sc.dt} s does not divide the grid period into whole samples", key="sim.dt_s")
    steps = sc.duration / sc.dt
    if abs(steps - round(steps)) > 1e-6 * steps:
        raise ConfigError(f"duration {sc.duration} s is not a whole number of {sc.dt} s steps", key="sim.duration_s")
    if sc.warmup_cycles < 3:
        raise ConfigError(f"need at least 3 warm-up cycles, got {sc.warmup_cycles}", key="sim.warmup_cycles")
    if sc.start_cycle < 0:
        raise ConfigError(f"must be non-negative, got {sc.start_cycle}", key="analysis.start_cycle")
    if sc.cycles < 1:
        raise ConfigError(f"must be at least 1, got {sc.cycles}", key="analysis.cycles")
    if sc.harmonics < 2:
        raise ConfigError(f"must be at least 2, got {sc.harmonics}", key="analysis.harmonics")
    if (sc.start_cycle + sc.cycles) * sc.grid.period > sc.duration * (1 + 1e-9):
        raise ConfigError(
            f"analysis window ends at cycle {sc.start_cycle + sc.cycles} but the run lasts "
            f"{sc.duration * sc.frequency:g} cycles",
            key="analysis.cycles",
        )
    if sc.samples_per_cycle < 2 * sc.harmonics + 2:
        raise ConfigError(f"{sc.samples_per_cycle} samples per cycle cannot resolve {sc.harmonics} harmonics", key="analysis.harmonics")
    check_events(sc.events)
    # building these runs the remaining parameter checks
    sc.converter
    sc.network


_LINE = re.compile(r"^\s*([A-Za-z_][\w.\[\]]*)\s*=\s*(.*?)\s*$")
_EVENT_KEY = re.compile(r"^events\[(\d+)\]\.(\w+)$")


def _strip_comment(line: str) -> str:
    out, quote = [], None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out)


def _unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def parse_document(text: str) -> dict[str, tuple[str, int]]:
    """Raw ``key -> (value text, line number)`` map with syntax checks."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = m.group(1), _unquote(m.group(2))
        if value == "":
            raise ConfigError("missing value", key=key, line=lineno)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", key=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


def _convert(key, conv, value, lineno):
    try:
        return conv(value)
    except ValueError as exc:
        raise ConfigError(f"invalid value {value!r}: {exc}", key=key, line=lineno) from None


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; every absent key takes its default."""
    entries = parse_document(text)
    vals = {k: d for k, (_, d) in SCHEMA.items()}
    events: dict[int, dict] = {}
    lines: dict[str, int] = {}
    for key, (value, lineno) in entries.items():
        lines[key] = lineno
        m = _EVENT_KEY.match(key)
        if m:
            idx, field_name = int(m.group(1)), m.group(2)
            if field_name not in EVENT_SCHEMA:
                raise ConfigError(f"unknown event field (expected {', '.join(EVENT_SCHEMA)})", key=key, line=lineno)
            events.setdefault(idx, {})[field_name] = (_convert(key, EVENT_SCHEMA[field_name][0], value, lineno), lineno)
            continue
        if key not in SCHEMA:
            raise ConfigError("unknown key", key=key, line=lineno)
        vals[key] = _convert(key, SCHEMA[key][0], value, lineno)

    event_list = []
    for idx in sorted(events):
        fields = events[idx]
        first_line = min(ln for _, ln in fields.values())
        kw = {}
        for name, (conv, default) in EVENT_SCHEMA.items():
            if name in fields:
                kw[name] = fields[name][0]
            elif default is None:
                raise ConfigError("missing required key", key=f"events[{idx}].{name}", line=first_line)
            else:
                kw[name] = default
        try:
            event_list.append(Event(kw["kind"], kw["start_s"], kw["magnitude"], kw["end_s"]))
        except ConfigError as exc:
            raise ConfigError(str(exc), key=f"events[{idx}]", line=first_line) from None

    try:
        return Scenario(
            grid=GridSource(vals["grid.v_rms_ll_volt"], vals["grid.frequency_hz"]),
            stages=vals["converter.stages"],
            v_dc=vals["converter.v_dc_volt"],
            converter_enabled=vals["converter.enabled"],
            reference_rms=vals["converter.reference_rms_volt"],
            r_on=vals["converter.r_on_ohm"],
            snubber_r=vals["converter.snubber_r_ohm"],
            snubber_c=vals["converter.snubber_c_farad"],
            weighting=vals["stage.weighting"],
            turns_scale=vals["stage.turns_scale"],
            lv_v_rms=vals["stage.lv_v_rms_volt"],
            s_base=vals["stage.s_base_va"],
            hv_r_pu=vals["stage.hv_r_pu"],
            hv_x_pu=vals["stage.hv_x_pu"],
            lv_r_pu=vals["stage.lv_r_pu"],
            lv_x_pu=vals["stage.lv_x_pu"],
            mag_r_pu=vals["stage.mag_r_pu"],
            mag_x_pu=vals["stage.mag_x_pu"],
            line=_build(LineParams, ("line.l_henry", "line.r_ohm"), vals, lines, l_line=vals["line.l_henry"], r_line=vals["line.r_ohm"]),
            load=_build(
                LoadParams,
                ("load.r_ohm", "load.c_farad", "load.model"),
                vals,
                lines,
                r_load=vals["load.r_ohm"],
                c_load=vals["load.c_farad"],
                model=vals["load.model"],
                diode_r=vals["load.diode_r_ohm"],
                dc_c=vals["load.dc_c_farad"],
            ),
            events=tuple(event_list),
            duration=vals["sim.duration_s"],
            dt=vals["sim.dt_s"],
            warmup_cycles=vals["sim.warmup_cycles"],
            output=vals["sim.output"],
            start_cycle=vals["analysis.start_cycle"],
            cycles=vals["analysis.cycles"],
            harmonics=vals["analysis.harmonics"],
            phase=vals["analysis.phase"],
        )
    except ConfigError as exc:
        if exc.key is not None and exc.line is None and exc.key in lines:
            raise ConfigError(str(exc).split(": ", 1)[-1], key=exc.key, line=lines[exc.key]) from None
        raise


def _build(cls, keys, vals, lines, **kw):
    try:
        return cls(**kw)
    except ConfigError as exc:
        bad = next((k for k in keys if k in lines), keys[0])
        raise ConfigError(str(exc), key=bad, line=lines.get(bad)) from None


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def dump_scenario(sc: Scenario) -> str:
    """Scenario as a document that parses back to an equal Scenario."""
    fmt = lambda v: AUTO if v is None else (str(v).lower() if isinstance(v, bool) else repr(v) if isinstance(v, float) else str(v))  # noqa: E731
    rows = {
        "grid.v_rms_ll_volt": sc.grid.v_rms_ll,
        "grid.frequency_hz": sc.grid.frequency,
        "converter.stages": sc.stages,
        "converter.v_dc_volt": sc.v_dc,
        "converter.enabled": sc.converter_enabled,
        "converter.reference_rms_volt": sc.reference_rms,
        "converter.r_on_ohm": sc.r_on,
        "converter.snubber_r_ohm": sc.snubber_r,
        "converter.snubber_c_farad": sc.snubber_c,
        "stage.weighting": sc.weighting,
        "stage.turns_scale": sc.turns_scale,
        "stage.lv_v_rms_volt": sc.lv_v_rms,
        "stage.s_base_va": sc.s_base,
        "stage.hv_r_pu": sc.hv_r_pu,
        "stage.hv_x_pu": sc.hv_x_pu,
        "stage.lv_r_pu": sc.lv_r_pu,
        "stage.lv_x_pu": sc.lv_x_pu,
        "stage.mag_r_pu": sc.mag_r_pu,
        "stage.mag_x_pu": sc.mag_x_pu,
        "line.l_henry": sc.line.l_line,
        "line.r_ohm": sc.line.r_line,
        "load.model": sc.load.model,
        "load.r_ohm": sc.load.r_load,
        "load.c_farad": sc.load.c_load,
        "load.diode_r_ohm": sc.load.diode_r,
        "load.dc_c_farad": sc.load.dc_c,
        "sim.duration_s": sc.duration,
        "sim.dt_s": sc.dt,
        "sim.warmup_cycles": sc.warmup_cycles,
        "sim.output": ", ".join(sc.output),
        "analysis.start_cycle": sc.start_cycle,
        "analysis.cycles": sc.cycles,
        "analysis.harmonics": sc.harmonics,
        "analysis.phase": sc.phase,
    }
    out = [f"{k} = {fmt(v)}" for k, v in rows.items()]
    for n, ev in enumerate(sc.events):
        out += [
            f"events[{n}].kind = {ev.kind}",
            f"events[{n}].start_s = {ev.start!r}",
            f"events[{n}].end_s = {ev.end!r}",
            f"events[{n}].magnitude = {ev.magnitude!r}",
        ]
    return "\n".join(out) + "\n"
