import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reinject.control import Event
from reinject.errors import ConfigError
from reinject.scenario import (
    RATED_KEYS,
    SCHEMA,
    Scenario,
    default_v_dc,
    dump_scenario,
    load_scenario,
    parse_document,
    parse_scenario,
)


def test_empty_document_gives_rated_defaults():
    sc = parse_scenario("")
    assert sc == Scenario()
    assert sc.grid.v_rms_ll == 11000.0
    assert sc.stages == 3
    assert sc.load.r_load == 60.0
    assert sc.load.c_load == 150e-6
    assert sc.line.l_line == 0.010
    assert sc.hv_r_pu == sc.lv_r_pu == 0.002
    assert sc.hv_x_pu == sc.lv_x_pu == 0.08
    assert math.isinf(sc.snubber_c)


def test_rated_keys_closed_over_schema():
    # every rated parameter is reachable through exactly one key
    keys = [k for k, _ in RATED_KEYS.values()]
    assert len(set(keys)) == len(keys)
    for key, default in RATED_KEYS.values():
        assert key in SCHEMA
        assert SCHEMA[key][1] == default


def test_default_v_dc():
    assert default_v_dc(3) == pytest.approx(1212.18, abs=0.01)
    # the full binary swing equals the LV peak at any stage count
    for p in (1, 2, 5):
        assert (2**p - 1) * default_v_dc(p) / 2 == pytest.approx(3000 * math.sqrt(2))


def test_stage_count_parsing():
    assert parse_scenario("converter.stages = 1").stages == 1
    with pytest.raises(ConfigError) as err:
        parse_scenario("\n\nconverter.stages = 0")
    assert err.value.key == "converter.stages"
    assert err.value.line == 3
    assert "converter.stages" in str(err.value)


def test_unknown_key_names_key_and_line():
    with pytest.raises(ConfigError) as err:
        parse_scenario("grid.frequency_hz = 50\nload.resistance = 60\n")
    assert err.value.key == "load.resistance"
    assert err.value.line == 2


@pytest.mark.parametrize(
    "doc,key",
    [
        ("converter.stages = three", "converter.stages"),
        ("converter.stages = 2.5", "converter.stages"),
        ("converter.enabled = maybe", "converter.enabled"),
        ("load.model = inductor", "load.model"),
        ("load.r_ohm = -5", "load.r_ohm"),
        ("line.l_henry = 0", "line.l_henry"),
        ("sim.dt_s = 1e-3", "sim.dt_s"),
        ("sim.dt_s = 3e-5", "sim.dt_s"),
        ("sim.warmup_cycles = 1", "sim.warmup_cycles"),
        ("analysis.cycles = 200", "analysis.cycles"),
        ("converter.v_dc_volt = -1", "converter.v_dc_volt"),
    ],
)
def test_invalid_values_name_key(doc, key):
    with pytest.raises(ConfigError) as err:
        parse_scenario(doc)
    assert err.value.key == key


def test_syntax_errors():
    with pytest.raises(ConfigError) as err:
        parse_document("# fine\nnot a pair\n")
    assert err.value.line == 2
    with pytest.raises(ConfigError, match="duplicate"):
        parse_document("a.b = 1\na.b = 2")
    with pytest.raises(ConfigError, match="missing value"):
        parse_document("a.b =")


def test_comments_and_quotes():
    doc = "load.model = 'rc'  # quoted\nsim.output = \"v_load_*, i_grid_a\"\n"
    sc = parse_scenario(doc)
    assert sc.load.model == "rc"
    assert sc.output == ("v_load_*", "i_grid_a")


def test_auto_values():
    sc = parse_scenario("converter.v_dc_volt = auto\nconverter.reference_rms_volt = AUTO")
    assert sc.v_dc is None and sc.reference_rms is None
    assert parse_scenario("converter.v_dc_volt = 2800").converter.v_dc == 2800.0


def test_events_parse():
    doc = """
events[0].kind = sag
events[0].start_s = 0.1
events[0].end_s = 0.3
events[0].magnitude = 0.7
events[1].kind = swell
events[1].start_s = 0.5
events[1].magnitude = 1.3
"""
    sc = parse_scenario(doc)
    assert sc.events == (Event("sag", 0.1, 0.7, 0.3), Event("swell", 0.5, 1.3))


def test_event_errors():
    with pytest.raises(ConfigError) as err:
        parse_scenario("events[0].kind = sag\nevents[0].start_s = 0.1")
    assert err.value.key == "events[0].magnitude"
    with pytest.raises(ConfigError, match="overlap"):
        parse_scenario(
            "events[0].kind = sag\nevents[0].start_s = 0.1\nevents[0].magnitude = 0.7\n"
            "events[1].kind = swell\nevents[1].start_s = 0.2\nevents[1].magnitude = 1.3\n"
        )
    with pytest.raises(ConfigError) as err:
        parse_scenario("events[0].depth = 0.5")
    assert err.value.key == "events[0].depth"
    with pytest.raises(ConfigError) as err:
        parse_scenario("events[2].kind = sag\nevents[2].start_s = 0.1\nevents[2].magnitude = 1.5")
    assert err.value.key == "events[2]"


def test_dump_round_trip_defaults():
    sc = Scenario()
    assert parse_scenario(dump_scenario(sc)) == sc


@settings(max_examples=40, deadline=None)
@given(
    stages=st.integers(1, 6),
    v_dc=st.one_of(st.none(), st.floats(10, 1e4)),
    r=st.floats(1, 1e3),
    c=st.floats(1e-7, 1e-3),
    sag=st.floats(0.1, 0.99),
    start=st.floats(0.0, 1.0),
    enabled=st.booleans(),
)
def test_dump_round_trip(stages, v_dc, r, c, sag, start, enabled):
    from reinject.circuit import LoadParams

    sc = Scenario(
        stages=stages,
        v_dc=v_dc,
        converter_enabled=enabled,
        load=LoadParams(r, c),
        events=(Event("sag", start, sag, start + 0.5),),
    )
    assert parse_scenario(dump_scenario(sc)) == sc


def test_load_scenario_file(tmp_path):
    path = tmp_path / "sc.cfg"
    path.write_text("converter.stages = 2\nsim.duration_s = 0.5\nanalysis.start_cycle = 10\nanalysis.cycles = 10\n")
    sc = load_scenario(path)
    assert sc.stages == 2 and sc.n_samples == 50001 and sc.samples_per_cycle == 2000


def test_network_totals():
    net = Scenario().network
    # three stages of 0.036 ohm / 4.584 mH plus the line
    assert net.r_tot == pytest.approx(0.01 + 3 * 0.036)
    assert net.l_tot == pytest.approx(0.010 + 3 * 0.16 * 9 / (2 * math.pi * 50))


def test_digest_stable_and_sensitive():
    assert Scenario().digest() == Scenario().digest()
    assert Scenario().digest() != Scenario(stages=2).digest()
