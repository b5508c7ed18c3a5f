# -*- coding: utf-8 -*-
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import ConfigError
from experiment_config import (MODES, ExperimentConfig, ThetaGrid, with_cli_overrides,
                               with_env_overrides)
from point_processes import Window
from sir_core import TierSpec


def _config(**kwargs):
    base = dict(mode="meta-sim", tiers=[TierSpec.preset("gappp")], window=Window(50.0),
                theta_grid=ThetaGrid(-10.0, 0.0, 2.0), xs=[0.9, 0.95], n=1000, seed=7)
    base.update(kwargs)
    return ExperimentConfig(**base)


# ==================== THETA GRID ====================

def test_theta_grid_includes_stop():
    assert ThetaGrid(-20.0, 10.0, 1.0).values_db().tolist() == list(np.arange(-20.0, 11.0))
    assert ThetaGrid(0.0, 0.0, 1.0).values_db().tolist() == [0.0]
    assert len(ThetaGrid(-1.0, 1.0, 0.1).values_db()) == 21


@pytest.mark.parametrize("args, field", [((0.0, 1.0, 0.0), "theta_grid.step_db"),
                                         ((1.0, 0.0, 1.0), "theta_grid.stop_db")])
def test_theta_grid_validation(args, field):
    with pytest.raises(ConfigError) as info:
        ThetaGrid(*args)
    assert info.value.field == field


# ==================== ROUND TRIP ====================

def test_dict_round_trip():
    config = _config(out="curve.csv", workers=3, b_values=[0.5, 1.0])
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_file_round_trip(tmp_path):
    config = _config(mode="hcn", tiers=[TierSpec.preset("tl", gain_db=3.6099), TierSpec.preset("ppp")])
    path = tmp_path / "experiment.json"
    config.dump(str(path))
    assert ExperimentConfig.load(str(path)) == config


def test_load_replaces_mode(tmp_path):
    path = tmp_path / "experiment.json"
    _config().dump(str(path))
    assert ExperimentConfig.load(str(path), mode="g0").mode == "g0"


tier_strategy = st.builds(
    TierSpec.preset,
    st.sampled_from(["ppp", "tl", "ptl", "gappp", "mcp"]),
    density=st.floats(0.01, 1.0),
    power=st.floats(0.1, 100.0),
    alpha=st.floats(2.5, 6.0),
    gain_db=st.one_of(st.none(), st.floats(-10.0, 10.0)),
)


@settings(max_examples=50, deadline=None)
@given(
    mode=st.sampled_from(["g0", "moments", "meta-sim", "critical-theta"]),
    tiers=st.lists(tier_strategy, min_size=1, max_size=3),
    half_extent=st.floats(1.0, 1000.0),
    start=st.floats(-40.0, 0.0),
    span=st.floats(0.0, 40.0),
    step=st.floats(0.1, 5.0),
    xs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=5),
    n=st.integers(1, 10 ** 6),
    seed=st.integers(0, 2 ** 31 - 1),
)
def test_json_round_trip_property(mode, tiers, half_extent, start, span, step, xs, n, seed):
    config = ExperimentConfig(mode, tiers, Window(half_extent), ThetaGrid(start, start + span, step),
                              xs=xs, n=n, seed=seed)
    text = json.dumps(config.to_dict())
    assert ExperimentConfig.from_dict(json.loads(text)) == config


# ==================== VALIDATION ====================

@pytest.mark.parametrize("data, field", [
    ({"tiers": [{"process": "ppp", "density": 0.1}]}, "mode"),
    ({"mode": "warp", "tiers": [{"process": "ppp", "density": 0.1}]}, "mode"),
    ({"mode": "g0"}, "tiers"),
    ({"mode": "g0", "tiers": []}, "tiers"),
    ({"mode": "g0", "tiers": [{"process": "ppp"}]}, "tiers.density"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "n": 0}, "n"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "xs": [1.5]}, "xs"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "window": {"half_extent": -1}},
     "window.half_extent"),
    ({"mode": "gb", "tiers": [{"process": "ppp", "density": 0.1}], "b_values": [-1.0]}, "b_values"),
    ({"mode": "moments", "tiers": [{"process": "ppp", "density": 0.1}], "b_values": []}, "b_values"),
    ({"mode": "hcn", "tiers": [{"process": "tl", "density": 0.1}]}, "tiers[0].gain_db"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "workers": 0}, "workers"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "n": "abc"}, "n"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "xs": ["a"]}, "xs"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "xs": 0.5}, "xs"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": "dense"}]}, "tiers.density"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1, "alpha": [4]}]}, "tiers.alpha"),
    ({"mode": "g0", "tiers": ["ppp"]}, "tiers"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "theta_grid": {"step_db": "1dB"}},
     "theta_grid.step_db"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "window": 500}, "window"),
    ({"mode": "g0", "tiers": [{"process": "ppp", "density": 0.1}], "seed": True}, "seed"),
])
def test_invalid_config_names_field(data, field):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict(data)
    assert info.value.field == field


def test_poisson_tiers_need_no_gain():
    config = ExperimentConfig.from_dict({"mode": "hcn", "tiers": [{"process": "ppp", "density": 0.1}]})
    assert config.tiers[0].gain_db is None


def test_every_mode_is_accepted():
    for mode in MODES:
        assert _config(mode=mode, tiers=[TierSpec.preset("tl", gain_db=3.6)]).mode == mode


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(str(tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(str(bad))


# ==================== OVERRIDES ====================

def test_environment_overrides_file(monkeypatch):
    monkeypatch.setenv("METADIST_SEED", "99")
    monkeypatch.setenv("METADIST_WORKERS", "4")
    config = with_env_overrides(_config())
    assert (config.seed, config.workers) == (99, 4)


def test_cli_flag_beats_environment(monkeypatch):
    monkeypatch.setenv("METADIST_SEED", "99")
    config = with_cli_overrides(with_env_overrides(_config()), seed=5, n=20)
    assert (config.seed, config.n) == (5, 20)


def test_no_environment_keeps_file_values(monkeypatch):
    monkeypatch.delenv("METADIST_SEED", raising=False)
    monkeypatch.delenv("METADIST_WORKERS", raising=False)
    config = _config()
    assert with_env_overrides(config) is config


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("METADIST_SEED", "abc")
    with pytest.raises(ConfigError) as info:
        with_env_overrides(_config())
    assert info.value.field == "METADIST_SEED"
