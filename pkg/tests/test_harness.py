import dataclasses
import json
import math

import numpy as np
import pytest

from bwfpp import degrees as deg
from bwfpp.harness import (ExperimentConfig, child_seed, config_from_mapping, emit, load_config,
                           read_aggregates, read_json, read_rows, run_experiment)
from bwfpp.metrics import NodeWeightSpec

def _key(rows):
    # nan theory coefficients never compare equal, their reprs do
    return [repr(r) for r in rows]


ALL = ("typical", "flood", "maxflood", "gossip_flood1", "gossip_flood2", "spacing_check")


@pytest.fixture(scope="module")
def small_cfg():
    return ExperimentConfig(deg.Regular(3), (40, 80), 3, ALL, seed=77, kappa=1.0,
                            entry=NodeWeightSpec.exponential(0.5), exit=NodeWeightSpec.exponential(0.5),
                            spacing_k_max=20)


@pytest.fixture(scope="module")
def small_result(small_cfg):
    return run_experiment(small_cfg)


def test_config_validation():
    base = dict(degrees=deg.Regular(3), n_grid=(10,), trials=1, observables=("typical",), lam=1.0)
    ExperimentConfig(**base)
    for bad in (dict(trials=0), dict(n_grid=(20, 10)), dict(observables=("nope",)),
                dict(lam=None), dict(seed=-1), dict(n_grid=(1,))):
        with pytest.raises(ValueError):
            ExperimentConfig(**{**base, **bad})


def test_rates_and_theory(small_cfg):
    assert small_cfg.edge_rate() == 1 / 3
    th = small_cfg.theory()
    assert th["typical"] == 3.0 and th["flood"] == 5.0 and th["maxflood"] == 7.0
    assert th["gossip_flood1"] == 4.0 and th["gossip_flood2"] == 5.0
    assert math.isnan(th["spacing_check"])


def test_maxflood_default_mode():
    cfg = ExperimentConfig(deg.Regular(3), (10,), 1, ("maxflood",), lam=1.0)
    assert cfg.maxflood_for(4000) == "exact" and cfg.maxflood_for(4002) == 64


def test_single_row_and_rerun():
    cfg = ExperimentConfig(deg.Regular(3), (1000,), 1, ("gossip_flood1",), seed=3, kappa=1.0,
                           exit=NodeWeightSpec.exponential(0.5))
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert len(a.rows) == 1 and a.rows == b.rows


def test_row_contents(small_cfg, small_result):
    assert len(small_result.rows) == 2 * 3 * len(ALL)
    th = small_cfg.theory()
    for r in small_result.rows:
        assert r.value_over_logn == r.value / math.log(r.n)
        assert r.seed == child_seed(77, r.n, r.trial)
        assert r.theory_coeff == th[r.observable] or math.isnan(r.theory_coeff)
        assert np.isfinite(r.value)
    for r in small_result.rows:
        if r.observable == "gossip_flood1":
            f2 = next(x for x in small_result.rows if (x.n, x.trial, x.observable) == (r.n, r.trial, "gossip_flood2"))
            assert r.value <= f2.value


def test_typical_below_flood_below_max(small_result):
    by = {(r.n, r.trial, r.observable): r.value for r in small_result.rows}
    for (n, t, name), v in by.items():
        if name == "typical":
            assert v <= by[(n, t, "flood")] <= by[(n, t, "maxflood")]


def test_order_independence(small_cfg, small_result):
    cells = [(n, t) for n in small_cfg.n_grid for t in range(small_cfg.trials)]
    shuffled = [cells[i] for i in np.random.default_rng(0).permutation(len(cells))]
    assert _key(run_experiment(small_cfg, order=shuffled).rows) == _key(small_result.rows)


def test_threads_match(small_cfg, small_result):
    assert _key(run_experiment(small_cfg, threads=2).rows) == _key(small_result.rows)


def test_emit_csv_roundtrip(tmp_path, small_result):
    files = emit(small_result, "csv", tmp_path / "out.csv")
    assert [f.name for f in files] == ["out.csv", "out.agg.csv"]
    text = files[0].read_text().splitlines()
    assert text[0] == "# schema_version=1"
    assert text[1] == "n,trial,observable,value,value_over_logn,theory_coeff,seed"
    rows = read_rows(files[0])
    assert len(rows) == len(small_result.rows)
    for a, b in zip(rows, small_result.rows):
        assert dataclasses.astuple(a)[:3] == dataclasses.astuple(b)[:3]
        assert a.value == b.value and a.value_over_logn == b.value_over_logn and a.seed == b.seed
        assert a.theory_coeff == b.theory_coeff or (math.isnan(a.theory_coeff) and math.isnan(b.theory_coeff))
    assert len(read_aggregates(files[1])) == len(small_result.aggregates)


def test_emit_one_row(tmp_path):
    cfg = ExperimentConfig(deg.Regular(3), (10,), 1, ("typical",), lam=1.0)
    p = emit(run_experiment(cfg), "csv", tmp_path / "one.csv")[0]
    assert len([ln for ln in p.read_text().splitlines() if not ln.startswith("#")]) == 2


def test_json_matches_csv(tmp_path, small_result):
    emit(small_result, "csv", tmp_path / "r.csv")
    emit(small_result, "json", tmp_path / "r.json")
    doc = read_json(tmp_path / "r.json")
    assert doc["schema_version"] == 1
    assert len(doc["records"]) == len(read_rows(tmp_path / "r.csv"))
    assert doc["records"][0]["value"] == small_result.rows[0].value


def test_emit_errors(tmp_path, small_result):
    from bwfpp.harness import ExperimentResult
    with pytest.raises(ValueError):
        emit(ExperimentResult([]), "csv", tmp_path / "x.csv")
    with pytest.raises(OSError):
        emit(small_result, "csv", tmp_path / "missing-dir" / "x.csv")
    with pytest.raises(ValueError):
        emit(small_result, "xml", tmp_path / "x.xml")


def test_aggregates_recompute(tmp_path, small_result):
    files = emit(small_result, "csv", tmp_path / "a.csv")
    rows = read_rows(files[0])
    for agg in read_aggregates(files[1]):
        vals = np.array([r.value for r in rows if r.n == agg.n and r.observable == agg.observable])
        assert abs(vals.mean() - agg.mean) <= 1e-12
        assert abs(vals.std(ddof=1) - agg.std) <= 1e-12
        assert agg.count == len(vals) and agg.excluded == 0


def test_disconnected_samples_are_flagged_and_excluded():
    cfg = ExperimentConfig(deg.Regular(1), (6,), 2, ("flood", "gossip_flood1"), lam=1.0, kappa=1.0,
                           connect_retries=2)
    res = run_experiment(cfg)
    assert res.disconnected == [(6, 0), (6, 1)]
    assert all(r.value == math.inf for r in res.rows)
    for a in res.aggregates:
        assert a.count == 0 and a.excluded == 2 and math.isnan(a.mean)


TOML = """
seed = 5
trials = 2
n = [30, 60]
observables = ["typical", "gossip_flood2"]
kappa = 1.0
maxflood = 16

[degrees]
regular = 3

[weights]
entry = "kind=constant value=0"
exit = { kind = "exponential", rate = 0.5 }
"""


def test_load_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(TOML)
    cfg = load_config(p)
    assert cfg.n_grid == (30, 60) and cfg.trials == 2 and cfg.seed == 5
    assert cfg.exit == NodeWeightSpec.exponential(0.5) and cfg.maxflood_mode == 16
    assert cfg.edge_rate() == 1 / 3
    with pytest.raises(ValueError):
        config_from_mapping({"n": [10]})
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "nope.toml")


def test_child_seeds_distinct():
    seeds = {child_seed(1, n, t) for n in (100, 200) for t in range(50)}
    assert len(seeds) == 100
    assert child_seed(1, 100, 0) != child_seed(2, 100, 0)
