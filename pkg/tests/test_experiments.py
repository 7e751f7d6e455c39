import json
import math

import numpy as np
import pytest

from tailgap import (
    InvalidParameterError,
    ParetoMixture,
    StableParams,
    StudyConfig,
    emit_figure1,
    loglog_slope,
    seed_stream,
    study_mixture_bias,
    study_stable,
)
from tailgap.experiments import FIGURE1_COLUMNS, dumps_json, figure1_csv, format_csv


def _bias_config(**overrides):
    kw = dict(
        model=ParetoMixture.from_arrays([1.5, 3.0], [0.5, 0.5]),
        n_samples=2000,
        n_trials=6,
        base_seed=123,
        k_fractions=(0.1, 0.01),
    )
    kw.update(overrides)
    return StudyConfig(**kw)


def test_seed_stream_reproducible_and_distinct():
    a = seed_stream(42, 0).random(100)
    assert a.tobytes() == seed_stream(42, 0).random(100).tobytes()
    assert not np.array_equal(a, seed_stream(42, 1).random(100))
    assert not np.array_equal(a, seed_stream(43, 0).random(100))
    seed_stream(2**64 - 1, 5)
    with pytest.raises(InvalidParameterError):
        seed_stream(1, -1)
    with pytest.raises(InvalidParameterError):
        seed_stream(2**64, 0)


def test_study_bit_identical_across_runs_orders_and_threads():
    cfg = _bias_config()
    first = study_mixture_bias(cfg)
    again = study_mixture_bias(cfg)
    shuffled = study_mixture_bias(cfg, schedule=[4, 2, 0, 5, 1, 3])
    threaded = study_mixture_bias(cfg, n_jobs=3)
    for other in (again, shuffled, threaded):
        assert other.to_json() == first.to_json()
        assert other.to_csv() == first.to_csv()


def test_stable_study_deterministic():
    cfg = StudyConfig(StableParams(1.8), 1000, 4, 9, (0.1, 0.01))
    assert study_stable(cfg).to_json() == study_stable(cfg, schedule=[3, 1, 2, 0]).to_json()


def test_schedule_must_be_permutation():
    with pytest.raises(InvalidParameterError):
        study_mixture_bias(_bias_config(), schedule=[0, 1, 1, 2, 3, 4])


def test_report_contents():
    rep = study_mixture_bias(_bias_config())
    assert rep.reference == {"alpha_star": 1.5, "alpha_bar": 2.25}
    assert set(rep.summary) == {"hill@0.1", "hill@0.01", "mle"}
    for s in rep.summary.values():
        assert s["q05"] <= s["q25"] <= s["median"] <= s["q75"] <= s["q95"]
        assert s["count"] == 6
    assert rep.median(0.1) == rep.summary["hill@0.1"]["median"]
    assert [t["trial"] for t in rep.trials] == list(range(6))
    ks = [e["k_used"] for e in rep.trials[0]["estimates"]]
    assert ks == [200, 20, 2000]
    assert rep.seed_provenance["base_seed"] == 123


def test_summary_uses_nearest_rank():
    rep = study_mixture_bias(_bias_config(n_trials=5))
    values = sorted(t["estimates"][0]["alpha_hat"] for t in rep.trials)
    # nearest rank: ceil(p * N)-th smallest
    assert rep.summary["hill@0.1"]["median"] == values[2]
    assert rep.summary["hill@0.1"]["q05"] == values[0]
    assert rep.summary["hill@0.1"]["q95"] == values[4]


def test_json_and_csv_round_trip_bit_exact(tmp_path):
    rep = study_mixture_bias(_bias_config())
    doc = json.loads(rep.to_json())
    for src, parsed in zip(rep.trials, doc["trials"]):
        for a, b in zip(src["estimates"], parsed["estimates"]):
            assert a["alpha_hat"] == b["alpha_hat"]
    path = tmp_path / "trials.csv"
    rep.write(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,method,k_fraction,k_used,n,alpha_hat"
    assert len(lines) == 1 + 6 * 3
    first = rep.trials[0]["estimates"][0]["alpha_hat"]
    assert float(lines[1].split(",")[-1]) == first


def test_dumps_json_seventeen_digits():
    text = dumps_json({"a": 0.1, "b": [1, 2.5], "c": None, "d": math.inf, "e": True})
    assert "0.10000000000000001" in text
    assert "Infinity" in text
    assert json.loads(text)["a"] == 0.1


def test_format_csv():
    assert format_csv(("a", "b"), [(1, 0.1), ("x", None)]) == "a,b\n1,0.10000000000000001\nx,\n"


def test_config_round_trip(tmp_path):
    cfg = _bias_config(output_path="out.json")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    loaded = StudyConfig.load(path)
    assert loaded == cfg
    stable = StudyConfig(StableParams(1.7, 0.0, 2.0, 0.0), 500, 2)
    assert StudyConfig.from_dict(json.loads(json.dumps(stable.to_dict()))) == stable


@pytest.mark.parametrize(
    "overrides",
    [
        {"n_samples": 99},
        {"n_trials": 0},
        {"k_fractions": (0.0,)},
        {"k_fractions": (1.0,)},
        {"k_fractions": ()},
        {"base_seed": -1},
        {"base_seed": 2**64},
        {"model": "pareto"},
    ],
)
def test_config_validation(overrides):
    with pytest.raises(InvalidParameterError):
        _bias_config(**overrides)


def test_config_missing_field():
    with pytest.raises(InvalidParameterError):
        StudyConfig.from_dict({"model": {"kind": "stable", "alpha": 1.5}, "n_trials": 3})


def test_study_model_mismatch():
    with pytest.raises(InvalidParameterError):
        study_stable(_bias_config())
    with pytest.raises(InvalidParameterError):
        study_mixture_bias(StudyConfig(StableParams(1.5), 100, 1))
    with pytest.raises(InvalidParameterError):
        study_stable(StudyConfig(StableParams(2.0), 100, 1))
    with pytest.raises(InvalidParameterError):
        study_stable(StudyConfig(StableParams(1.5, 0.5), 100, 1))


def test_control_single_state_has_no_gap():
    cfg = StudyConfig(ParetoMixture.from_arrays([2.0], [1.0]), 20_000, 200, 5, (0.01,))
    rep = study_mixture_bias(cfg)
    assert rep.median(0.01) == pytest.approx(2.0, rel=0.10)
    assert rep.median("mle") == pytest.approx(2.0, rel=0.10)


def test_direction_of_bias_over_meta_repetitions():
    mix = ParetoMixture.from_arrays([1.5, 3.0], [0.5, 0.5])
    above = 0
    for rep_index in range(20):
        cfg = StudyConfig(mix, 10_000, 20, 1000 + rep_index, (0.1,))
        above += study_mixture_bias(cfg).median(0.1) > 1.5
    assert above >= 19


def test_stable_study_direction():
    cfg = StudyConfig(StableParams(1.8), 10_000, 100, 21, (0.1, 0.001))
    rep = study_stable(cfg)
    assert rep.median(0.1) > 1.8
    assert abs(rep.median(0.001) - 1.8) < abs(rep.median(0.1) - 1.8)


# ---------------------------------------------------------------------------
# figure 1


def test_figure1_row_at_ten(two_state):
    (row,) = emit_figure1(two_state, [10.0])
    np.testing.assert_allclose(row, [10.0, 0.002, 0.00515, 0.01], rtol=1e-13)


def test_figure1_single_state_columns_identical():
    rows = emit_figure1(ParetoMixture.from_arrays([1.4], [1.0], 2.0), np.logspace(0.4, 6, 20))
    assert np.array_equal(rows[:, 1], rows[:, 2]) and np.array_equal(rows[:, 2], rows[:, 3])


def test_figure1_mixture_tends_to_weighted_lowest_law(two_state):
    # b / c = 0.5 + 1.5 x^-2 for this mixture: the lowest law scaled by its weight
    grid = np.logspace(0, 6, 61)
    rows = emit_figure1(two_state, grid)
    ratio = rows[:, 2] / rows[:, 3]
    np.testing.assert_allclose(ratio, 0.5 + 1.5 * grid**-2, rtol=1e-12)
    excess = ratio / 0.5 - 1
    assert np.all(np.diff(excess) < 0)


@pytest.mark.parametrize("alphas, phis", [([1, 2], [0.3, 0.7]), ([0.8, 2.5, 4], [0.2, 0.5, 0.3])])
def test_figure1_convergence_monotone(alphas, phis):
    mix = ParetoMixture.from_arrays(alphas, phis, 1.0)
    rows = emit_figure1(mix, np.logspace(0, 6, 40))
    phi_star = phis[int(np.argmin(alphas))]
    excess = rows[:, 2] / (phi_star * rows[:, 3]) - 1
    assert np.all(excess > 0) and np.all(np.diff(excess) < 0)


def test_figure1_tail_slope(two_state):
    grid = np.logspace(4, 6, 30)
    rows = emit_figure1(two_state, grid)
    assert loglog_slope(list(zip(grid, rows[:, 2]))) == pytest.approx(-2.0, abs=0.01)


def test_figure1_csv(two_state):
    text = figure1_csv(emit_figure1(two_state, np.logspace(0, 6, 60)))
    lines = text.splitlines()
    assert lines[0] == ",".join(FIGURE1_COLUMNS)
    assert len(lines) == 61 and all(len(line.split(",")) == 4 for line in lines)


def test_figure1_invalid_grid(two_state):
    with pytest.raises(InvalidParameterError):
        emit_figure1(two_state, [0.5, 1.0])
    with pytest.raises(InvalidParameterError):
        emit_figure1(two_state, [3.0, 2.0])
