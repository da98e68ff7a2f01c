import math
from pathlib import Path

import pytest

import twinstream as ts

ROOT = Path(__file__).resolve().parents[2]
SMALL = ROOT / "configs" / "small.cfg"


def test_ema_moves_toward_observation():
    old = ts.PreferenceVector()
    obs = ts.PreferenceVector(1.0, 0.0, 0.5, 0.5, 0.5)
    new = ts.ema_update(old, obs, 0.2)
    assert new.quality_affinity == pytest.approx(0.6)
    assert new.rebuffer_tolerance == pytest.approx(0.4)
    assert new.data_sensitivity == 0.5


def test_profile_update_keeps_history():
    p = ts.TwinProfile("u1", ts.PreferenceVector(), 0.5)
    p = ts.update_profile(p, ts.PreferenceVector(0, 0, 0, 0, 0))
    assert p.history_size == 1
    assert p.pref.quality_affinity == pytest.approx(0.25)


def test_bad_alpha_raises():
    with pytest.raises(ts.Error):
        ts.TwinProfile("u", ts.PreferenceVector(), 0.0)
    with pytest.raises(ValueError):
        ts.TwinProfile("u", ts.PreferenceVector(), 1.5)


def test_harmonic_mean():
    assert ts.predict_throughput([1.0, 4.0]) == pytest.approx(1.6)
    assert ts.predict_throughput([100, 1, 1, 1, 1, 1]) == pytest.approx(1.0)


def test_download_time_across_a_step():
    trace = [(0.0, 1.0, 0.0), (2.0, 4.0, 0.0)]
    # 2 Mb in the first 2 s, then 4 Mb at 4 Mbps.
    assert ts.download_time(trace, 0.0, 6e6) == pytest.approx(3.0)


def test_tree_separates_classes():
    x = [[0.1, 0.0], [0.2, 0.0], [0.8, 0.0], [0.9, 0.0]]
    tree = ts.train_tree(x, [1, 1, 2, 2])
    assert tree.depth == 1
    assert [tree.classify(r) for r in x] == [1, 1, 2, 2]


def test_ladder_respects_constraints():
    cat = ts.default_catalog()
    ladder = ts.optimize_ladder(cat, ts.PreferenceVector(), budget_kbps=8000, max_size=4, floor_kbps=400)
    rates = [r.bitrate_kbps for r in ladder]
    assert rates == sorted(rates)
    assert sum(rates) <= 8000 and len(rates) <= 4 and rates[0] <= 400


def test_select_quality_worked_example():
    ladder = [ts.Rendition(f"r{k}", k, 1280, 720) for k in (1000, 2000, 4000)]
    pick = ts.select_quality(ladder, ts.PreferenceVector(), buffer_s=4, throughput_mbps=2.5, q_target_mbps=2.0)
    assert pick.bitrate_kbps == 2000


def test_small_experiment_is_deterministic():
    a = ts.run_report(str(SMALL), {"users": "6"}, 1)
    b = ts.run_report(str(SMALL), {"users": "6"}, 4)
    assert a == b
    report = ts.run(SMALL, {"users": 6})
    assert report["schema_version"] == "1"
    assert [arm["arm"] for arm in report["arms"]] == [
        "twin_driven", "throughput_rule", "buffer_rule", "fixed_profile"]
    for arm in report["arms"]:
        assert arm["n_sessions"] == 6
        assert math.isfinite(arm["qoe"]["mean"])


def test_run_experiment_reports_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    code, _, err = ts.run_experiment(str(cfg))
    assert code == 2
    assert "nonsense" in err
