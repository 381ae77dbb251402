import io
import json

import pytest

from smoothdyn.cli import main
from smoothdyn.harness import (
    CSV_HEADER,
    ExperimentConfig,
    MetricRow,
    bench_point,
    cmd_bench,
    cmd_reduce,
    cmd_simulate,
    cmd_verify,
    expensive_frac_prediction,
    simulate_trial,
    write_metrics,
)


def test_config_from_file_and_validation(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"problem": "st4", "n": 15, "p": 0.3, "trials": 2}))
    cfg = ExperimentConfig.from_file(str(path))
    assert cfg.problem == "st4" and cfg.n == 15 and cfg.p == 0.3

    path.write_text(json.dumps({"banana": 1}))
    with pytest.raises(ValueError, match="unknown config field"):
        ExperimentConfig.from_file(str(path))

    path.write_text("{broken")
    with pytest.raises(ValueError, match="invalid config JSON"):
        ExperimentConfig.from_file(str(path))

    with pytest.raises(ValueError):
        ExperimentConfig(p=1.5).validate()
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0).validate()
    with pytest.raises(ValueError):
        ExperimentConfig(p_grid=[]).validate()


def test_config_override_skips_none():
    cfg = ExperimentConfig().override(n=30, p=None)
    assert cfg.n == 30 and cfg.p == 0.5


def test_metric_csv_bytes():
    rows = [MetricRow(0, 0.5, 10, 100, "st3", "oblivious-flip", "error_rate", 0.0)]
    buf = io.StringIO()
    write_metrics(rows, buf)
    text = buf.getvalue()
    assert text == (
        ",".join(CSV_HEADER) + "\n" + "0,0.5,10,100,st3,oblivious-flip,error_rate,0.0\n"
    )
    assert "\r" not in text


@pytest.mark.parametrize("model", ["oblivious-flip", "oblivious-ar", "adaptive"])
def test_simulate_counters_track_oracle(model):
    cfg = ExperimentConfig(problem="st3", model=model, n=12, p=0.4, T=300, trials=2)
    rows = cmd_simulate(cfg)
    errors = [r for r in rows if r.metric == "error_rate"]
    assert len(errors) == 2 and all(r.value == 0.0 for r in errors)


def test_simulate_deciders():
    cfg = ExperimentConfig(
        problem="connectivity-trivial", n=40, p=0.5, T=400, trials=2, seed=3
    )
    rows = cmd_simulate(cfg)
    assert all(r.value == 0.0 for r in rows if r.metric == "error_rate")
    cfg = ExperimentConfig(
        problem="perfect-matching-trivial", n=40, p=0.5, T=400, trials=2, seed=3
    )
    rows = cmd_simulate(cfg)
    assert all(r.value == 0.0 for r in rows if r.metric == "error_rate")
    cfg = ExperimentConfig(
        problem="connectivity-hybrid", n=40, p=0.5, T=400, trials=2, seed=3
    )
    rows = cmd_simulate(cfg)
    assert all(r.value == 0.0 for r in rows if r.metric == "error_rate")
    with pytest.raises(ValueError, match="unknown simulate problem"):
        simulate_trial(ExperimentConfig(problem="nope"), 0)


def test_simulate_trial_determinism():
    cfg = ExperimentConfig(problem="s-triangle", n=10, p=0.3, T=200, trials=1, seed=7)
    a = [r.as_list() for r in simulate_trial(cfg, 0)]
    b = [r.as_list() for r in simulate_trial(cfg, 0)]
    assert a == b


def test_bench_prediction_and_ratio():
    n, T, seed = 300, 3000, 0
    for p in (0.1, 0.5, 1.0):
        frac, _ = bench_point(n, p, T, seed)
        predicted = expensive_frac_prediction(p, n)
        assert abs(frac - predicted) <= 0.2 * predicted
    _, ops_p1 = bench_point(n, 1.0, T, seed)
    _, ops_p0 = bench_point(n, 0.0, T, seed)
    assert ops_p1 / ops_p0 >= 20  # adversarial hammering is far costlier


def test_cmd_bench_rows():
    cfg = ExperimentConfig(n=50, T=200, trials=2, p_grid=[0.2, 1.0])
    rows = cmd_bench(cfg)
    assert len(rows) == 2 * 2 * 2  # trials x grid x metrics
    with pytest.raises(ValueError):
        cmd_bench(ExperimentConfig(n=50, T=200, p_grid=None))


def test_cmd_reduce_modes():
    rows, ok = cmd_reduce(ExperimentConfig(mode="sol", n=4, p=0.5, trials=3))
    assert ok and all(r.value == 0.0 for r in rows)
    rows, ok = cmd_reduce(ExperimentConfig(mode="p3general", n=4, p=0.5, T=100, trials=2))
    assert ok and all(r.value == 0.0 for r in rows)
    rows, ok = cmd_reduce(ExperimentConfig(mode="omv-chain", n=4, trials=20))
    assert ok and rows[0].value == 0.0
    with pytest.raises(ValueError):
        cmd_reduce(ExperimentConfig(mode="bogus"))


def test_cmd_verify_all_pass():
    results = cmd_verify(seed=0)
    assert len(results) == 4
    for suite, passed, detail in results:
        assert passed, (suite, detail)


# -- CLI front-end -------------------------------------------------------


def test_cli_simulate_writes_csv(tmp_path):
    out = tmp_path / "rows.csv"
    timings = tmp_path / "time.csv"
    code = main(
        [
            "simulate", "--problem", "st3", "-n", "10", "-p", "0.5", "-T", "100",
            "--trials", "1", "--seed", "1", "--out", str(out), "--timings", str(timings),
        ]
    )
    assert code == 0
    text = out.read_text()
    assert text.startswith(",".join(CSV_HEADER) + "\n")
    assert timings.read_text().startswith("metric,value\nwall_time_s,")
    # byte-reproducible rerun (timings live in the separate file)
    again = tmp_path / "rows2.csv"
    main(
        [
            "simulate", "--problem", "st3", "-n", "10", "-p", "0.5", "-T", "100",
            "--trials", "1", "--seed", "1", "--out", str(again),
        ]
    )
    assert again.read_text() == text


def test_cli_bench_stdout(capsys):
    code = main(["bench", "-n", "40", "-T", "100", "--trials", "1", "--p-grid", "0.5,1.0"])
    assert code == 0
    assert capsys.readouterr().out.startswith(",".join(CSV_HEADER))


def test_cli_reduce_and_verify(capsys, tmp_path):
    out = tmp_path / "sol.csv"
    code = main(
        ["reduce", "--mode", "sol", "-n", "4", "-p", "0.5", "--trials", "2",
         "--seed", "0", "--out", str(out)]
    )
    assert code == 0 and out.exists()
    code = main(["verify", "--seed", "0"])
    captured = capsys.readouterr().out
    assert code == 0
    assert captured.count("[PASS]") == 4 and "[FAIL]" not in captured


def test_cli_bad_config_errors(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"p": 2.0}))
    with pytest.raises(SystemExit):
        main(["simulate", "--config", str(cfg)])
