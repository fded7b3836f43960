import csv

import pytest

from ndncache.cli import main


@pytest.fixture
def short_config(tmp_path):
    path = tmp_path / "short.cfg"
    path.write_text("sim_time_s = 5\nbucket_s = 1\nreplications = 2\n")
    return str(path)


def test_simulate_writes_reports(tmp_path, short_config, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--config", short_config, "--scheme", "uniform", "--out", str(out)]) == 0
    assert "uniform" in capsys.readouterr().out
    rows = list(csv.DictReader((out / "router_hit_ratio.csv").open()))
    assert [float(r["bucket_start_s"]) for r in rows] == [2.0, 3.0, 4.0]
    totals = {r["metric"]: float(r["value"]) for r in csv.DictReader((out / "totals.csv").open())}
    assert totals["issued"] > 0


def test_features_then_allocate(tmp_path, short_config):
    feats = tmp_path / "features.csv"
    assert main(["features", "--config", short_config, "--seed", "3", "--out", str(feats)]) == 0
    rows = list(csv.DictReader(feats.open()))
    assert len(rows) == 11
    assert list(rows[0]) == ["router_id", "bc", "ewma_pi", "ewma_hi"]

    alloc = tmp_path / "alloc.csv"
    assert main(["allocate", "--features", str(feats), "--total", "1100", "--out", str(alloc)]) == 0
    caps = [int(r["capacity_chunks"]) for r in csv.DictReader(alloc.open())]
    assert sum(caps) == 1100 and min(caps) >= 1


def test_features_normalized_to_stdout(short_config, capsys):
    assert main(["features", "--config", short_config, "--out", "-", "--normalize", "minmax"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    bc = [float(r["bc"]) for r in rows]
    assert min(bc) == 0 and max(bc) == 1


def test_errors_exit_with_status_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert "unknown key" in capsys.readouterr().err
    assert main(["allocate", "--features", str(tmp_path / "missing.csv"), "--total", "10"]) == 2


def test_subcommand_required():
    with pytest.raises(SystemExit):
        main([])
