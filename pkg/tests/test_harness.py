import csv
import math

import numpy as np
import pytest

from mimo_alloc import cli
from mimo_alloc.errors import IOFailure
from mimo_alloc.geometry import SystemConfig
from mimo_alloc.harness import (
    ExperimentSpec,
    bit_energy_at,
    dominates,
    empirical_cdf,
    run,
    snapshot_for,
)

SMALL_GRID = [-20.0, -5.0, 10.0]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def small_spec(figure, tmp_path, **kw):
    defaults = dict(snr_grid_db=SMALL_GRID, output_dir=tmp_path, seed=3)
    if figure == "fig3":
        defaults["snapshots"] = 5
    if figure == "validate":
        defaults.update(snapshots=1, trials=200, antenna_counts=[40])
    defaults.update(kw)
    return ExperimentSpec(figure, **defaults)


def test_default_specs():
    assert ExperimentSpec("fig1").snr_grid_db[0] == -25.0
    assert ExperimentSpec("fig1").snr_grid_db[-1] == 15.0
    assert len(ExperimentSpec("fig2").snr_grid_db) == 41
    assert ExperimentSpec("fig1").antenna_counts == [50, 100]
    assert ExperimentSpec("fig3").snapshots == 2000
    assert ExperimentSpec("fig3").snr_grid_db == [-10.0, 0.0, 10.0]


@pytest.mark.parametrize(
    "kw",
    [
        dict(figure_id="fig4"),
        dict(figure_id="fig1", snr_grid_db=[]),
        dict(figure_id="fig1", snr_grid_db=[0.0, 0.0]),
        dict(figure_id="fig1", snr_grid_db=[1.0, -1.0]),
        dict(figure_id="fig3", snapshots=0),
        dict(figure_id="validate", trials=10),
        dict(figure_id="fig1", antenna_counts=[10]),
        dict(figure_id="fig1", antenna_counts=[]),
    ],
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        ExperimentSpec(**kw)


def test_snapshots_are_distinct_and_reproducible():
    spec = ExperimentSpec("fig3", seed=1)
    a, b = snapshot_for(spec, 0), snapshot_for(spec, 1)
    assert not np.array_equal(a.beta, b.beta)
    np.testing.assert_array_equal(a.beta, snapshot_for(spec, 0).beta)


@pytest.mark.parametrize("figure", ["fig1", "fig3"])
def test_row_invariants(figure, tmp_path):
    result = run(small_spec(figure, tmp_path))
    K = SystemConfig().K
    for row in result.rows:
        assert row.s_opt >= row.s_baseline
        assert row.tau_star == K
        assert row.budget_error < 1e-10


def test_fig1_files(tmp_path):
    result = run(small_spec("fig1", tmp_path))
    rows = read_csv(tmp_path / "fig1.csv")
    assert list(rows[0]) == [
        "snapshot_id", "N", "snr_db", "s_opt", "s_baseline", "eta_opt", "eta_baseline",
        "p_u_star", "p_p_star", "tau_star", "budget_error", "min_eta_opt", "min_eta_baseline",
    ]
    assert len(rows) == 2 * len(SMALL_GRID)
    for N in ("50", "100"):
        assert sum(r["min_eta_opt"] == "1" for r in rows if r["N"] == N) == 1
    summary = dict((r["metric"], r["value"]) for r in read_csv(tmp_path / "fig1_summary.csv"))
    assert summary["seed"] == "3"
    assert "N100_improvement_at_target" in summary
    assert set(result.files) == {"rows", "summary"}


def test_fig2_files(tmp_path):
    result = run(small_spec("fig2", tmp_path))
    rows = read_csv(tmp_path / "fig2.csv")
    assert list(rows[0])[:6] == ["snapshot_id", "N", "snr_db", "p_p_star", "p_u_star", "pilot_data_ratio"]
    for r in rows:
        assert float(r["pilot_data_ratio"]) == pytest.approx(float(r["p_p_star"]) / float(r["p_u_star"]), rel=1e-12)
    assert result.summary["N100_ratio_at_min_snr"] > result.summary["N100_ratio_at_max_snr"]


def test_fig3_files(tmp_path):
    result = run(small_spec("fig3", tmp_path))
    cdf = read_csv(tmp_path / "fig3_cdf.csv")
    for scheme in ("optimal", "baseline"):
        for snr in SMALL_GRID:
            sel = [r for r in cdf if r["scheme"] == scheme and float(r["snr_db"]) == snr]
            s = np.array([float(r["s"]) for r in sel])
            p = np.array([float(r["cdf"]) for r in sel])
            assert len(sel) == 5
            assert np.all(np.diff(s) >= 0) and np.all(np.diff(p) > 0)
            assert 0 < p[0] and p[-1] == 1.0
    summary = read_csv(tmp_path / "fig3_summary.csv")
    assert all(r["dominates"] == "1" for r in summary)
    assert result.summary["N100_snr-5_dominates"] is True


def test_validate_files(tmp_path):
    result = run(small_spec("validate", tmp_path))
    rows = read_csv(tmp_path / "validate.csv")
    assert len(rows) == len(SMALL_GRID) * SystemConfig().K
    assert {r["trials"] for r in rows} == {"200"}
    assert {r["seed"] for r in rows} == {"3"}
    assert len({r["stream"] for r in rows}) == len(SMALL_GRID)
    assert result.summary["rows"] == len(rows)


@pytest.mark.parametrize("figure", ["fig1", "fig2", "fig3", "validate"])
def test_reruns_are_byte_identical(figure, tmp_path):
    a = run(small_spec(figure, tmp_path / "a"))
    b = run(small_spec(figure, tmp_path / "b"))
    for key, path in a.files.items():
        assert path.read_bytes() == b.files[key].read_bytes()
    c = run(small_spec(figure, tmp_path / "c", seed=4))
    assert a.files["rows"].read_bytes() != c.files["rows"].read_bytes()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IOFailure):
        run(small_spec("fig2", blocker / "sub"))


def test_empirical_cdf_and_dominance():
    x, p = empirical_cdf([3.0, 1.0, 2.0])
    np.testing.assert_array_equal(x, [1.0, 2.0, 3.0])
    np.testing.assert_allclose(p, [1 / 3, 2 / 3, 1.0])
    assert dominates([2.0, 3.0], [1.0, 3.0])
    assert not dominates([0.5, 4.0], [1.0, 3.0])


def test_bit_energy_at():
    s = np.array([0.5, 1.0, 2.0, 4.0, 8.0])
    eta = np.array([2.0, 1.0, 1.5, 3.0, 6.0])
    assert bit_energy_at(s, eta, 4.0) == pytest.approx(3.0)
    assert bit_energy_at(s, eta, 3.0) == pytest.approx(math.sqrt(1.5 * 3.0))
    # below the minimum bit energy point only the inefficient branch exists
    assert math.isnan(bit_energy_at(s, eta, 0.7))
    assert math.isnan(bit_energy_at(s, eta, 9.0))
    assert bit_energy_at(s, np.array([np.nan, 1.0, 1.5, 3.0, 6.0]), 8.0) == pytest.approx(6.0)


@pytest.mark.parametrize(
    "text, expected",
    [("-2:2:1", [-2.0, -1.0, 0.0, 1.0, 2.0]), ("0:1:0.5", [0.0, 0.5, 1.0]), ("-10,0,10", [-10.0, 0.0, 10.0]), ("0:0.3:0.1", [0.0, 0.1, 0.2, 0.3])],
)
def test_snr_grid_parsing(text, expected):
    assert cli.parse_snr_grid(text) == expected


@pytest.mark.parametrize("text", ["1:0:1", "0:1:0", "a:b:c", "x"])
def test_snr_grid_rejects(text):
    with pytest.raises(Exception):
        cli.parse_snr_grid(text)


def test_cli_runs_and_writes(tmp_path, capsys):
    code = cli.main(["fig2", "--snr-db", "-20:10:15", "--out", str(tmp_path), "--seed", "2", "--no-plot"])
    assert code == 0
    out = capsys.readouterr().out
    assert "fig2.csv" in out and "N100_ratio_at_min_snr" in out
    rows = read_csv(tmp_path / "fig2.csv")
    assert [float(r["snr_db"]) for r in rows] == [-20.0, -5.0, 10.0] * 2
    assert not (tmp_path / "fig2.png").exists()


def test_cli_renders_figure(tmp_path):
    assert cli.main(["fig1", "--snr-db", "-10,0,10", "--antennas", "100", "--out", str(tmp_path)]) == 0
    png = tmp_path / "fig1.png"
    assert png.exists() and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_seed_precedence(tmp_path, monkeypatch):
    config = tmp_path / "c.yaml"
    config.write_text("seed: 11\n")
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    assert cli.resolve_seed(None, None) == 6
    assert cli.resolve_seed(None, 11) == 11
    monkeypatch.setenv(cli.SEED_ENV, "21")
    assert cli.resolve_seed(None, 11) == 21
    assert cli.resolve_seed(5, 11) == 5

    args = ["fig2", "--snr-db", "0", "--antennas", "100", "--no-plot", "--config", str(config)]
    assert cli.main(args + ["--out", str(tmp_path / "env")]) == 0
    summary = dict((r["metric"], r["value"]) for r in read_csv(tmp_path / "env" / "fig2_summary.csv"))
    assert summary["seed"] == "21"
    monkeypatch.delenv(cli.SEED_ENV)
    assert cli.main(args + ["--out", str(tmp_path / "file")]) == 0
    summary = dict((r["metric"], r["value"]) for r in read_csv(tmp_path / "file" / "fig2_summary.csv"))
    assert summary["seed"] == "11"


def test_cli_errors(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "abc")
    assert cli.main(["fig2", "--no-plot", "--out", str(tmp_path)]) == 1
    assert "mimo-alloc: error:" in capsys.readouterr().err
    monkeypatch.delenv(cli.SEED_ENV)
    bad = tmp_path / "bad.yaml"
    bad.write_text("antenas: 10\n")
    assert cli.main(["fig2", "--config", str(bad), "--no-plot"]) == 1
    assert cli.main(["fig2", "--config", str(tmp_path / "missing.yaml"), "--no-plot"]) == 1
    assert cli.main(["fig2", "--antennas", "5", "--no-plot", "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["fig9"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["fig2", "--snr-db", "1:0:1"])
    assert exc.value.code == 2
