import os
import subprocess
import sys

import pytest

from gridplots.cli import main
from gridplots.data import MissingColumnsError, grid_stats, load_rows
from gridplots.render import render_grid

SAMPLE = os.path.join(os.path.dirname(__file__), "..", "sample", "results_sample.csv")

HEADER = (
    "run_id,seed,graph,learner,loss,k,d,noise,gamma,tuning,t,"
    "cum_mistakes,cum_queries,error_rate,cum_surrogate_at_w,cum_explore_gamma"
)


def _row(run_id, learner, loss, k, d, noise, t, error_rate):
    return (
        f"{run_id},0,bandit,{learner},{loss},{k},{d},{noise},1,unit,{t},"
        f"0,,{error_rate},0,0"
    )


def test_sample_csv_grid(tmp_path, capsys):
    out_dir = tmp_path / "figs"
    assert main(["--csv", SAMPLE, "--out", str(out_dir)]) == 0
    printed = capsys.readouterr().out
    images = sorted(os.listdir(out_dir))
    assert images == ["grid_noise0p1.png"]
    # K in {6, 9} x d in {80, 120} panels, 3 learners x 2 losses series
    assert "4 panels, 6 series" in printed


def test_sample_csv_curves_mode(tmp_path):
    out_dir = tmp_path / "figs"
    assert main(["--csv", SAMPLE, "--out", str(out_dir), "--curves"]) == 0
    images = sorted(os.listdir(out_dir))
    assert images == ["curves_noise0p1.png", "grid_noise0p1.png"]


def test_grid_stats_uses_final_checkpoint_only():
    lines = [HEADER]
    lines.append(_row("r:rep0", "gappletron", "hinge", 6, 80, 0.1, 10, 0.9))
    lines.append(_row("r:rep0", "gappletron", "hinge", 6, 80, 0.1, 100, 0.2))
    rows = _parse(lines)
    stats = grid_stats(rows)
    point = stats[0.1][(6, 80)][("gappletron", "hinge")]
    assert point.mean == 0.2
    assert point.n_reps == 1
    assert point.lo == point.hi == 0.2  # single rep: whiskers collapse


def test_whiskers_collapse_for_identical_reps():
    lines = [HEADER]
    for rep in range(10):
        lines.append(_row(f"r:rep{rep}", "pa", "hinge", 6, 80, 0.0, 100, 0.15))
    stats = grid_stats(_parse(lines))
    point = stats[0.0][(6, 80)][("pa", "hinge")]
    assert point.n_reps == 10
    assert point.lo == point.hi == 0.15
    assert point.mean == pytest.approx(0.15)


def test_whiskers_span_min_max():
    lines = [HEADER]
    for rep, err in enumerate((0.1, 0.2, 0.6)):
        lines.append(_row(f"r:rep{rep}", "pa", "hinge", 6, 80, 0.0, 100, err))
    point = grid_stats(_parse(lines))[0.0][(6, 80)][("pa", "hinge")]
    assert point.lo == 0.1
    assert point.hi == 0.6
    assert point.mean == pytest.approx(0.3)


def test_missing_columns_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("run_id,learner,loss\nr,a,b\n")
    code = main(["--csv", str(bad), "--out", str(tmp_path / "figs")])
    assert code != 0
    err = capsys.readouterr().err
    assert "missing required columns" in err
    for column in ("k", "d", "noise", "t", "error_rate"):
        assert column in err


def test_load_rows_raises_typed_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("learner\nx\n")
    with pytest.raises(MissingColumnsError) as excinfo:
        load_rows(str(bad))
    assert "run_id" in excinfo.value.missing


def test_missing_file_exits_nonzero(tmp_path, capsys):
    assert main(["--csv", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 2


def test_empty_csv_exits_nonzero(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER + "\n")
    assert main(["--csv", str(empty), "--out", str(tmp_path / "figs")]) == 2


def test_render_output_is_deterministic(tmp_path):
    rows = load_rows(SAMPLE)
    stats = grid_stats(rows)
    a = render_grid(stats, str(tmp_path / "a"))
    b = render_grid(stats, str(tmp_path / "b"))
    assert [(i.noise, i.n_panels, i.n_series) for i in a] == [
        (i.noise, i.n_panels, i.n_series) for i in b
    ]


def test_launcher_script_runs(tmp_path):
    script = os.path.join(os.path.dirname(__file__), "..", "plot_grid.py")
    result = subprocess.run(
        [sys.executable, script, "--csv", SAMPLE, "--out", str(tmp_path / "figs")],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr


def _parse(lines):
    import csv
    import io

    return list(csv.DictReader(io.StringIO("\n".join(lines) + "\n")))
