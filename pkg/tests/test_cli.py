import json
import os
import subprocess
import sys

import pytest

from rieszwave import cli
from rieszwave.cli import main, parse_config
from rieszwave.errors import DomainError, GridResolutionWarning


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _field(line, key):
    for tok in line.split():
        if tok.startswith(key + "="):
            return tok.split("=", 1)[1]
    raise KeyError(key)


# -- eval ---------------------------------------------------------------------------

def test_eval_delta(capsys):
    code, out, _ = run(capsys, "eval", "--x", "1", "--t", "0.1", "--x0", "0", "--rep", "delta")
    assert code == 0
    assert out.count("\n") == 1
    assert float(_field(out, "u")) == pytest.approx(1.5915467783376212e-3, rel=1e-13)
    assert _field(out, "rep") == "delta"
    assert float(_field(out, "xi")) == pytest.approx(0.01)
    assert _field(out, "warnings") == "[]"


def test_eval_leading_approximant(capsys):
    code, out, _ = run(capsys, "eval", "--x", "1", "--t", "0.1", "--x0", "1", "--rep", "approx0")
    assert code == 0
    assert float(_field(out, "u")) == pytest.approx(1.5915494309189535e-3, rel=1e-15)


def test_eval_origin_is_domain_error(capsys):
    code, out, err = run(capsys, "eval", "--x", "0", "--t", "1", "--rep", "lambda")
    assert code == 2
    assert out == "" and "error" in err


def test_eval_t0_reports_warning(capsys):
    code, out, _ = run(capsys, "eval", "--x", "1", "--t", "0", "--rep", "lambda")
    assert code == 0
    assert "ValidityWarning" in _field(out, "warnings")


def test_eval_non_convergence_exit_code(capsys, tmp_path):
    cfg = tmp_path / "tight.cfg"
    cfg.write_text("max_subdivisions = 10\nabs_tol = 1e-14\nrel_tol = 1e-14\n")
    code, _, err = run(capsys, "--config", str(cfg), "eval", "--x", "1", "--t", "6.5",
                       "--x0", "0.1", "--rep", "spectral")
    assert code == 3
    assert "subdivisions" in err


def test_eval_as_printed(capsys):
    _, a, _ = run(capsys, "eval", "--x", "1000", "--t", "1", "--x0", "0", "--rep", "hseries")
    _, b, _ = run(capsys, "eval", "--x", "1000", "--t", "1", "--x0", "0", "--rep", "hseries",
                  "--as-printed")
    assert float(_field(b, "u")) / float(_field(a, "u")) == pytest.approx(0.5, abs=1e-5)
    code, _, _ = run(capsys, "eval", "--x", "1", "--t", "1", "--rep", "lambda", "--as-printed")
    assert code == 2


def test_eval_unknown_rep(capsys):
    code, _, _ = run(capsys, "eval", "--x", "1", "--t", "1", "--rep", "nope")
    assert code == 2


# -- config --------------------------------------------------------------------------------

def test_config_parsing():
    cfg = parse_config("# defaults\nmu = 2.5\nkappa=0.5  # trailing\n\nmax_terms = 50\n"
                       "out_dir = results\n")
    assert (cfg.mu, cfg.kappa, cfg.max_terms, cfg.out_dir) == (2.5, 0.5, 50, "results")
    assert cfg.x0 == 1.0


@pytest.mark.parametrize("text", ["colour = red\n", "mu\n", "x0 = -1\n", "max_terms = 1.5\n",
                                  "abs_tol = 0\n", "float_format = %q\n"])
def test_config_rejects(text):
    with pytest.raises(DomainError):
        parse_config(text)


def test_config_env_and_flag_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 2\nx0 = 0\n")
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    _, a, _ = run(capsys, "eval", "--x", "1", "--t", "0.1", "--rep", "delta")
    assert float(_field(a, "u")) == pytest.approx(2 * 1.5915467783376212e-3, rel=1e-13)
    _, b, _ = run(capsys, "eval", "--x", "1", "--t", "0.1", "--rep", "delta", "--mu", "1")
    assert float(_field(b, "u")) == pytest.approx(1.5915467783376212e-3, rel=1e-13)


def test_config_unknown_key_exit(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("temperature = 3\n")
    code, _, err = run(capsys, "--config", str(cfg), "eval", "--x", "1", "--t", "1")
    assert code == 2 and "unknown key" in err


def test_missing_config_file_is_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "--config", str(tmp_path / "absent.cfg"), "eval", "--x", "1",
                     "--t", "1")
    assert code == 4


# -- figure ----------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fig_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig")
    assert main(["figure", "--preset", "fig1", "--out", str(out)]) == 0
    return out


def test_figure_files(fig_dir):
    csvs = sorted(p.name for p in fig_dir.glob("*.csv"))
    assert len(csvs) == 12
    assert "fig1_x0=sqrt0.1_t=6.5.csv" in csvs
    assert "fig1_x0=1_t=0.1.csv" in csvs
    assert len(list(fig_dir.glob("*.gp"))) == 12
    assert not list(fig_dir.glob(".*"))


def test_figure_csv_layout(fig_dir):
    text = (fig_dir / "fig1_x0=1_t=0.1.csv").read_bytes().decode()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "x,u"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 2048
    xs = [r[0] for r in rows]
    assert xs == sorted(xs) and xs[0] == -15.0 and xs[-1] == 15.0
    assert min(abs(x) for x in xs) == 0.01
    assert all(u > 0 for _, u in rows)


def test_figure_manifest(fig_dir):
    m = json.loads((fig_dir / "fig1_manifest.json").read_text())
    counts = {(p["x0_tag"], p["t"]): p["node_count"] for p in m["panels"]}
    assert len(counts) == 12
    assert all(counts[(tag, 0.1)] == 0 for tag in ("1", "sqrt0.5", "sqrt0.1"))
    assert counts[("1", 1.7)] == 2
    assert counts[("sqrt0.1", 6.5)] >= counts[("sqrt0.5", 6.5)] >= counts[("1", 6.5)]
    assert m["window"] == [-15.0, 15.0] and m["points_per_sign"] == 1024


def test_figure_is_deterministic(fig_dir, tmp_path):
    assert main(["figure", "--out", str(tmp_path)]) == 0
    for p in fig_dir.iterdir():
        assert (tmp_path / p.name).read_bytes() == p.read_bytes()


def test_figure_plot_script(fig_dir):
    gp = (fig_dir / "fig1_x0=sqrt0.5_t=1.7.gp").read_text()
    assert "fig1_x0=sqrt0.5_t=1.7.csv" in gp
    assert "set datafile separator ','" in gp


def test_figure_io_error(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(capsys, "figure", "--out", str(blocker / "sub"))
    assert code == 4


def test_figure_unknown_preset(capsys, tmp_path):
    code, _, _ = run(capsys, "figure", "--preset", "fig9", "--out", str(tmp_path))
    assert code == 2
    assert list(tmp_path.iterdir()) == []


# -- nodes -------------------------------------------------------------------------------------

def test_nodes_short_time(capsys):
    code, out, _ = run(capsys, "nodes", "--t", "0.1", "--x0", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["nodes"] == [] and doc["count"] == 0
    assert '"nodes": []' in out


def test_nodes_delta_law(capsys):
    # nodes crowd the origin (|x_j| = kappa t^2 / xi_j), so the grid warns there
    with pytest.warns(GridResolutionWarning):
        code, out, _ = run(capsys, "nodes", "--t", "5", "--x0", "0", "--window", "15")
    doc = json.loads(out)
    assert doc["warnings"]
    assert code == 0 and doc["representation"] == "fresnel"
    assert max(doc["nodes"]) == pytest.approx(25.0 / 9.1897582944325565153, abs=1e-8)


def test_nodes_birth(capsys, tmp_path):
    out_file = tmp_path / "birth.json"
    code, out, _ = run(capsys, "nodes", "--birth", "--x0", "1", "--t-bracket", "0.5,2",
                       "--out", str(out_file))
    assert code == 0 and out == ""
    doc = json.loads(out_file.read_text())
    assert 0.5 < doc["birth_time"] < 2.0
    assert doc["t_bracket"] == [0.5, 2.0]


def test_nodes_bracket_failure(capsys):
    code, _, err = run(capsys, "nodes", "--birth", "--x0", "1", "--t-bracket", "0.1,0.5")
    assert code == 5 and "same sign" in err


@pytest.mark.parametrize("argv", [["nodes", "--x0", "1"], ["nodes", "--birth"],
                                  ["nodes", "--birth", "--t-bracket", "1"],
                                  ["nodes", "--t", "-1"]])
def test_nodes_bad_arguments(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


# -- compare / validity-map --------------------------------------------------------------------

def test_compare_xi_range(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", "--reps", "delta,fresnel", "--xi-range", "0.01,40",
                       "--out", str(tmp_path))
    assert code == 0
    assert float(_field(out, "max_abs_dev")) <= 1e-9
    doc = json.loads((tmp_path / "compare_delta_fresnel.json").read_text())
    assert doc["summary"]["n_points"] == 64
    lines = (tmp_path / "compare_delta_fresnel.csv").read_text().splitlines()
    assert len(lines) == 65


def test_compare_reports_large_deviation_with_exit_0(capsys):
    code, out, _ = run(capsys, "compare", "--reps", "lambda,spectral", "--x-list", "1",
                       "--t-list", "0.1", "--x0-list", "1")
    assert code == 0
    assert float(_field(out, "max_abs_dev")) > 0.1


def test_compare_bad_reps(capsys):
    assert run(capsys, "compare", "--reps", "lambda", "--preset", "fig1-grid")[0] == 2
    assert run(capsys, "compare", "--reps", "lambda,doublesum")[0] == 2
    assert run(capsys, "compare", "--reps", "lambda,doublesum", "--x-list", "0",
               "--t-list", "1")[0] == 2


def test_validity_map_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "validity-map", "--x-list", "1,6", "--t-list", "0.1",
                       "--x0-list", "0,1", "--tol", "1e-6", "--out", str(tmp_path))
    assert code == 0
    assert _field(out, "n") == "4"
    recs = json.loads((tmp_path / "validity_map.json").read_text())
    assert len(recs) == 4
    assert all(r["passed"] for r in recs if r["x0"] == 0.0)
    assert (tmp_path / "validity_map.csv").read_text().startswith("x,t,x0,xi,ratio_x_x0,")


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "rieszwave.cli", "eval", "--x", "2", "--t",
                          "1", "--x0", "0", "--rep", "fresnel"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("u=")


def test_atomic_write_leaves_no_temp_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "out.txt"
    target.write_text("old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        cli.atomic_write(target, "new")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_write_all_rolls_back_new_files(tmp_path, monkeypatch):
    real = cli.atomic_write
    calls = []

    def flaky(path, text):
        calls.append(path)
        if len(calls) == 2:
            raise OSError("no space")
        real(path, text)

    monkeypatch.setattr(cli, "atomic_write", flaky)
    with pytest.raises(OSError):
        cli.write_all({tmp_path / "a.csv": "1\n", tmp_path / "b.csv": "2\n"})
    assert list(tmp_path.iterdir()) == []
