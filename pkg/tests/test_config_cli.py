import math

import numpy as np
import pytest

from morsecontrol import RunConfig, parse_config, read_grid
from morsecontrol.cli import main
from morsecontrol.config import apply_overrides, config_times, parse_angle, parse_fraction
from morsecontrol.errors import ConfigError


def test_empty_config_gives_iodine_defaults():
    cfg = parse_config("")
    assert cfg.beta == 4.954
    assert cfg.mu == 1.156e5
    assert cfg.r0 == 5.03
    assert cfg.D == 0.057
    assert cfg.alpha == 2.0
    assert cfg.n_levels == 24
    assert (cfg.x_min, cfg.x_max, cfg.nx, cfg.np) == (-0.25, 0.45, 2048, 512)
    assert cfg.auto_p is True
    assert cfg.workers == 1


def test_comments_and_blank_lines():
    cfg = parse_config("# a comment\n\nalpha = 1.5  # inline\n")
    assert cfg.alpha == 1.5


def test_degenerate_coherent_state_is_valid_config():
    cfg = parse_config("alpha=0\nn_levels=2\n")
    assert cfg.alpha == 0.0
    assert cfg.n_levels == 2


def test_unknown_key_named_with_line():
    with pytest.raises(ConfigError, match=r"line 2: unknown key 'bogus'"):
        parse_config("alpha=1\nbogus=3\n")


def test_unparsable_value_named():
    with pytest.raises(ConfigError, match=r"line 1: nx"):
        parse_config("nx=many\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("alpha=1\nalpha=2\n")


def test_too_many_levels_rejected():
    with pytest.raises(ConfigError, match="117"):
        parse_config("n_levels=500\n")


def test_grid_sizes_must_be_powers_of_two():
    with pytest.raises(ConfigError, match="nx"):
        parse_config("nx=1000\n")
    with pytest.raises(ConfigError, match="np"):
        parse_config("np=64\n")


def test_inverted_range_rejected():
    with pytest.raises(ConfigError, match="x_min"):
        parse_config("x_min=0.5\nx_max=0.1\n")


def test_later_time_spec_wins():
    # the two time keys are mutually exclusive; the one set last replaces the other
    cfg = parse_config("t_frac=0.125\nt_au=100\n")
    assert cfg.t_frac is None and cfg.t_au == (100.0,)
    cfg = parse_config("t_au=100\nt_frac=0.125\n")
    assert cfg.t_au is None and cfg.t_frac == (0.125,)


def test_t_au_replaces_fractions():
    cfg = parse_config("t_au=10,20\n")
    assert cfg.t_frac is None
    assert cfg.t_au == (10.0, 20.0)
    times, fracs = config_times(cfg, revival_time=1000.0)
    assert times == (10.0, 20.0)
    assert fracs is None


def test_fraction_times_scale_with_revival():
    cfg = parse_config("t_frac=1/8,1/16\n")
    times, fracs = config_times(cfg, revival_time=1600.0)
    assert times == (200.0, 100.0)
    assert fracs == (0.125, 0.0625)


def test_angle_expressions():
    assert parse_angle("pi") == pytest.approx(math.pi)
    assert parse_angle("3pi/4") == pytest.approx(3 * math.pi / 4)
    assert parse_angle("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_angle("0.5pi") == pytest.approx(math.pi / 2)
    assert parse_angle("2pi") == pytest.approx(2 * math.pi)
    assert parse_angle("1.25") == 1.25


def test_fraction_expressions():
    assert parse_fraction("1/8") == 0.125
    assert parse_fraction("0.0625") == 0.0625
    with pytest.raises(ValueError):
        parse_fraction("1/0")


def test_theta_list_parse():
    cfg = parse_config("theta=0,pi/8,pi/4,3pi/8\n")
    assert cfg.theta == pytest.approx((0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8))


def test_overrides_apply_and_validate():
    cfg = apply_overrides(RunConfig(), ["alpha=1.0", "nx=256"])
    assert cfg.alpha == 1.0 and cfg.nx == 256
    with pytest.raises(ConfigError, match="unknown key"):
        apply_overrides(RunConfig(), ["nope=1"])
    with pytest.raises(ConfigError, match="key=value"):
        apply_overrides(RunConfig(), ["just-a-word"])


def test_manual_momentum_grid_needs_p_max():
    with pytest.raises(ConfigError, match="p_max"):
        parse_config("auto_p=false\n")
    cfg = parse_config("auto_p=false\np_max=800\n")
    assert cfg.p_max == 800.0


BASE = ["--set", "nx=512", "--set", "np=128"]


def run_cli(args):
    return main(args)


def test_eigen_command(tmp_path, capsys):
    assert run_cli(["eigen", "--outdir", str(tmp_path)] + BASE) == 0
    lines = (tmp_path / "eigen.csv").read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")]
    assert header[0] == "m,energy,exponent,norm,capture"
    assert len(header) == 25
    first = header[1].split(",")
    assert float(first[1]) == pytest.approx(-0.056512, abs=1e-6)
    assert float(first[3]) == pytest.approx(1.0, abs=1e-9)


def test_state_command_matches_library(tmp_path, model):
    assert run_cli([
        "state", "--outdir", str(tmp_path), "--set", "theta=0", "--set", "t_frac=0",
    ]) == 0
    rows = [l.split(",") for l in (tmp_path / "state_000.csv").read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("x,")]
    density = np.array([float(r[3]) for r in rows])
    # theta = 0 is the odd parity packet; 17 significant digits round-trip exactly
    expected = model.subsidiary("odd", 0.0).density
    assert np.array_equal(density, expected)


def test_wigner_command_writes_gridfile(tmp_path):
    assert run_cli([
        "wigner", "--outdir", str(tmp_path), "--set", "theta=pi/2", "--set", "t_frac=1/8",
    ] + BASE) == 0
    grid = read_grid(tmp_path / "wigner_000.wgrd")
    assert grid.payload.shape == (512, 128)
    assert grid.meta["wigner_prefactor"] == "1/pi"
    assert grid.meta["overlap_factor"] == "2pi"
    assert int(grid.meta["lobe_count"]) >= 1
    assert float(grid.meta["norm_captured"]) == pytest.approx(1.0, abs=1e-3)
    assert (tmp_path / "wigner_000.csv").exists()


def test_carpet_command(tmp_path):
    assert run_cli([
        "carpet", "--outdir", str(tmp_path), "--set", "theta_count=9",
        "--set", "t_frac=0.125",
    ] + BASE) == 0
    grid = read_grid(tmp_path / "carpet.wgrd")
    assert grid.payload.shape == (9, 512)
    x = grid.axes[1]
    for row in grid.payload:
        assert np.trapezoid(row, x) == pytest.approx(1.0, abs=1e-6)


def test_metrics_command(tmp_path):
    assert run_cli([
        "metrics", "--outdir", str(tmp_path),
        "--set", "theta=0,pi/2", "--set", "t_frac=1/8",
    ] + BASE) == 0
    lines = [l for l in (tmp_path / "metrics.csv").read_text().splitlines()
             if l and not l.startswith("#")]
    assert lines[0].startswith("theta,t_frac,t,dx,dp,action,tile_area")
    assert len(lines) == 3
    cat = lines[1].split(",")
    assert float(cat[6]) == pytest.approx(0.0796, abs=2e-3)  # tile area at theta=0
    assert int(cat[8]) == 2  # the split packet is a two-lobe cat


def test_sensitivity_command(tmp_path):
    assert run_cli([
        "sensitivity", "--outdir", str(tmp_path),
        "--set", "theta=pi/2", "--set", "t_frac=1/8", "--set", "steps=32",
    ] + BASE) == 0
    text = (tmp_path / "sensitivity.csv").read_text()
    assert "# first_zero=" in text
    rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
    assert float(rows[0].split(",")[1]) == pytest.approx(1.0, abs=1e-6)
    assert rows[0].split(",")[2] != ""  # wigner cross-check at the first shift


def test_table1_command(tmp_path):
    assert run_cli(["table1", "--outdir", str(tmp_path), "--set", "nx=1024"]) == 0
    lines = [l for l in (tmp_path / "table1.csv").read_text().splitlines()
             if l and not l.startswith("#")]
    assert lines[0] == "theta,0,pi/8,pi/4,3pi/8,pi/2,5pi/8,3pi/4,7pi/8,pi"
    values = [float(v) for v in lines[1].split(",")[1:]]
    assert len(values) == 9
    assert values[0] == 0.0
    assert all(values[i + 1] >= values[i] for i in range(8))


def test_table2_command_layout_and_report(tmp_path):
    assert run_cli(["table2", "--outdir", str(tmp_path), "--set", "nx=1024"]) == 0
    lines = [l for l in (tmp_path / "table2.csv").read_text().splitlines()
             if l and not l.startswith("#")]
    assert lines[0] == "theta,0,pi/8,pi/4,3pi/8,pi/2,5pi/8,3pi/4,7pi/8,pi"
    assert lines[1].startswith("T_rev/8,")
    assert lines[2].startswith("T_rev/16,")
    row8 = [float(v) for v in lines[1].split(",")[1:]]
    row16 = [float(v) for v in lines[2].split(",")[1:]]
    assert len(row8) == len(row16) == 9
    assert all(a < b for a, b in zip(row16, row8))
    report = tmp_path / "table2_convention_report.csv"
    if report.exists():
        body = [l for l in report.read_text().splitlines() if not l.startswith("#")]
        assert body[0] == "label,theta,t_frac,tile_area_x_conjugate,tile_area_r_scaled,reference"
        assert len(body) >= 2


def test_cli_rejects_bad_config(tmp_path, capsys):
    assert run_cli(["eigen", "--outdir", str(tmp_path), "--set", "n_levels=500"]) == 1
    assert "117" in capsys.readouterr().err


def test_cli_reports_missing_config_file(tmp_path, capsys):
    assert run_cli(["eigen", "--config", str(tmp_path / "nope.cfg")]) == 1
    assert "not found" in capsys.readouterr().err


def test_cli_degenerate_state_fails_cleanly(tmp_path, capsys):
    assert run_cli(["state", "--outdir", str(tmp_path), "--set", "alpha=0"] + BASE) == 1
    assert "split" in capsys.readouterr().err.lower() or not list(tmp_path.iterdir())


def test_partial_outputs_removed_on_failure(tmp_path, capsys):
    # the first lattice point fits inside p_max, the second does not: the
    # command must fail and remove the files it already wrote
    code = run_cli([
        "wigner", "--outdir", str(tmp_path),
        "--set", "theta=pi/2", "--set", "t_frac=0,1/8",
        "--set", "auto_p=false", "--set", "p_max=300",
    ] + BASE)
    assert code == 1
    assert "spectral content" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_config_file_and_override_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("alpha=1.0\nnx=256\n")
    out = tmp_path / "out"
    assert run_cli([
        "eigen", "--config", str(cfg_file), "--outdir", str(out), "--set", "n_levels=4",
    ]) == 0
    lines = [l for l in (out / "eigen.csv").read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 5  # header + 4 levels


def test_worker_env_override_bytes_identical(tmp_path, monkeypatch):
    args = ["wigner", "--set", "theta=pi/4", "--set", "t_frac=1/16"] + BASE
    monkeypatch.setenv("MORSECONTROL_WORKERS", "1")
    assert run_cli(args + ["--outdir", str(tmp_path / "w1")]) == 0
    monkeypatch.setenv("MORSECONTROL_WORKERS", "4")
    assert run_cli(args + ["--outdir", str(tmp_path / "w4")]) == 0
    for name in ("wigner_000.wgrd", "wigner_000.csv"):
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w4" / name).read_bytes()
