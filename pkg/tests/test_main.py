"""Tests for the command-line entry point."""

import numpy as np
import pandas as pd
import pytest

from dde_compound.main import build_parser, main


def test_simulate_exit_code(tmp_path) -> None:
    """Test a successful run."""
    code = main(["--out", str(tmp_path), "simulate", "--n-sub", "8", "--horizon", "1"])
    assert code == 0
    assert (tmp_path / "trajectory.csv").exists()
    assert (tmp_path / "run_record.json").exists()


def test_sign_violation_is_invalid_argument(tmp_path) -> None:
    """Test exit code 2 for positivity with (-1)^m b < 0."""
    code = main(["--out", str(tmp_path), "positivity", "--n-sub", "8", "--m", "2", "--beta=-1", "--trials", "1"])
    assert code == 2


def test_missing_config_is_invalid_argument(tmp_path) -> None:
    """Test exit code 2 for an absent configuration file."""
    assert main(["--config", str(tmp_path / "absent.json"), "simulate"]) == 2


def test_unknown_log_level(tmp_path) -> None:
    """Test exit code 2 for a log level name logging does not know."""
    assert main(["--log-level", "chatty", "--out", str(tmp_path), "simulate", "--n-sub", "8"]) == 2
    assert not (tmp_path / "run_record.json").exists()


def test_overflow_is_numeric_failure(tmp_path) -> None:
    """Test exit code 3 when the solution overflows."""
    argv = ["--out", str(tmp_path), "simulate", "--n-sub", "8", "--beta=-1e10", "--initial", "1e300"]
    assert main(argv) == 3


def test_capacity_exit_code(tmp_path, mock_settings) -> None:
    """Test exit code 4 when the cube ceiling is exceeded."""
    argv = ["--out", str(tmp_path), "positivity", "--n-sub", "10", "--m", "3", "--beta=-1", "--trials", "1"]
    assert main(argv) == 4


def test_failed_certificate_exit_code(tmp_path) -> None:
    """Test exit code 1 when a binding check fails."""
    argv = ["--out", str(tmp_path), "u0check", "--n-sub", "10", "--m", "3", "--k", "1", "--probe", "bump"]
    assert main(argv) == 1


def test_spectrum_writes_stdout(tmp_path, capsys) -> None:
    """Test that the eigenvalue table is echoed on stdout."""
    matrix = tmp_path / "matrix.csv"
    pd.DataFrame(np.diag([4.0, -3.0])).to_csv(matrix, header=False, index=False)
    code = main(["--out", str(tmp_path / "out"), "spectrum", "--matrix", str(matrix)])
    assert code == 0
    assert capsys.readouterr().out.startswith("re,im,mult\n4,0,1\n")


def test_coefficient_shorthand() -> None:
    """Test parsing of constant and sinusoidal coefficients."""
    args = build_parser().parse_args(["floquet", "--beta", "1+0.5*sin", "--alpha", "0.25"])
    assert args.beta["kind"] == "sinusoid"
    assert args.beta["mean"] == 1.0
    assert args.beta["amplitude"] == 0.5
    assert args.alpha["value"] == 0.25


def test_short_flag_spellings() -> None:
    """Test that --nsub and --kmax are accepted next to the hyphenated forms."""
    for subcommand in ("floquet", "u0check"):
        args = build_parser().parse_args([subcommand, "--nsub", "64", "--kmax", "5"])
        assert args.n_sub == 64
        assert args.k_max == 5
    args = build_parser().parse_args(["floquet", "--n-sub", "16", "--k-max", "3"])
    assert (args.n_sub, args.k_max) == (16, 3)


def test_bad_coefficient() -> None:
    """Test that an unparsable coefficient is a usage error."""
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["floquet", "--beta", "abc"])
    assert excinfo.value.code == 2


def test_subcommand_required() -> None:
    """Test that a subcommand must be given."""
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
