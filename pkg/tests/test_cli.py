import json

import numpy as np
import pandas as pd
import pytest

import results_io
from cli import EXIT_NONCONVERGENCE, EXIT_OK, EXIT_USAGE, main

IDENTITY = {"kind": "identity"}


def write_config(tmp_path, sections):
    document = {"output": {"directory": str(tmp_path / "out")}}
    document.update(sections)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document))
    return str(path)


# --- results_io ---

def test_write_table_is_byte_stable(tmp_path):
    frame = pd.DataFrame({"k": [0.1, 1.0 / 3.0], "omega": [0.5, 2.25]})
    first = results_io.write_table(frame, str(tmp_path / "a" / "t.csv"), comment="run 1")
    second = results_io.write_table(frame, str(tmp_path / "b" / "t.csv"), comment="run 1")
    text = open(first, encoding="utf-8").read()
    assert text == open(second, encoding="utf-8").read()
    assert text.splitlines()[:3] == ["# run 1", "k,omega", "0.10000000000000001,0.5"]
    pd.testing.assert_frame_equal(results_io.load_table(first), frame)


def test_staircase_frame_endpoints(middle_third):
    frame = results_io.staircase_frame(middle_third, 7)
    assert list(frame.columns) == ["xi", "value"]
    assert frame["value"].iloc[0] == 0.0
    assert frame["value"].iloc[-1] == 1.0
    assert frame["value"].is_monotonic_increasing


def test_coefficient_frames():
    one = results_io.coefficient_frame(np.array([1.0, 0.5]), np.array([3.0, 6.0]))
    assert list(one.columns) == ["n", "coefficient", "omega"]
    two = results_io.coefficient_frame(np.eye(2), np.ones((2, 2)))
    assert list(two[["m", "n"]].itertuples(index=False, name=None)) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert two["coefficient"].tolist() == [1.0, 0.0, 0.0, 1.0]


# --- command line ---

def test_valuation_command(capsys):
    assert main(["valuation", "0.1", "--delta", "0.01"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "v(x):" in out
    assert "X_ph = (delta/x)^v:" in out


def test_staircase_command_writes_csv(tmp_path):
    out = tmp_path / "stair.csv"
    assert main(["staircase", "--ratio", "1/4", "--samples", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=cantor m=2 ratio=0.25 dimension=0.5"
    assert lines[1] == "xi,value"
    assert lines[2] == "0,0"
    assert lines[-1] == "1,1"
    assert len(lines) == 7


def test_staircase_command_rejects_overlap(tmp_path, capsys):
    assert main(["staircase", "--ratio", "0.6", "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE
    assert "overlaps" in capsys.readouterr().err


def test_usage_errors():
    assert main(["valuation"]) == EXIT_USAGE
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main(["valuation", "-0.5", "--delta", "0.01"]) == EXIT_USAGE


def test_classify_command(capsys):
    assert main(["classify", "n^(-2.5)"]) == EXIT_OK
    assert "RelevantMinus" in capsys.readouterr().out
    assert main(["classify", "n^(-2.5) + q"]) == EXIT_USAGE


def test_massfn_command(capsys):
    assert main(["massfn", "--level", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Refined mass" in out
    assert "Segments (level 3):  64" in out


def test_derivative_command(capsys):
    assert main(["derivative", "u^2", "--x", "0.25"]) == EXIT_OK
    assert "On support:  True" in capsys.readouterr().out


def test_derivative_without_limit_exits_with_nonconvergence():
    assert main(["derivative", "sqrt(u)", "--x", "0", "--identity"]) == EXIT_NONCONVERGENCE


def test_integrate_command(capsys):
    assert main(["integrate", "u", "--b", "0.3333333333333333"]) == EXIT_OK
    assert "Agreement:            yes" in capsys.readouterr().out


def test_solve1d_command(tmp_path):
    config = write_config(tmp_path, {
        "seed": IDENTITY,
        "caps": {"modes_1d": 8, "quadrature_level": 10},
        "wave1d": {"profile": "u*(1-u)", "times": [0.0, 0.5], "points": 11},
    })
    assert main(["solve1d", config]) == EXIT_OK
    coefficients = results_io.load_table(str(tmp_path / "out" / "coefficients_1d.csv"))
    assert coefficients["coefficient"].iloc[0] == pytest.approx(8.0 / np.pi ** 3, abs=1e-6)
    grid = results_io.load_table(str(tmp_path / "out" / "solution_1d.csv"))
    assert list(grid.columns) == ["t", "x", "U"]
    assert len(grid) == 22
    assert grid["U"].iloc[5] == pytest.approx(0.25, abs=1e-3)


def test_solve1d_boundary_violation(tmp_path, capsys):
    config = write_config(tmp_path, {"seed": IDENTITY, "wave1d": {"profile": "1+u"}})
    assert main(["solve1d", config]) == EXIT_USAGE
    assert "boundary" in capsys.readouterr().err


def test_solve2d_command(tmp_path):
    config = write_config(tmp_path, {
        "caps": {"modes_2d": 3, "quadrature_level_2d": 6},
        "seed": {"ratio": "1/4", "level": 30},
        "wave2d": {"times": [0.0], "points": 5},
    })
    assert main(["solve2d", config]) == EXIT_OK
    coefficients = results_io.load_table(str(tmp_path / "out" / "coefficients_2d.csv"))
    assert coefficients["coefficient"].iloc[0] == pytest.approx(1.0, abs=1e-10)
    assert coefficients["omega"].iloc[0] == pytest.approx(np.pi * np.sqrt(2.0))


def test_dispersion_command(tmp_path):
    config = write_config(tmp_path, {
        "seed": IDENTITY,
        "dispersion": {"speed_factor": 0.5, "k_values": [2.0, 1.0]},
    })
    assert main(["dispersion", config]) == EXIT_OK
    table = results_io.load_table(str(tmp_path / "out" / "dispersion.csv"))
    assert table.values.tolist() == [[1.0, 0.5], [2.0, 1.0]]


def test_lacunary_command(tmp_path):
    config = write_config(tmp_path, {"lacunary": {"k": 0, "support": "unit", "m_cap": 2, "n_cap": 2}})
    assert main(["lacunary", config]) == EXIT_OK
    coefficients = results_io.load_table(str(tmp_path / "out" / "lacunary_coefficients_k0.csv"))
    assert coefficients["coefficient"].iloc[0] == pytest.approx(1.0, abs=1e-10)
    assert (tmp_path / "out" / "lacunary_k0.csv").exists()


def test_missing_section_and_bad_config(tmp_path, capsys):
    config = write_config(tmp_path, {})
    assert main(["lacunary", config]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"seed": {"pieces": 1}}))
    assert main(["solve1d", str(bad)]) == EXIT_USAGE
    assert "seed.pieces" in capsys.readouterr().err
    assert main(["solve1d", str(tmp_path / "missing.json")]) == EXIT_USAGE


@pytest.mark.parametrize(
    "expression, label",
    [("n^(-1)", "IrrelevantNull"), ("n^(-(1+sin(pi*n)))", "IrrelevantDivergent")],
)
def test_classify_examples(capsys, expression, label):
    assert main(["classify", expression]) == EXIT_OK
    assert label in capsys.readouterr().out
