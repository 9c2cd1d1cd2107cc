import io

import pytest

from fitted_rk.harness.cli import main
from fitted_rk.harness.examples import EXAMPLE_FILES, example_problem
from fitted_rk.harness.tables import CSV_HEADER, emit_csv, format_csv, run_example


@pytest.fixture(scope="module")
def table2():
    return run_example(2, 11)


def test_csv_layout(table2):
    text = format_csv(table2)
    lines = text.split("\n")
    assert lines[0] == CSV_HEADER
    assert text.endswith("\n") and not text.endswith("\n\n")
    assert len(lines) == 13
    assert lines[1].startswith("0,0,") and lines[1].endswith(",indeterminate")
    assert lines[11].startswith("1,0,") and lines[11].endswith(",indeterminate")
    assert "indeterminate" not in "".join(lines[2:11])


def test_csv_is_deterministic(table2):
    assert format_csv(run_example(2, 11)) == format_csv(table2)


def test_emit_to_stream_and_path(table2, tmp_path):
    buf = io.StringIO()
    emit_csv(table2, buf)
    path = tmp_path / "t.csv"
    emit_csv(table2, path)
    assert path.read_text() == buf.getvalue() == format_csv(table2)


@pytest.mark.parametrize("dest", ["", "/nonexistent-dir/x.csv"])
def test_emit_bad_destination(table2, dest):
    with pytest.raises(OSError) as info:
        emit_csv(table2, dest)
    assert repr(dest) in str(info.value)


def test_unknown_example():
    with pytest.raises(ValueError):
        example_problem(4)
    assert sorted(EXAMPLE_FILES) == [1, 2, 3]


def test_run_example_rejects_small_n():
    with pytest.raises(ValueError):
        run_example(1, 1)


def test_cli_solve(capsys, tmp_path):
    out = tmp_path / "e2.csv"
    assert main(["solve", "--problem", "example2", "--n", "11", "--out", str(out)]) == 0
    assert out.read_text().startswith(CSV_HEADER)
    assert main(["solve", "--problem", "example2", "--n", "11"]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_cli_solve_without_exact(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("name = free\nlhs_extra = y\nforcing = sin(2*pi*t)  # no exact solution\n")
    assert main(["solve", "--problem", str(f), "--n", "11"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,approx" and len(lines) == 12


def test_cli_bench(capsys):
    assert main(["bench", "--examples", "2", "--n-list", "6,11"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "example,n,max_abs_err,passes,seconds"
    assert [l.split(",")[:2] for l in lines[1:]] == [["2", "6"], ["2", "11"]]


def test_cli_kernel_check(tmp_path):
    out = tmp_path / "kc.txt"
    assert main(["kernel-check", "--grid", "5", "--out", str(out)]) == 0
    assert "printed vs synthesized" in out.read_text()


@pytest.mark.parametrize(
    "argv,code",
    [
        (["solve"], 1),
        (["solve", "--problem", "missing-file.txt"], 1),
        (["solve", "--problem", "example9"], 1),
        (["solve", "--problem", "example1", "--n", "1"], 1),
        (["solve", "--problem", "example1", "--picard", "0"], 1),
        (["bench", "--n-list", "a,b"], 1),
        (["frobnicate"], 1),
    ],
)
def test_cli_input_errors(argv, code, capsys):
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code
    assert capsys.readouterr().err


def test_cli_parse_error(tmp_path, capsys):
    f = tmp_path / "p.txt"
    f.write_text("name = x\nlhs_extra = y +* 2\nforcing = 0\n")
    assert main(["solve", "--problem", str(f)]) == 1
    assert "offset" in capsys.readouterr().err


def test_cli_numerical_failure(tmp_path, capsys):
    f = tmp_path / "p.txt"
    f.write_text("name = x\nlhs_extra = log(y - 5)\nforcing = 0\n")
    assert main(["solve", "--problem", str(f), "--n", "6"]) == 2
    assert "node k=1" in capsys.readouterr().err


def test_cli_no_convergence_is_numerical(capsys):
    assert main(["solve", "--problem", "example1", "--n", "11", "--picard", "3"]) == 2
