import io
import subprocess
import sys

from qsolve.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE, main, selftest
from qsolve.golden import SAMPLE_QLP, BUILDERS
from qsolve.qlp import parse_qlp, write_qlp


def test_solve_writes_solution_file(tmp_path, capsys):
    path = tmp_path / "Example.qlp"
    path.write_text(SAMPLE_QLP)
    assert main(["solve", str(path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "status OPTIMAL" in out
    assert "objective -1" in out
    assert "pv 2,1,1,0" in out
    sol = (tmp_path / "Example.qlp.sol").read_text()
    assert 'ProblemName="Example.qlp"' in sol


def test_infeasible_exit_code(tmp_path):
    path = tmp_path / "dead.qlp"
    path.write_text(write_qlp(BUILDERS["dominance_fixed_example"]()))
    assert main(["solve", str(path), "--relaxation", "none"]) == EXIT_INFEASIBLE


def test_timeout_exit_code(tmp_path):
    path = tmp_path / "mcn.qlp"
    assert main(["gen-mcn", "--nodes", "12", "--density", "0.3", "--omega", "2", "--phi", "2",
                 "--lam", "2", "--seed", "3", "--output", str(path)]) == EXIT_OK
    assert main(["solve", str(path), "--time-limit", "0.05"]) == EXIT_TIMEOUT


def test_usage_and_parse_errors(tmp_path, capsys):
    assert main([]) == EXIT_USAGE
    assert main(["solve", str(tmp_path / "missing.qlp")]) == EXIT_USAGE
    bad = tmp_path / "bad.qlp"
    bad.write_text("MAXIMIZE\nx\nEND\n")
    assert main(["solve", str(bad)]) == EXIT_USAGE
    assert "qsolve: error:" in capsys.readouterr().err


def test_gen_mcn_emits_parsable_qlp(tmp_path, capsys):
    assert main(["gen-mcn", "--nodes", "5", "--variant", "DD", "--seed", "1"]) == EXIT_OK
    p = parse_qlp(capsys.readouterr().out)
    assert p.n == 20
    edges = tmp_path / "g.txt"
    edges.write_text("a b\nb c\n")
    assert main(["gen-mcn", "--edges", str(edges)]) == EXIT_OK
    assert parse_qlp(capsys.readouterr().out).n == 12
    assert main(["gen-mcn"]) == EXIT_USAGE


def test_oracle_subcommand(tmp_path, capsys):
    path = tmp_path / "Example.qlp"
    path.write_text(SAMPLE_QLP)
    assert main(["oracle", str(path)]) == EXIT_OK
    assert "value -1" in capsys.readouterr().out


def test_selftest_passes():
    buf = io.StringIO()
    assert selftest(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == len(BUILDERS) + 1
    assert all(line.startswith("PASS") for line in lines)


def test_module_entry_point(tmp_path):
    path = tmp_path / "Example.qlp"
    path.write_text(SAMPLE_QLP)
    out = subprocess.run(
        [sys.executable, "-m", "qsolve", "solve", str(path)],
        capture_output=True, text=True, env={"QSOLVE_LOG": "info", "PATH": ""},
    )
    assert out.returncode == 0
    assert "objective -1" in out.stdout
    assert "status=OPTIMAL" in out.stderr
