import csv
import io
import json
import logging

import numpy as np
import pytest

from spiral.cli import (
	EXIT_CAP,
	EXIT_OK,
	EXIT_USAGE,
	UsageError,
	_parse_accels,
	_parse_point,
	main,
	trajectory_records,
	write_trajectory_csv,
)
from spiral.operators import crm_step, dr_step, iterate, shadow
from spiral.problems import circle_line, two_lines

logger = logging.getLogger(__name__)


def test_trajectory_csv_round_trips_exactly():
	problem = circle_line()
	traj = iterate(
		crm_step(problem.a, problem.b),
		problem.default_x0,
		max_iter=50,
		shadow_of=lambda p: shadow(problem.a, p),
	)
	out = io.StringIO()
	write_trajectory_csv(trajectory_records(traj), out)
	rows = list(csv.reader(io.StringIO(out.getvalue())))
	assert rows[0] == ["iter", "coord_0", "coord_1", "branch", "shadow_0", "shadow_1"]
	assert [int(row[0]) for row in rows[1:]] == list(range(len(traj.points)))
	for row, point, s in zip(rows[1:], traj.points, traj.shadows):
		assert np.array_equal([float(v) for v in row[1:3]], point)
		assert np.array_equal([float(v) for v in row[4:6]], s)


def test_trajectory_csv_without_shadows():
	problem = two_lines()
	traj = iterate(dr_step(problem.a, problem.b), problem.default_x0, max_iter=3, tol=0.0)
	out = io.StringIO()
	write_trajectory_csv(trajectory_records(traj), out)
	assert out.getvalue().splitlines()[0] == "iter,coord_0,coord_1,branch"


def test_parse_helpers():
	assert np.array_equal(_parse_point("1,-2.5"), np.array([1.0, -2.5]))
	with pytest.raises(UsageError):
		_parse_point("1,x")
	assert _parse_accels("none, lt,none") == ["none", "lt"]
	with pytest.raises(UsageError):
		_parse_accels("none,fast")
	with pytest.raises(UsageError):
		_parse_accels(",")


def test_main_exit_codes(tmp_path):
	out = tmp_path / "orbit.csv"
	assert main(["feas", "--problem", "two-lines", "--method", "lt", "--out", str(out)]) == EXIT_OK
	assert len(out.read_text(encoding="utf-8").splitlines()) == 3

	capped = tmp_path / "capped.csv"
	args = ["feas", "--problem", "two-lines", "--method", "dr", "--max-iter", "2", "--out", str(capped)]
	assert main(args) == EXIT_CAP

	assert main(["feas", "--problem", "circle-line", "--offset", "3", "--method", "dr"]) == EXIT_USAGE
	with pytest.raises(SystemExit) as excinfo:
		main(["feas", "--problem", "two-lines"])
	assert excinfo.value.code == EXIT_USAGE


def test_check_with_no_samples_passes(capsys):
	assert main(["check", "--instance", "exp-graph", "--checker", "mss", "--samples", "0"]) == EXIT_OK
	assert "exp-graph" in capsys.readouterr().out


def test_bp_solve_writes_a_record(tmp_path):
	out = tmp_path / "run.json"
	code = main(["bp", "solve", "--n", "10", "--nu", "3", "--accel", "none,lt", "--out", str(out)])
	report = json.loads(out.read_text(encoding="utf-8"))
	assert [run["method"] for run in report["runs"]] == ["none", "lt"]
	assert code == (EXIT_OK if all(run["solved"] for run in report["runs"]) else EXIT_CAP)
	assert report["n"] == 10 and report["nu"] == 3


def test_bp_solve_records_the_cap_of_each_arm(tmp_path):
	out = tmp_path / "ct.json"
	code = main(["bp", "solve", "--seed", "1", "--accel", "none,ct", "--out", str(out)])
	report = json.loads(out.read_text(encoding="utf-8"))
	runs = {run["method"]: run for run in report["runs"]}
	assert runs["none"]["max_iter"] == 1_000_000
	assert runs["ct"]["max_iter"] == 100_000
	assert runs["none"]["solved"]
	assert not runs["ct"]["solved"]
	assert runs["ct"]["iterations"] == 100_000
	assert "max_iter" not in report
	assert code == EXIT_CAP
