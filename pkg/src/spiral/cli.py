"""
Command-line front end.

	spiral feas      orbit of DR / CRM / L_T on a feasibility problem (CSV)
	spiral check     Lyapunov identity sweeps on graph instances
	spiral bp solve  one basis pursuit solve per acceleration arm (JSON)
	spiral bp bench  batch benchmark with per-method statistics (JSON, Markdown)

Exit codes: 0 success, 1 usage or validation error (or a failed check),
2 iteration cap exceeded.
"""

import argparse
import csv
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, List, Optional, Sequence, TextIO

import numpy as np

from spiral.bench.instances import generate_instance
from spiral.bench.runner import run_benchmark
from spiral.errors import SpiralError
from spiral.geometry import DEFAULT_EPS_COL, as_point
from spiral.lyapunov import CHECKERS, sweep
from spiral.operators.maps import Trajectory, crm_step, dr_step, iterate, lt_step, shadow
from spiral.problems import FEASIBILITY_PROBLEMS, GRAPH_INSTANCES, build_graph_instance, build_problem
from spiral.settings.extract_settings import APP_SETTINGS
from spiral.splitting.basis_pursuit import SolverConfig, bp_solve
from spiral.utils.telemetry.report_generator import ReportGenerator
from spiral.utils.telemetry.schemas import SolveReport, TrajectoryRecord

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAP = 2

METHODS = ("dr", "crm", "lt")
ACCELS = ("none", "lt", "ct")


class UsageError(Exception):
	pass


class _Parser(argparse.ArgumentParser):
	"""argparse exits with status 2 on bad arguments; 2 is reserved for caps here."""

	def error(self, message: str):
		self.print_usage(sys.stderr)
		self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _open_out(path: str) -> Iterator[TextIO]:
	if path == "-":
		yield sys.stdout
		sys.stdout.flush()
	else:
		with open(path, "w", encoding="utf-8", newline="") as f:
			yield f


def _parse_point(text: str) -> np.ndarray:
	try:
		return as_point([float(v) for v in text.split(",")])
	except ValueError as e:
		raise UsageError(f"cannot parse point {text!r}: {e}") from e


def _parse_accels(text: str) -> List[str]:
	accels = [a.strip() for a in text.split(",") if a.strip()]
	unknown = [a for a in accels if a not in ACCELS]
	if not accels or unknown:
		raise UsageError(f"--accel takes a comma separated subset of {ACCELS}, got {text!r}")
	return list(dict.fromkeys(accels))


def trajectory_records(traj: Trajectory) -> List[TrajectoryRecord]:
	records = []
	for i, (point, branch) in enumerate(zip(traj.points, traj.branches)):
		records.append(
			TrajectoryRecord(
				iteration=i,
				coords=[float(v) for v in point],
				branch=branch.value,
				shadow=[float(v) for v in traj.shadows[i]] if traj.shadows else None,
			)
		)
	return records


def write_trajectory_csv(records: Sequence[TrajectoryRecord], out: TextIO) -> None:
	"""``iter,coord_0..coord_{d-1},branch,shadow_0..`` with round-trip float reprs."""
	dim = len(records[0].coords)
	with_shadow = records[0].shadow is not None
	header = ["iter"] + [f"coord_{j}" for j in range(dim)] + ["branch"]
	if with_shadow:
		header += [f"shadow_{j}" for j in range(dim)]
	writer = csv.writer(out, lineterminator="\n")
	writer.writerow(header)
	for r in records:
		row = [str(r.iteration)] + [repr(v) for v in r.coords] + [r.branch]
		if with_shadow:
			row += [repr(v) for v in r.shadow]
		writer.writerow(row)


def cmd_feas(args: argparse.Namespace) -> int:
	problem = build_problem(args.problem, theta=args.theta, offset=args.offset)
	x0 = _parse_point(args.x0) if args.x0 else problem.default_x0
	if x0.shape[0] != problem.dim:
		raise UsageError(f"{args.problem} lives in R^{problem.dim}, got x0 of dimension {x0.shape[0]}")
	dr = dr_step(problem.a, problem.b)
	step = {
		"dr": dr,
		"crm": crm_step(problem.a, problem.b, args.eps_col),
		"lt": lt_step(dr, args.eps_col),
	}[args.method]

	traj = iterate(
		step, x0, max_iter=args.max_iter, tol=args.tol, shadow_of=lambda p: shadow(problem.a, p)
	)
	with _open_out(args.out) as out:
		write_trajectory_csv(trajectory_records(traj), out)
	logger.info(
		f"{args.method} on {problem.name}: {traj.steps} steps, "
		f"{'converged' if traj.converged else 'cap reached'}, final {traj.last}"
	)
	return EXIT_OK if traj.converged else EXIT_CAP


def cmd_check(args: argparse.Namespace) -> int:
	instance = build_graph_instance(args.instance, theta=args.theta)
	report = sweep(instance, args.checker, args.samples, seed=args.seed, tol=args.tol)
	print(f"{'instance':<16} {'checker':<10} {'checked':>7} {'skipped':>7} {'failures':>8} {'max_residual':>12}")
	print(
		f"{report.instance:<16} {report.checker:<10} {report.checked:>7} {report.skipped:>7} "
		f"{report.failures:>8} {report.max_residual:>12.3e}"
	)
	if not report.passed:
		logger.error(f"{report.failures} of {report.checked} samples exceed tol={args.tol:g}")
		return EXIT_USAGE
	return EXIT_OK


def _solver_config(args: argparse.Namespace, accel: str) -> SolverConfig:
	if args.max_iter is not None:
		max_iter = args.max_iter
	elif accel == "ct":
		max_iter = APP_SETTINGS["solver"]["ct_max_iter"]
	else:
		max_iter = APP_SETTINGS["solver"]["max_iter"]
	return SolverConfig(
		tol=args.tol, max_iter=max_iter, accel_every=args.accel_every, eps_col=args.eps_col, raise_on_cap=False
	)


def cmd_bp_solve(args: argparse.Namespace) -> int:
	accels = _parse_accels(args.accel)
	inst = generate_instance(args.seed, n=args.n, nu=args.nu, c=args.c, nonzeros=args.nonzeros)
	report = SolveReport(seed=args.seed, n=args.n, nu=args.nu, c=args.c, nonzeros=args.nonzeros, tol=args.tol)
	capped = False
	for accel in accels:
		config = _solver_config(args, accel)
		result = bp_solve(inst, accel, config)
		report.runs.append(result.to_record())
		logger.info(
			f"{accel}: {'solved' if result.solved else 'cap exceeded'} after {result.iterations} passes "
			f"(objective {result.objective:.6g}, {result.accel_accepted}/{result.accel_attempts} accelerations kept)"
		)
		capped |= not result.solved
	with _open_out(args.out) as out:
		out.write(report.model_dump_json(indent=2) + "\n")
	return EXIT_CAP if capped else EXIT_OK


def cmd_bp_bench(args: argparse.Namespace) -> int:
	accels = _parse_accels(args.accel)
	if args.instances < 0:
		raise UsageError("--instances must be nonnegative")
	# one cap for every arm of the batch
	config = _solver_config(args, "ct" if accels == ["ct"] else "none")
	report = run_benchmark(
		instances=args.instances,
		seed_base=args.seed_base,
		n=args.n,
		nu=args.nu,
		c=args.c,
		methods=accels,
		config=config,
		workers=args.workers,
		nonzeros=args.nonzeros,
	)
	with _open_out(args.out) as out:
		out.write(report.model_dump_json(indent=2) + "\n")
	if args.summary:
		ReportGenerator(report).generate_report(args.summary)
	for stats in report.stats:
		if stats.solved_count < stats.instances:
			logger.warning(f"{stats.method}: {stats.instances - stats.solved_count} instances hit the cap")
	return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
	parser = _Parser(prog="spiral", description="Surrogate-minimising acceleration of splitting methods.")
	parser.add_argument(
		"--log-level",
		default=None,
		type=str.upper,
		choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
		help="Override logger.level from config.yml",
	)
	sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

	feas = sub.add_parser("feas", help="Record an orbit on a two-set feasibility problem")
	feas.add_argument("--problem", required=True, choices=FEASIBILITY_PROBLEMS)
	feas.add_argument("--theta", type=float, default=None, help="Angle of the second line (two-lines)")
	feas.add_argument("--offset", type=float, default=None, help="Height of the line (circle-line)")
	feas.add_argument("--method", required=True, choices=METHODS)
	feas.add_argument("--x0", default=None, help="Comma separated starting point")
	feas.add_argument("--max-iter", type=int, default=500)
	feas.add_argument("--tol", type=float, default=1e-10)
	feas.add_argument("--eps-col", type=float, default=DEFAULT_EPS_COL)
	feas.add_argument("--out", default="-")
	feas.set_defaults(handler=cmd_feas)

	check = sub.add_parser("check", help="Sweep a Lyapunov checker over random points")
	check.add_argument("--instance", required=True, choices=GRAPH_INSTANCES)
	check.add_argument("--checker", required=True, choices=CHECKERS)
	check.add_argument("--theta", type=float, default=None, help="Angle of the second line (two-lines)")
	check.add_argument("--samples", type=int, default=200)
	check.add_argument("--seed", type=int, default=0)
	check.add_argument("--tol", type=float, default=1e-8)
	check.set_defaults(handler=cmd_check)

	bp = sub.add_parser("bp", help="Basis pursuit by (accelerated) ADMM")
	bp_sub = bp.add_subparsers(dest="mode", required=True, parser_class=_Parser)
	solve = bp_sub.add_parser("solve", help="Solve one random instance")
	solve.add_argument("--seed", type=int, default=0)
	solve.set_defaults(handler=cmd_bp_solve)
	bench = bp_sub.add_parser("bench", help="Benchmark a batch of random instances")
	bench.add_argument("--instances", type=int, default=200)
	bench.add_argument("--seed-base", type=int, default=1)
	bench.add_argument("--workers", type=int, default=APP_SETTINGS["bench"]["workers"])
	bench.add_argument("--summary", default=None, help="Also write a Markdown statistics table here")
	bench.set_defaults(handler=cmd_bp_bench)
	for p, default_accel in ((solve, "none"), (bench, "none,lt")):
		p.add_argument("--n", type=int, default=30)
		p.add_argument("--nu", type=int, default=10)
		p.add_argument("--c", type=float, default=1.0)
		p.add_argument("--nonzeros", type=int, default=None, help="Nonzeros of x_true (default ceil(n / 10))")
		p.add_argument("--accel", default=default_accel, help=f"Comma separated subset of {ACCELS}")
		p.add_argument("--max-iter", type=int, default=None)
		p.add_argument("--tol", type=float, default=APP_SETTINGS["solver"]["tol"])
		p.add_argument("--accel-every", type=int, default=APP_SETTINGS["solver"]["accel_every"])
		p.add_argument("--eps-col", type=float, default=DEFAULT_EPS_COL)
		p.add_argument("--out", default="-")
	return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
	parser = build_parser()
	args = parser.parse_args(argv)
	if args.log_level:
		logging.getLogger().setLevel(args.log_level)
	try:
		return args.handler(args)
	except (UsageError, SpiralError, ValueError) as e:
		logger.error(f"{type(e).__name__}: {e}")
		return EXIT_USAGE
