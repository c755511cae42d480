"""
Benchmark runner.

Instances are solved independently. With more than one worker each instance
is submitted as an AsyncFlow function task to a ``WorkflowEngine`` backed by a
spawn-based process pool. Rows are sorted by seed before aggregation so the
report does not depend on completion order.
"""

import asyncio
import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

from radical.asyncflow import WorkflowEngine

try:
	from radical.asyncflow import ConcurrentExecutionBackend
except ImportError:  # radical.asyncflow<=0.5.1 names it LocalExecutionBackend
	from radical.asyncflow import LocalExecutionBackend as ConcurrentExecutionBackend

from spiral.bench.instances import generate_instance
from spiral.bench.stats import bench_stats, winners
from spiral.splitting.basis_pursuit import SolverConfig, bp_solve
from spiral.utils.logger import add_context_to_log
from spiral.utils.telemetry.schemas import BenchInstanceRow, BenchReport

logger = logging.getLogger(__name__)


def solve_instance(
	seed: int,
	n: int,
	nu: int,
	c: float,
	methods: Sequence[str],
	config: SolverConfig,
	nonzeros: Optional[int] = None,
) -> BenchInstanceRow:
	inst = generate_instance(seed, n=n, nu=nu, c=c, nonzeros=nonzeros)
	iterations = {}
	solved = {}
	for method in methods:
		with add_context_to_log(seed=seed, method=method):
			result = bp_solve(inst, method, config)
			if not result.solved:
				logger.warning(f"Cap of {config.max_iter} passes reached")
		iterations[method] = result.iterations
		solved[method] = result.solved
	return BenchInstanceRow(seed=seed, iterations=iterations, solved=solved, winners=winners(iterations, solved))


async def solve_instance_task(
	seed: int,
	n: int,
	nu: int,
	c: float,
	methods: List[str],
	config: SolverConfig,
	nonzeros: Optional[int] = None,
) -> BenchInstanceRow:
	"""AsyncFlow task body; module level so spawned workers can import it."""
	return solve_instance(seed, n, nu, c, methods, config, nonzeros)


async def _run_on_engine(
	seeds: Sequence[int],
	n: int,
	nu: int,
	c: float,
	methods: List[str],
	config: SolverConfig,
	workers: int,
	nonzeros: Optional[int],
) -> List[BenchInstanceRow]:
	context = multiprocessing.get_context("spawn")
	backend = await ConcurrentExecutionBackend(ProcessPoolExecutor(max_workers=workers, mp_context=context))
	logger.info(f"Creating WorkflowEngine on {type(backend).__name__} with {workers} workers")
	flow = await WorkflowEngine.create(backend=backend)
	try:
		task = flow.function_task(solve_instance_task)
		futures = [task(seed, n, nu, c, methods, config, nonzeros) for seed in seeds]
		return list(await asyncio.gather(*futures))
	finally:
		await flow.shutdown()
		logger.info("WorkflowEngine shutdown complete")


async def run_bench(
	seeds: Sequence[int],
	n: int,
	nu: int,
	c: float,
	methods: Sequence[str],
	config: SolverConfig,
	workers: int = 1,
	nonzeros: Optional[int] = None,
) -> List[BenchInstanceRow]:
	"""Solves every seed with every method and returns the rows sorted by seed."""
	if workers <= 1:
		rows = [solve_instance(seed, n, nu, c, methods, config, nonzeros) for seed in seeds]
	else:
		rows = await _run_on_engine(seeds, n, nu, c, list(methods), config, workers, nonzeros)
	return sorted(rows, key=lambda row: row.seed)


def run_benchmark(
	instances: int,
	seed_base: int,
	n: int,
	nu: int,
	c: float,
	methods: Sequence[str],
	config: SolverConfig,
	workers: int = 1,
	nonzeros: Optional[int] = None,
) -> BenchReport:
	seeds = list(range(seed_base, seed_base + instances))
	logger.info(f"Benchmarking {', '.join(methods)} on {instances} instances (n={n}, nu={nu}, c={c}, workers={workers})")
	rows = asyncio.run(run_bench(seeds, n, nu, c, methods, config, workers, nonzeros))
	report = BenchReport(
		n=n,
		nu=nu,
		c=c,
		nonzeros=nonzeros,
		instances=instances,
		seed_base=seed_base,
		tol=config.tol,
		max_iter=config.max_iter,
		methods=list(methods),
		rows=rows,
	)
	if rows:
		report.stats = bench_stats(rows, methods)
	return report
