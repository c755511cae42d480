"""
Batch statistics: per-instance winners and iteration quantiles per method.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from spiral.utils.telemetry.schemas import BenchInstanceRow, BenchStats

QUANTILE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def quantiles(values: Sequence[float]) -> Tuple[float, float, float, float, float]:
	"""(min, Q1, median, Q3, max) with linear interpolation between order statistics."""
	if len(values) == 0:
		raise ValueError("quantiles of an empty batch")
	q = np.quantile(np.asarray(values, dtype=np.float64), QUANTILE_LEVELS, method="linear")
	return tuple(float(v) for v in q)


def winners(iterations: Dict[str, int], solved: Dict[str, bool]) -> List[str]:
	"""Methods with the fewest passes among those that solved; unsolved runs lose to solved ones."""
	keys = {m: (not solved[m], iterations[m]) for m in iterations}
	best = min(keys.values())
	return sorted(m for m, key in keys.items() if key == best)


def bench_stats(rows: Sequence[BenchInstanceRow], methods: Sequence[str]) -> List[BenchStats]:
	"""Aggregates rows into one ``BenchStats`` per method; a k-way tie credits 1/k win each."""
	wins = {m: 0.0 for m in methods}
	for row in rows:
		for m in row.winners:
			wins[m] += 1.0 / len(row.winners)
	stats = []
	for m in methods:
		lo, q1, median, q3, hi = quantiles([row.iterations[m] for row in rows])
		stats.append(
			BenchStats(
				method=m,
				wins=wins[m],
				solved_count=sum(1 for row in rows if row.solved[m]),
				instances=len(rows),
				min=lo,
				q1=q1,
				median=median,
				q3=q3,
				max=hi,
			)
		)
	return stats
