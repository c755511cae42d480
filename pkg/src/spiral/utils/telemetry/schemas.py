from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class TrajectoryRecord(BaseModel):
	"""One row of an exported orbit."""

	iteration: int
	coords: List[float]
	branch: str
	shadow: Optional[List[float]] = None


class SweepReport(BaseModel):
	"""Outcome of running one Lyapunov checker over random sample points."""

	instance: str
	checker: str
	samples: int
	seed: int
	tolerance: float
	checked: int = 0
	skipped: int = Field(
		default=0, description="Samples where the checked identity is undefined (colinear triple, probe at center, ...)"
	)
	failures: int = 0
	max_residual: float = 0.0
	passed: bool = True


class SolveRecord(BaseModel):
	"""Outcome of a single basis pursuit solve with one acceleration arm."""

	method: str
	iterations: int
	max_iter: int = Field(description="Pass cap this run was held to")
	objective: float
	solved: bool
	primal_residual: float
	accel_attempts: int = 0
	accel_accepted: int = 0
	colinear_skips: int = 0
	objective_evaluations: int = 0


class SolveReport(BaseModel):
	seed: int
	n: int
	nu: int
	c: float
	nonzeros: Optional[int] = None
	tol: float
	runs: List[SolveRecord] = []


class BenchInstanceRow(BaseModel):
	"""Per-instance results of a benchmark, keyed by seed."""

	seed: int
	iterations: Dict[str, int]
	solved: Dict[str, bool]
	winners: List[str]


class BenchStats(BaseModel):
	"""Iteration statistics of one method over a batch of instances."""

	method: str
	wins: float = Field(default=0.0, description="Fractional when several methods tie on one instance")
	solved_count: int = 0
	instances: int = 0
	min: float
	q1: float
	median: float
	q3: float
	max: float


class BenchReport(BaseModel):
	n: int
	nu: int
	c: float
	nonzeros: Optional[int] = Field(default=None, description="Nonzeros of x_true; None means ceil(n / 10)")
	instances: int
	seed_base: int
	tol: float
	max_iter: int
	methods: List[str]
	stats: List[BenchStats] = []
	rows: List[BenchInstanceRow] = []
