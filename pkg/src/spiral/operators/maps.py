"""
Iteration maps built on top of the oracles.

Douglas-Rachford ``T_{A,B} = (R_B R_A + Id) / 2``, the circumcentered
reflection operator, the L_T operator with its auxiliary point ``pi_T`` and a
trajectory recorder shared by all of them.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from spiral.errors import ColinearError, FixedPointError, NonFiniteIterate
from spiral.geometry import (
	DEFAULT_EPS_COL,
	Point,
	as_point,
	circumcenter,
	colinearity_test,
	same_dimension,
)
from spiral.operators.prox import ProxOracle
from spiral.operators.sets import SetOracle
from spiral.settings.extract_settings import APP_SETTINGS

logger = logging.getLogger(__name__)

DEFAULT_TOL_FIX: float = float(APP_SETTINGS["numerics"]["tol_fix"])

Oracle = Union[SetOracle, ProxOracle]
Triple = Tuple[Point, Point, Point]


class Branch(str, Enum):
	START = "start"
	REGULAR = "regular"
	CIRCUMCENTER = "circumcenter"
	COLINEAR_FALLBACK = "colinear_fallback"
	FIXED_POINT_DETECTED = "fixed_point_detected"


@dataclass(frozen=True)
class IterateWindow:
	"""(x, x+, x++) from two successive applications of one operator."""

	x: Point
	x_plus: Point
	x_plus_plus: Point

	def __post_init__(self):
		same_dimension(self.x, self.x_plus, self.x_plus_plus)


@dataclass(frozen=True)
class StepOutcome:
	point: Point
	branch: Branch
	# defining triple, only set when the circumcenter branch fired
	triple: Optional[Triple] = None


def resolvent(oracle: Oracle, p: Point) -> Point:
	if isinstance(oracle, SetOracle):
		return oracle.project(p)
	return oracle.prox(p)


def project(s: SetOracle, p: Point) -> Point:
	return s.project(p)


def reflect(s: Oracle, p: Point) -> Point:
	"""``2 P_S p - p``, or the reflected resolvent ``2 prox p - p``."""
	return 2.0 * resolvent(s, p) - p


def shadow(a: Oracle, p: Point) -> Point:
	"""The shadow ``P_A p`` of a governing iterate."""
	return resolvent(a, p)


def dr_apply(a: Oracle, b: Oracle, p: Point) -> Point:
	return 0.5 * reflect(b, reflect(a, p)) + 0.5 * p


def _coincide(p: Point, q: Point, tol: float) -> bool:
	return float(np.linalg.norm(p - q)) <= tol * (1.0 + float(np.linalg.norm(p)))


def crm_apply(
	a: SetOracle,
	b: SetOracle,
	p: Point,
	eps_col: float = DEFAULT_EPS_COL,
	tol_fix: float = DEFAULT_TOL_FIX,
) -> StepOutcome:
	"""One step of the circumcentered reflection method.

	Returns C(p, R_A p, R_B R_A p). When R_B R_A p returns to p while R_A p
	does not, ``P_A p`` already solves the feasibility problem and the branch
	is ``fixed_point_detected``. A colinear (or coincident) triple falls back
	to the Douglas-Rachford step.
	"""
	ra = reflect(a, p)
	rba = reflect(b, ra)
	dr_value = 0.5 * rba + 0.5 * p
	if _coincide(p, rba, tol_fix) and not _coincide(p, ra, tol_fix):
		return StepOutcome(dr_value, Branch.FIXED_POINT_DETECTED)
	if colinearity_test(p, ra, rba, eps_col).is_colinear:
		return StepOutcome(dr_value, Branch.COLINEAR_FALLBACK)
	try:
		center = circumcenter(p, ra, rba, eps_col)
	except ColinearError:
		return StepOutcome(dr_value, Branch.COLINEAR_FALLBACK)
	return StepOutcome(center, Branch.CIRCUMCENTER, (p, ra, rba))


def pi_t(w: IterateWindow, tol_fix: float = DEFAULT_TOL_FIX) -> Point:
	"""``2 d + 2 <e, d> / ||d||^2 d + x`` with ``d = x++ - x+`` and ``e = x+ - x``.

	Raises:
		FixedPointError: If ``||d|| <= tol_fix * (1 + ||x+||)``.
	"""
	d = w.x_plus_plus - w.x_plus
	d_norm_sq = float(d @ d)
	if np.sqrt(d_norm_sq) <= tol_fix * (1.0 + float(np.linalg.norm(w.x_plus))):
		raise FixedPointError("x++ coincides with x+")
	e = w.x_plus - w.x
	return 2.0 * d + 2.0 * (float(e @ d) / d_norm_sq) * d + w.x


def lt_from_window(
	w: IterateWindow, eps_col: float = DEFAULT_EPS_COL, tol_fix: float = DEFAULT_TOL_FIX
) -> StepOutcome:
	"""C(x, 2x+ - x, pi_T x), or x+ when that triple is colinear."""
	try:
		pi = pi_t(w, tol_fix)
	except FixedPointError:
		return StepOutcome(w.x_plus, Branch.COLINEAR_FALLBACK)
	mirrored = 2.0 * w.x_plus - w.x
	if colinearity_test(w.x, mirrored, pi, eps_col).is_colinear:
		return StepOutcome(w.x_plus, Branch.COLINEAR_FALLBACK)
	try:
		center = circumcenter(w.x, mirrored, pi, eps_col)
	except ColinearError:
		return StepOutcome(w.x_plus, Branch.COLINEAR_FALLBACK)
	return StepOutcome(center, Branch.CIRCUMCENTER, (w.x, mirrored, pi))


def lt_apply(
	T: Callable[[Point], Point],
	p: Point,
	eps_col: float = DEFAULT_EPS_COL,
	tol_fix: float = DEFAULT_TOL_FIX,
) -> StepOutcome:
	x_plus = T(p)
	x_plus_plus = T(x_plus)
	return lt_from_window(IterateWindow(p, x_plus, x_plus_plus), eps_col, tol_fix)


def dr_step(a: Oracle, b: Oracle) -> Callable[[Point], Point]:
	def step(p: Point) -> Point:
		return dr_apply(a, b, p)

	return step


def crm_step(a: SetOracle, b: SetOracle, eps_col: float = DEFAULT_EPS_COL) -> Callable[[Point], StepOutcome]:
	def step(p: Point) -> StepOutcome:
		return crm_apply(a, b, p, eps_col)

	return step


def lt_step(T: Callable[[Point], Point], eps_col: float = DEFAULT_EPS_COL) -> Callable[[Point], StepOutcome]:
	def step(p: Point) -> StepOutcome:
		return lt_apply(T, p, eps_col)

	return step


@dataclass
class Trajectory:
	points: List[Point] = field(default_factory=list)
	branches: List[Branch] = field(default_factory=list)
	shadows: List[Point] = field(default_factory=list)
	converged: bool = False

	@property
	def steps(self) -> int:
		return len(self.points) - 1

	@property
	def last(self) -> Point:
		return self.points[-1]

	def branch_counts(self) -> dict:
		counts: dict = {}
		for branch in self.branches[1:]:
			counts[branch.value] = counts.get(branch.value, 0) + 1
		return counts


StopRule = Callable[[Point, Point], bool]


def iterate(
	T: Callable[[Point], Union[Point, StepOutcome]],
	p0: Point,
	max_iter: int,
	tol: float = 1e-10,
	stop: Optional[StopRule] = None,
	shadow_of: Optional[Callable[[Point], Point]] = None,
) -> Trajectory:
	"""Records the orbit of ``p0`` under ``T``.

	``T`` may return a plain point or a ``StepOutcome``. The orbit stops
	before appending ``x_{k+1}`` once ``stop(x_k, x_{k+1})`` holds (by default
	``||x_{k+1} - x_k|| <= tol``) and is then marked converged.

	Raises:
		NonFiniteIterate: If an iterate has NaN or infinite coordinates.
	"""
	if max_iter < 1:
		raise ValueError(f"max_iter must be at least 1, got {max_iter}")
	if stop is None:

		def stop(current: Point, nxt: Point) -> bool:
			return float(np.linalg.norm(nxt - current)) <= tol

	current = as_point(p0)
	traj = Trajectory(points=[current], branches=[Branch.START])
	if shadow_of is not None:
		traj.shadows.append(shadow_of(current))

	for k in range(max_iter):
		result = T(current)
		if isinstance(result, StepOutcome):
			nxt, branch = result.point, result.branch
		else:
			nxt, branch = result, Branch.REGULAR
		if not np.all(np.isfinite(nxt)):
			raise NonFiniteIterate(f"iterate {k + 1} left the finite range")
		if stop(current, nxt):
			traj.converged = True
			break
		traj.points.append(nxt)
		traj.branches.append(branch)
		if shadow_of is not None:
			traj.shadows.append(shadow_of(nxt))
		current = nxt

	logger.debug(f"Orbit finished after {traj.steps} steps (converged={traj.converged}): {traj.branch_counts()}")
	return traj
