"""
ADMM with M = Id and the Douglas-Rachford structure of its dual.

With ``y_k = lam_k + c z_k`` the multipliers are the shadow
``lam_k = prox_{c d2}(y_k)`` of a dual DR sequence, and one ADMM pass is one
DR step on ``y``. The dual accelerators below work on those reconstructed
points and hand their candidate back to the primal side, either through the
objective check of ``accel_accept`` or unconditionally through ``ct_install``.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from spiral.errors import ColinearError, ColinearSkip, DimensionMismatch, InvalidProblem
from spiral.geometry import DEFAULT_EPS_COL, Point, circumcenter, colinearity_test
from spiral.operators.maps import Branch, IterateWindow, lt_from_window
from spiral.operators.prox import ProxOracle

logger = logging.getLogger(__name__)

PrimalUpdate = Callable[[Point, Point, float], Point]


@dataclass(frozen=True)
class AdmmProblem:
	"""minimize f(x) + g(z) subject to x = z.

	Args:
		x_update: ``(z, lam, c) -> argmin_x f(x) + <lam, x> + c/2 ||x - z||^2``.
		z_update: ``(x, lam, c) -> argmin_z g(z) - <lam, z> + c/2 ||x - z||^2``.
		objective: The primal objective used to compare accelerated candidates.
		d2_prox: ``prox_{c d2}`` with ``d2 = g*``; maps ``y`` to its multiplier.
		n: Dimension of x, z and lam.
		c: Penalty parameter.
		d1_prox: ``prox_{c d1}``, only needed to iterate the dual independently.
	"""

	x_update: PrimalUpdate
	z_update: PrimalUpdate
	objective: Callable[[Point], float]
	d2_prox: ProxOracle
	n: int
	c: float
	d1_prox: Optional[ProxOracle] = None

	def __post_init__(self):
		if not self.c > 0:
			raise InvalidProblem(f"penalty c must be positive, got {self.c}")
		if self.n < 1:
			raise InvalidProblem(f"dimension must be positive, got {self.n}")


@dataclass(frozen=True)
class AdmmState:
	x: Point
	z: Point
	lam: Point
	k: int = 0

	@classmethod
	def zeros(cls, n: int) -> "AdmmState":
		return cls(x=np.zeros(n), z=np.zeros(n), lam=np.zeros(n), k=0)


@dataclass(frozen=True)
class DualPoint:
	"""The governing dual DR iterate ``y = lam + c z``."""

	y: Point

	@classmethod
	def from_state(cls, s: AdmmState, c: float) -> "DualPoint":
		return cls(s.lam + c * s.z)


class AccelReason(str, Enum):
	OBJECTIVE_IMPROVED = "objective_improved"
	INSTALLED = "installed"
	COLINEAR_SKIP = "colinear_skip"
	REJECTED = "rejected"


@dataclass(frozen=True)
class AccelDecision:
	"""Outcome of one acceleration attempt.

	Objectives are None when the attempt was skipped before a candidate existed.
	"""

	candidate_objective: Optional[float]
	regular_objective: Optional[float]
	accepted: bool
	reason: AccelReason

	@classmethod
	def colinear_skip(cls) -> "AccelDecision":
		return cls(None, None, False, AccelReason.COLINEAR_SKIP)


def admm_step(prob: AdmmProblem, s: AdmmState, x_next: Optional[Point] = None) -> AdmmState:
	"""One pass through the x-, z- and multiplier updates.

	``x_next`` may carry an x-update that was already computed for state
	``s`` (for instance by an acceleration attempt).
	"""
	c = prob.c
	x = prob.x_update(s.z, s.lam, c) if x_next is None else x_next
	z = prob.z_update(x, s.lam, c)
	lam = s.lam + c * (x - z)
	return AdmmState(x=x, z=z, lam=lam, k=s.k + 1)


def run_admm(prob: AdmmProblem, state: AdmmState, steps: int) -> List[AdmmState]:
	"""``state`` followed by ``steps`` plain ADMM passes."""
	states = [state]
	for _ in range(steps):
		states.append(admm_step(prob, states[-1]))
	return states


def reconstruct_dual(s: AdmmState, x_next: Point, c: float) -> Tuple[DualPoint, Point, Point]:
	"""(y_k, R_{cd2} y_k, R_{cd1} R_{cd2} y_k) from the primal state k and x_{k+1}."""
	r2 = s.lam - c * s.z
	return DualPoint.from_state(s, c), r2, r2 + 2.0 * c * x_next


def _check_dual(prob: AdmmProblem, points: Sequence[Point]) -> None:
	for p in points:
		if p.shape != (prob.n,):
			raise DimensionMismatch(f"dual point of shape {p.shape}, expected ({prob.n},)")


def lt_dual_step(prob: AdmmProblem, window: Sequence[Point], eps_col: float = DEFAULT_EPS_COL) -> Point:
	"""L_T geometry on three successive dual iterates (y_k, y_{k+1}, y_{k+2}).

	Raises:
		ColinearSkip: If the L_T triple is colinear or the window has stalled.
	"""
	_check_dual(prob, window)
	y0, y1, y2 = window
	outcome = lt_from_window(IterateWindow(y0, y1, y2), eps_col)
	if outcome.branch is not Branch.CIRCUMCENTER:
		raise ColinearSkip(f"dual window took the {outcome.branch.value} branch")
	return outcome.point


def ct_dual_step(
	prob: AdmmProblem, y: DualPoint, r2: Point, r12: Point, eps_col: float = DEFAULT_EPS_COL
) -> Point:
	"""C(y_k, R_{cd2} y_k, R_{cd1} R_{cd2} y_k), the reflected-prox circumcenter.

	Raises:
		ColinearSkip: If the triple is colinear (including coincident points).
	"""
	_check_dual(prob, (y.y, r2, r12))
	if colinearity_test(y.y, r2, r12, eps_col).is_colinear:
		raise ColinearSkip("reflected-prox triple is colinear")
	try:
		return circumcenter(y.y, r2, r12, eps_col)
	except ColinearError as e:
		raise ColinearSkip(str(e)) from e


def _candidate(prob: AdmmProblem, candidate_y: Point) -> Tuple[Point, Point, Point]:
	"""(lam_c, z_c, x_c) for a dual candidate: ``lam_c = prox_{c d2}(y_c)``, ``z_c = (y_c - lam_c) / c``."""
	c = prob.c
	lam_c = prob.d2_prox.prox(candidate_y)
	z_c = (candidate_y - lam_c) / c
	return lam_c, z_c, prob.x_update(z_c, lam_c, c)


def accel_accept(
	prob: AdmmProblem,
	s: AdmmState,
	candidate_y: Point,
	x_regular: Optional[Point] = None,
) -> Tuple[AccelDecision, AdmmState, Point]:
	"""Compare the accelerated candidate with the regular update by objective.

	The candidate multiplier is ``lam_c = prox_{c d2}(y_c)`` with
	``z_c = (y_c - lam_c) / c`` and ``x_c`` its x-update. Ties accept.

	Returns:
		The decision, the state to continue from and the x-update to use for
		its next pass.
	"""
	if x_regular is None:
		x_regular = prob.x_update(s.z, s.lam, prob.c)
	lam_c, z_c, x_c = _candidate(prob, candidate_y)
	candidate_objective = float(prob.objective(x_c))
	regular_objective = float(prob.objective(x_regular))
	if candidate_objective <= regular_objective:
		decision = AccelDecision(candidate_objective, regular_objective, True, AccelReason.OBJECTIVE_IMPROVED)
		return decision, replace(s, z=z_c, lam=lam_c), x_c
	decision = AccelDecision(candidate_objective, regular_objective, False, AccelReason.REJECTED)
	return decision, s, x_regular


def ct_install(
	prob: AdmmProblem,
	s: AdmmState,
	candidate_y: Point,
	x_regular: Optional[Point] = None,
) -> Tuple[AccelDecision, AdmmState, Point]:
	"""Replace the dual iterate by ``candidate_y`` without an objective check.

	This is the plain C_T dual update. Both objectives are still reported in
	the decision.
	"""
	if x_regular is None:
		x_regular = prob.x_update(s.z, s.lam, prob.c)
	lam_c, z_c, x_c = _candidate(prob, candidate_y)
	decision = AccelDecision(
		float(prob.objective(x_c)), float(prob.objective(x_regular)), True, AccelReason.INSTALLED
	)
	return decision, replace(s, z=z_c, lam=lam_c), x_c
