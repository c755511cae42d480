"""
Basis pursuit, ``minimize ||x||_1 subject to A x = b``, by ADMM with
optional dual acceleration.

The splitting is ``f = iota_S`` with ``S = {x | A x = b}`` and
``g = ||.||_1``, so ``x = P_S(z - lam / c)``, ``z = Shrinkage_{1/c}(x + lam / c)``
and ``prox_{c d2}`` is the projection onto the unit infinity ball.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field

from spiral.errors import ColinearSkip, InvalidProblem, IterationCapExceeded
from spiral.geometry import DEFAULT_EPS_COL, Point
from spiral.operators.maps import dr_apply
from spiral.operators.prox import AffineSupportConjugate, SupportConjugateBox, shrinkage
from spiral.operators.sets import AffineSystem
from spiral.settings.extract_settings import APP_SETTINGS
from spiral.splitting.admm import (
	AccelDecision,
	AccelReason,
	AdmmProblem,
	AdmmState,
	DualPoint,
	accel_accept,
	admm_step,
	ct_dual_step,
	ct_install,
	lt_dual_step,
	reconstruct_dual,
)
from spiral.utils.telemetry.schemas import SolveRecord

logger = logging.getLogger(__name__)


class Accel(str, Enum):
	NONE = "none"
	LT = "lt"
	CT = "ct"


class SolverConfig(BaseModel):
	"""Knobs of ``bp_solve``.

	Attributes:
	    tol: Relative tolerance of the stopping rule.
	    max_iter: Cap on ADMM passes.
	    accel_every: Passes between two acceleration attempts.
	    eps_col: Colinearity threshold used by the accelerators.
	    raise_on_cap: If True, raise IterationCapExceeded at the cap; otherwise report ``solved=False``.
	"""

	tol: float = Field(default=APP_SETTINGS["solver"]["tol"], gt=0, description="Stopping rule tolerance")
	max_iter: int = Field(default=APP_SETTINGS["solver"]["max_iter"], ge=1, description="Cap on ADMM passes")
	accel_every: int = Field(
		default=APP_SETTINGS["solver"]["accel_every"], ge=2, description="Passes between acceleration attempts"
	)
	eps_col: float = Field(default=DEFAULT_EPS_COL, gt=0, description="Colinearity threshold")
	raise_on_cap: bool = Field(
		default=False,
		description="If True, raise at the iteration cap; otherwise return an unsolved result",
	)


class BasisPursuitInstance:
	"""An (A, b, c) triple with ``nu < n`` and A of full row rank."""

	def __init__(self, A: npt.ArrayLike, b: npt.ArrayLike, c: float = 1.0, seed: Optional[int] = None):
		self.affine = AffineSystem(A, b)
		nu, n = self.affine.A.shape
		if not nu < n:
			raise InvalidProblem(f"basis pursuit needs nu < n, got nu={nu}, n={n}")
		if not c > 0:
			raise InvalidProblem(f"penalty c must be positive, got {c}")
		self.c = float(c)
		self.seed = seed

	@property
	def A(self) -> npt.NDArray[np.float64]:
		return self.affine.A

	@property
	def b(self) -> npt.NDArray[np.float64]:
		return self.affine.b

	@property
	def n(self) -> int:
		return self.affine.A.shape[1]

	@property
	def nu(self) -> int:
		return self.affine.A.shape[0]

	def x_update(self, z: Point, lam: Point, c: float) -> Point:
		return self.affine.project(z - lam / c)

	def z_update(self, x: Point, lam: Point, c: float) -> Point:
		return shrinkage(x + lam / c, 1.0 / c)

	@staticmethod
	def objective(x: Point) -> float:
		return float(np.abs(x).sum())

	def problem(self) -> AdmmProblem:
		return AdmmProblem(
			x_update=self.x_update,
			z_update=self.z_update,
			objective=self.objective,
			d2_prox=SupportConjugateBox(self.n),
			n=self.n,
			c=self.c,
			d1_prox=AffineSupportConjugate(self.affine, self.c),
		)

	def __repr__(self) -> str:
		return f"BasisPursuitInstance(nu={self.nu}, n={self.n}, c={self.c}, seed={self.seed})"


def dual_dr_operator(inst: BasisPursuitInstance) -> Callable[[Point], Point]:
	"""y -> T y for the dual DR operator, built only from the two dual proxes."""
	d2 = SupportConjugateBox(inst.n)
	d1 = AffineSupportConjugate(inst.affine, inst.c)

	def T(y: Point) -> Point:
		return dr_apply(d2, d1, y)

	return T


@dataclass
class SolveResult:
	method: Accel
	iterations: int
	max_iter: int
	x: Point
	z: Point
	lam: Point
	objective: float
	solved: bool
	primal_residual: float
	accel_attempts: int = 0
	accel_accepted: int = 0
	colinear_skips: int = 0
	objective_evaluations: int = 0
	decisions: List[AccelDecision] = field(default_factory=list)

	def to_record(self) -> SolveRecord:
		return SolveRecord(
			method=self.method.value,
			iterations=self.iterations,
			max_iter=self.max_iter,
			objective=self.objective,
			solved=self.solved,
			primal_residual=self.primal_residual,
			accel_attempts=self.accel_attempts,
			accel_accepted=self.accel_accepted,
			colinear_skips=self.colinear_skips,
			objective_evaluations=self.objective_evaluations,
		)


def _converged(s: AdmmState, z_prev: Point, tol: float, sqrt_n: float) -> bool:
	primal_gap = float(np.linalg.norm(s.z - s.x))
	if not primal_gap < tol * (sqrt_n + max(float(np.linalg.norm(s.x)), float(np.linalg.norm(s.z)))):
		return False
	return float(np.linalg.norm(s.z - z_prev)) < tol * (sqrt_n + float(np.linalg.norm(s.lam)))


def bp_solve(
	inst: BasisPursuitInstance,
	accel: Accel = Accel.NONE,
	config: Optional[SolverConfig] = None,
) -> SolveResult:
	"""Runs ADMM on ``inst`` from x = z = lam = 0.

	With ``accel="lt"`` the last three dual iterates are fed to L_T once
	``accel_every`` passes have run since the previous attempt, and the
	candidate is kept only if its x-update has no larger l1 norm than the
	regular one. With ``accel="ct"`` the reflected-prox circumcenter of the
	current dual point replaces it at the same cadence, with no objective
	check. Every attempt is logged as an ``AccelDecision``.

	Raises:
		IterationCapExceeded: If ``config.raise_on_cap`` is set and the stopping
		    rule has not fired after ``config.max_iter`` passes.
	"""
	accel = Accel(accel)
	config = config or SolverConfig()
	prob = inst.problem()
	c = prob.c
	sqrt_n = float(np.sqrt(inst.n))

	s = AdmmState.zeros(inst.n)
	window: deque = deque([DualPoint.from_state(s, c).y], maxlen=3)
	decisions: List[AccelDecision] = []
	pending_x: Optional[Point] = None
	since_attempt = 0
	solved = False
	passes = 0

	while passes < config.max_iter:
		x_next = pending_x if pending_x is not None else prob.x_update(s.z, s.lam, c)
		pending_x = None

		if accel is Accel.CT and since_attempt >= config.accel_every:
			since_attempt = 0
			y, r2, r12 = reconstruct_dual(s, x_next, c)
			try:
				candidate = ct_dual_step(prob, y, r2, r12, config.eps_col)
			except ColinearSkip:
				decisions.append(AccelDecision.colinear_skip())
			else:
				decision, s, x_next = ct_install(prob, s, candidate, x_next)
				decisions.append(decision)

		nxt = admm_step(prob, s, x_next)
		passes += 1
		since_attempt += 1
		if _converged(nxt, s.z, config.tol, sqrt_n):
			s = nxt
			solved = True
			break
		s = nxt

		if accel is Accel.LT:
			window.append(DualPoint.from_state(s, c).y)
			if since_attempt >= config.accel_every and len(window) == 3:
				since_attempt = 0
				try:
					candidate = lt_dual_step(prob, tuple(window), config.eps_col)
				except ColinearSkip:
					decisions.append(AccelDecision.colinear_skip())
				else:
					decision, s, pending_x = accel_accept(prob, s, candidate)
					decisions.append(decision)
				window.clear()
				window.append(DualPoint.from_state(s, c).y)

	skips = sum(d.reason is AccelReason.COLINEAR_SKIP for d in decisions)
	accepted = sum(d.accepted for d in decisions)
	result = SolveResult(
		method=accel,
		iterations=passes,
		max_iter=config.max_iter,
		x=s.x,
		z=s.z,
		lam=s.lam,
		objective=inst.objective(s.x),
		solved=solved,
		primal_residual=float(np.linalg.norm(inst.affine.residual(s.x))),
		accel_attempts=len(decisions),
		accel_accepted=accepted,
		colinear_skips=skips,
		objective_evaluations=2 * (len(decisions) - skips),
		decisions=decisions,
	)
	logger.debug(
		f"bp_solve[{accel.value}] {'solved' if solved else 'capped'} after {passes} passes, "
		f"objective {result.objective:.6g}, {accepted}/{len(decisions)} accelerations kept"
	)
	if not solved and config.raise_on_cap:
		raise IterationCapExceeded(f"{accel.value} arm did not meet the stopping rule in {passes} passes", passes)
	return result
