"""
Lyapunov gradient oracles for graph feasibility problems and numerical
checkers for the geometric identities they satisfy.

The instances are ``A = R x {0}`` and ``B = gra f`` in R^2 with
``V(y, rho) = F(y) + rho^2 / 2`` and ``F' = f / f'``. Only differentiable
``f`` is supported, so every subdifferential selection is unique.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy import integrate

from spiral.errors import (
	ColinearError,
	DegenerateGradient,
	FixedPointError,
	SingularGradient,
)
from spiral.geometry import (
	DEFAULT_EPS_COL,
	Point,
	as_point,
	project_affine_hull,
)
from spiral.operators.maps import (
	Branch,
	IterateWindow,
	Oracle,
	crm_apply,
	dr_apply,
	lt_from_window,
	reflect,
	resolvent,
)
from spiral.utils.telemetry.schemas import SweepReport

if TYPE_CHECKING:
	from spiral.problems import GraphInstance

logger = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]


class GraphLyapunov:
	"""V(y, rho) = F(y) + rho^2 / 2 for the pair (R x {0}, gra f).

	Args:
		f: The scalar function whose graph is B.
		f_prime: Its derivative.
		domain: Interval on which ``f / f'`` is increasing.
		anchor: Lower limit of the quadrature defining F; a zero of f.
		ratio: Optional exact expression of ``f / f'``.
	"""

	def __init__(
		self,
		f: ScalarFn,
		f_prime: ScalarFn,
		domain: Tuple[float, float],
		anchor: float = 0.0,
		ratio: Optional[ScalarFn] = None,
		name: str = "f",
	):
		self.f = f
		self.f_prime = f_prime
		self.domain = (float(domain[0]), float(domain[1]))
		self.anchor = float(anchor)
		self.ratio = ratio
		self.name = name

	@classmethod
	def linear(cls, slope: float) -> "GraphLyapunov":
		"""f(y) = slope * y; then f / f' is the identity and V = ||.||^2 / 2."""
		return cls(
			f=lambda y: slope * y,
			f_prime=lambda y: slope,
			domain=(-np.inf, np.inf),
			anchor=0.0,
			ratio=lambda y: y,
			name=f"linear({slope})",
		)

	def __repr__(self) -> str:
		return f"GraphLyapunov({self.name}, domain={self.domain})"


class CheckReport(BaseModel):
	residual: float
	tolerance: float
	passed: bool

	@classmethod
	def from_residual(cls, residual: float, tolerance: float) -> "CheckReport":
		return cls(residual=residual, tolerance=tolerance, passed=bool(residual <= tolerance))


class BisectorCase(str, Enum):
	T_AB = "T_AB"
	P_A = "P_A"
	P_B = "P_B"
	T_BA = "T_BA"


def grad_v(L: GraphLyapunov, p: Point) -> Point:
	"""(f(y) / f'(y), rho), with (0, rho) wherever f(y) = 0.

	Raises:
		SingularGradient: If ``f'(y) = 0`` while ``f(y) != 0``.
	"""
	y, rho = float(p[0]), float(p[1])
	if L.ratio is not None:
		return np.array([L.ratio(y), rho])
	fy = L.f(y)
	if fy == 0.0:
		return np.array([0.0, rho])
	fp = L.f_prime(y)
	if fp == 0.0:
		raise SingularGradient(f"f'({y}) = 0 while f({y}) = {fy}")
	return np.array([fy / fp, rho])


def lyapunov_value(L: GraphLyapunov, p: Point) -> float:
	"""V(y, rho) with F integrated numerically from ``L.anchor``."""
	y, rho = float(p[0]), float(p[1])
	if L.ratio is not None:
		integrand = L.ratio
	else:

		def integrand(t: float) -> float:
			return grad_v(L, np.array([t, 0.0]))[0]

	F, _ = integrate.quad(integrand, L.anchor, y, epsabs=1e-13, epsrel=1e-13)
	return float(F) + 0.5 * rho * rho


def _normalized_inner(g: Point, u: Point) -> float:
	return abs(float(g @ u)) / ((1.0 + float(np.linalg.norm(g))) * (1.0 + float(np.linalg.norm(u))))


def _membership_residual(q: Point, y: Point, z: Point) -> float:
	normal = y - z
	norm = float(np.linalg.norm(normal))
	if norm == 0.0:
		return 0.0
	return abs(float((q - (y + z) / 2) @ normal)) / (norm * (1.0 + float(np.linalg.norm(q))))


def check_spiraling(L: GraphLyapunov, a: Oracle, b: Oracle, p: Point, tol: float = 1e-8) -> CheckReport:
	"""<grad V(Tp), p - Tp> = 0 for the Douglas-Rachford step T = T_{A,B}."""
	x_plus = dr_apply(a, b, p)
	return CheckReport.from_residual(_normalized_inner(grad_v(L, x_plus), p - x_plus), tol)


def bisector_probe(a: Oracle, b: Oracle, p: Point, which: BisectorCase) -> Tuple[Point, Point]:
	"""The point q and the second anchor z such that q should lie on H(p, z)."""
	if which is BisectorCase.T_AB:
		z = reflect(b, reflect(a, p))
	elif which is BisectorCase.P_A:
		z = reflect(a, p)
	elif which is BisectorCase.P_B:
		z = reflect(b, p)
	else:
		z = reflect(a, reflect(b, p))
	if which is BisectorCase.P_A:
		q = resolvent(a, p)
	elif which is BisectorCase.P_B:
		q = resolvent(b, p)
	else:
		q = 0.5 * (p + z)
	return q, z


def check_bisector_theorem(
	L: GraphLyapunov,
	a: Oracle,
	b: Oracle,
	p: Point,
	which: BisectorCase,
	tol: float = 1e-8,
) -> CheckReport:
	"""The ray q + R grad V(q) stays in the bisector H(p, z).

	The residual is the larger of the normalised ``|<grad V(q), p - z>|`` and
	the normalised distance of ``q`` itself from H(p, z).
	"""
	which = BisectorCase(which)
	q, z = bisector_probe(a, b, p, which)
	residual = max(_normalized_inner(grad_v(L, q), p - z), _membership_residual(q, p, z))
	return CheckReport.from_residual(residual, tol)


def check_mss_parallelism(
	L: GraphLyapunov,
	triple: Sequence[Point],
	candidate_center: Point,
	probe: Point,
	tol: float = 1e-8,
) -> CheckReport:
	"""Direction-projected grad V(probe) is parallel to grad Q(probe) = 2(probe - center).

	Raises:
		DegenerateGradient: If the probe sits on the center.
	"""
	g = 2.0 * (probe - candidate_center)
	g_sq = float(g @ g)
	if np.sqrt(g_sq) <= 1e-12 * (1.0 + float(np.linalg.norm(probe))):
		raise DegenerateGradient("probe coincides with the surrogate center")
	w = project_affine_hull(grad_v(L, probe), list(triple))
	rejection = w - (float(w @ g) / g_sq) * g
	return CheckReport.from_residual(float(np.linalg.norm(rejection)) / (1.0 + float(np.linalg.norm(w))), tol)


@dataclass(frozen=True)
class SurrogateFit:
	"""A circumcenter-defined surrogate: its triple, center and fit points."""

	triple: Tuple[Point, Point, Point]
	center: Point
	probes: Tuple[Point, ...]


def crm_surrogate_fit(a: Oracle, b: Oracle, p: Point, eps_col: float = DEFAULT_EPS_COL) -> SurrogateFit:
	"""C(x, R_A x, R_B R_A x) fitted at T_{A,B} x, P_A x and P_B R_A x.

	Raises:
		ColinearError: If the circumcenter branch does not fire at ``p``.
	"""
	outcome = crm_apply(a, b, p, eps_col)
	if outcome.branch is not Branch.CIRCUMCENTER:
		raise ColinearError(f"CRM took the {outcome.branch.value} branch")
	x, ra, rba = outcome.triple
	probes = (0.5 * (x + rba), resolvent(a, x), resolvent(b, ra))
	return SurrogateFit(triple=(x, rba, ra), center=outcome.point, probes=probes)


def lt_surrogate_fit(T: Callable[[Point], Point], p: Point, eps_col: float = DEFAULT_EPS_COL) -> SurrogateFit:
	"""C(x, 2x+ - x, pi_T x) fitted at x+ and x++."""
	x_plus = T(p)
	window = IterateWindow(p, x_plus, T(x_plus))
	outcome = lt_from_window(window, eps_col)
	if outcome.branch is not Branch.CIRCUMCENTER:
		raise ColinearError(f"L_T took the {outcome.branch.value} branch")
	return SurrogateFit(triple=outcome.triple, center=outcome.point, probes=(window.x_plus, window.x_plus_plus))


def check_gradient_descent_form(
	L: GraphLyapunov, a: Oracle, b: Oracle, p: Point, tol: float = 1e-8, eps_col: float = DEFAULT_EPS_COL
) -> CheckReport:
	"""In R^2, C(x, R_A x, R_B R_A x) - q is parallel to grad V(q).

	Checked at q in {T_{A,B} x, P_A x, P_B R_A x}; the residual is the largest
	normalised cross product.
	"""
	fit = crm_surrogate_fit(a, b, p, eps_col)
	residual = 0.0
	for q in fit.probes:
		step = fit.center - q
		g = grad_v(L, q)
		cross = abs(float(step[0] * g[1] - step[1] * g[0]))
		residual = max(residual, cross / ((1.0 + float(np.linalg.norm(step))) * (1.0 + float(np.linalg.norm(g)))))
	return CheckReport.from_residual(residual, tol)


@dataclass(frozen=True)
class NewtonReport:
	newton_step: float
	gradient_step: Point
	residual: float


def newton_equivalence(L: GraphLyapunov, y: float) -> NewtonReport:
	"""Compares the Newton-Raphson step on f with the gradient step (y, 0) - grad V(y, 0)."""
	fp = L.f_prime(y)
	if fp == 0.0:
		raise SingularGradient(f"f'({y}) = 0")
	newton_step = y - L.f(y) / fp
	gradient_step = np.array([y, 0.0]) - grad_v(L, np.array([y, 0.0]))
	residual = abs(newton_step - float(gradient_step[0])) + abs(float(gradient_step[1]))
	return NewtonReport(newton_step=newton_step, gradient_step=gradient_step, residual=residual)


CHECKERS = ("spiraling", "bisectors", "mss", "gradient", "newton")

_DEGENERATE = (ColinearError, DegenerateGradient, FixedPointError, SingularGradient)


def _sample_residual(instance: "GraphInstance", checker: str, p: Point, tol: float) -> Optional[float]:
	"""Worst residual of ``checker`` at ``p``; None when nothing could be checked."""
	L, a, b = instance.lyapunov, instance.a, instance.b
	if checker == "spiraling":
		return check_spiraling(L, a, b, p, tol).residual
	if checker == "bisectors":
		return max(check_bisector_theorem(L, a, b, p, case, tol).residual for case in BisectorCase)
	if checker == "gradient":
		return check_gradient_descent_form(L, a, b, p, tol).residual
	if checker == "newton":
		return newton_equivalence(L, float(p[0])).residual
	if checker == "mss":
		residuals: List[float] = []

		def dr(x: Point) -> Point:
			return dr_apply(a, b, x)

		for build in (lambda: crm_surrogate_fit(a, b, p), lambda: lt_surrogate_fit(dr, p)):
			try:
				fit = build()
			except _DEGENERATE:
				continue
			for probe in fit.probes:
				try:
					residuals.append(check_mss_parallelism(L, fit.triple, fit.center, probe, tol).residual)
				except _DEGENERATE:
					continue
		return max(residuals) if residuals else None
	raise ValueError(f"unknown checker {checker!r}; expected one of {CHECKERS}")


def sweep(
	instance: "GraphInstance",
	checker: str,
	samples: int,
	seed: int = 0,
	tol: float = 1e-8,
) -> SweepReport:
	"""Runs ``checker`` at ``samples`` points drawn uniformly from the instance box."""
	if checker not in CHECKERS:
		raise ValueError(f"unknown checker {checker!r}; expected one of {CHECKERS}")
	if samples < 0:
		raise ValueError("samples must be nonnegative")
	rng = np.random.default_rng(seed)
	report = SweepReport(instance=instance.name, checker=checker, samples=samples, seed=seed, tolerance=tol)
	for p in instance.sample(rng, samples):
		try:
			residual = _sample_residual(instance, checker, as_point(p), tol)
		except _DEGENERATE as e:
			logger.debug(f"Skipping sample {p}: {type(e).__name__}")
			residual = None
		if residual is None:
			report.skipped += 1
			continue
		report.checked += 1
		report.max_residual = max(report.max_residual, residual)
		if not residual <= tol:
			report.failures += 1
	report.passed = report.failures == 0
	logger.info(
		f"{checker} on {instance.name}: {report.checked} checked, {report.skipped} skipped, "
		f"max residual {report.max_residual:.3e}"
	)
	return report

