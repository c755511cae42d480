"""
Projectable sets.

Every ``SetOracle`` is immutable after construction. Cached factorisations
(``AffineSystem``) are computed once and shared freely between threads.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy import linalg, optimize

from spiral.errors import DimensionMismatch, InvalidProblem, SphereCenterAmbiguity
from spiral.geometry import Point, as_point

logger = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]


class SetOracle(ABC):
	"""A closed set S of R^d together with a (selector of the) projection P_S."""

	dim: Optional[int] = None

	@abstractmethod
	def _project(self, p: Point) -> Point:
		pass

	def project(self, p: Point) -> Point:
		if self.dim is not None and p.shape[0] != self.dim:
			raise DimensionMismatch(
				f"{type(self).__name__} lives in R^{self.dim}, got a point of R^{p.shape[0]}"
			)
		return self._project(p)

	def reflect(self, p: Point) -> Point:
		return 2.0 * self.project(p) - p

	def distance(self, p: Point) -> float:
		return float(np.linalg.norm(self.project(p) - p))

	def contains(self, p: Point, tol: float = 1e-10) -> bool:
		"""Membership up to ``tol`` relative to ``1 + ||p||``."""
		return self.distance(p) <= tol * (1.0 + float(np.linalg.norm(p)))


class Hyperplane(SetOracle):
	"""{x | <normal, x> = offset}."""

	def __init__(self, normal: npt.ArrayLike, offset: float = 0.0):
		self.normal = as_point(normal)
		self.offset = float(offset)
		self._norm_sq = float(self.normal @ self.normal)
		if self._norm_sq == 0.0:
			raise InvalidProblem("hyperplane normal must be nonzero")
		self.dim = self.normal.shape[0]

	def _project(self, p: Point) -> Point:
		return p - ((self.normal @ p - self.offset) / self._norm_sq) * self.normal

	def __repr__(self) -> str:
		return f"Hyperplane(normal={self.normal.tolist()}, offset={self.offset})"


class LineAtAngle(SetOracle):
	"""The line through the origin of R^2 with direction (cos theta, sin theta).

	Its slope is tan(theta), so with the x-axis as the other set the angle
	between the two lines is theta.
	"""

	dim = 2

	def __init__(self, theta: float):
		self.theta = float(theta)
		self.direction = np.array([np.cos(self.theta), np.sin(self.theta)])

	def _project(self, p: Point) -> Point:
		return (self.direction @ p) * self.direction

	def __repr__(self) -> str:
		return f"LineAtAngle(theta={self.theta})"


class AffineSystem(SetOracle):
	"""S = {x | A x = b} for a full row rank ``A`` of shape (nu, n).

	The Cholesky factor of ``A A^T`` is computed once; projections reuse it
	through ``x = v - A^T (A A^T)^{-1} (A v - b)``.
	"""

	def __init__(self, A: npt.ArrayLike, b: npt.ArrayLike):
		A = np.atleast_2d(np.asarray(A, dtype=np.float64))
		b = np.atleast_1d(np.asarray(b, dtype=np.float64))
		nu, n = A.shape
		if b.shape != (nu,):
			raise DimensionMismatch(f"b has shape {b.shape}, expected ({nu},)")
		if nu > n:
			raise InvalidProblem(f"A has more rows than columns ({nu} > {n})")
		if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
			raise InvalidProblem("A and b must be finite")
		if np.linalg.matrix_rank(A) < nu:
			raise InvalidProblem("A must have full row rank")
		try:
			self._gram_factor = linalg.cho_factor(A @ A.T)
		except linalg.LinAlgError as e:
			raise InvalidProblem(f"A A^T is not positive definite: {e}") from e
		self.A = A
		self.b = b
		self.dim = n

	def residual(self, x: Point) -> Point:
		return self.A @ x - self.b

	def _project(self, p: Point) -> Point:
		correction = linalg.cho_solve(self._gram_factor, self.residual(p), check_finite=False)
		return p - self.A.T @ correction

	def __repr__(self) -> str:
		return f"AffineSystem(nu={self.A.shape[0]}, n={self.A.shape[1]})"


def line_through(direction: npt.ArrayLike, point: Optional[npt.ArrayLike] = None) -> AffineSystem:
	"""The line ``point + R * direction`` in R^d written as an affine system.

	The rows of the system span the orthogonal complement of ``direction``.
	"""
	direction = as_point(direction)
	if not np.any(direction):
		raise InvalidProblem("line direction must be nonzero")
	anchor = np.zeros_like(direction) if point is None else as_point(point)
	if anchor.shape != direction.shape:
		raise DimensionMismatch("line anchor and direction differ in dimension")
	rows = linalg.null_space(direction[np.newaxis, :]).T
	return AffineSystem(rows, rows @ anchor)


class Sphere(SetOracle):
	"""{x | ||x - center|| = radius}.

	At the center every point of the sphere is nearest; the selector returns
	``center + radius * e_1`` unless ``strict`` is set, in which case
	SphereCenterAmbiguity is raised.
	"""

	def __init__(self, center: npt.ArrayLike, radius: float = 1.0, strict: bool = False):
		self.center = as_point(center)
		self.radius = float(radius)
		if not self.radius > 0:
			raise InvalidProblem(f"sphere radius must be positive, got {radius}")
		self.strict = strict
		self.dim = self.center.shape[0]

	def _project(self, p: Point) -> Point:
		offset = p - self.center
		norm = float(np.linalg.norm(offset))
		if norm == 0.0:
			if self.strict:
				raise SphereCenterAmbiguity(f"{p!r} is the center of the sphere")
			selected = np.zeros_like(p)
			selected[0] = self.radius
			return self.center + selected
		return self.center + (self.radius / norm) * offset

	def __repr__(self) -> str:
		return f"Sphere(center={self.center.tolist()}, radius={self.radius})"


class InfBall(SetOracle):
	"""The closed infinity-norm ball of the given radius around 0."""

	def __init__(self, dim: Optional[int] = None, radius: float = 1.0):
		self.dim = dim
		self.radius = float(radius)
		if not self.radius > 0:
			raise InvalidProblem(f"ball radius must be positive, got {radius}")

	def _project(self, p: Point) -> Point:
		return np.clip(p, -self.radius, self.radius)

	def __repr__(self) -> str:
		return f"InfBall(dim={self.dim}, radius={self.radius})"


class FunctionGraph(SetOracle):
	"""B = gra f = {(y, f(y)) | y in bracket} in R^2.

	The nearest point to ``v`` minimises ``phi(y) = (y - v0)^2 + (f(y) - v1)^2``
	over ``bracket``. A grid scan picks the first grid minimum; the stationary
	point of ``phi`` next to it is then located by Brent's root finder on
	``phi'`` (bounded golden-section search when ``phi'`` has no sign change),
	and refined by a few Newton steps when ``f_second`` is given.
	"""

	dim = 2

	def __init__(
		self,
		f: ScalarFn,
		f_prime: ScalarFn,
		bracket: Tuple[float, float],
		f_second: Optional[ScalarFn] = None,
		grid_size: int = 401,
		name: str = "f",
	):
		lo, hi = float(bracket[0]), float(bracket[1])
		if not lo < hi:
			raise InvalidProblem(f"empty bracket {bracket}")
		if grid_size < 3:
			raise InvalidProblem("grid_size must be at least 3")
		self.f = f
		self.f_prime = f_prime
		self.f_second = f_second
		self.bracket = (lo, hi)
		self.name = name
		self._grid = np.linspace(lo, hi, grid_size)
		self._f_grid = np.array([f(y) for y in self._grid])

	def _phi(self, y: float, v: Point) -> float:
		return (y - v[0]) ** 2 + (self.f(y) - v[1]) ** 2

	def _dphi(self, y: float, v: Point) -> float:
		return 2.0 * (y - v[0]) + 2.0 * (self.f(y) - v[1]) * self.f_prime(y)

	def _newton_polish(self, y: float, v: Point, lo: float, hi: float, steps: int = 3) -> float:
		for _ in range(steps):
			fp = self.f_prime(y)
			curvature = 2.0 + 2.0 * fp * fp + 2.0 * (self.f(y) - v[1]) * self.f_second(y)
			if curvature <= 0:
				break
			candidate = y - self._dphi(y, v) / curvature
			if not lo <= candidate <= hi or self._phi(candidate, v) > self._phi(y, v):
				break
			y = candidate
		return y

	def nearest_abscissa(self, v: Point) -> float:
		values = (self._grid - v[0]) ** 2 + (self._f_grid - v[1]) ** 2
		i = int(np.argmin(values))
		lo = self._grid[max(i - 1, 0)]
		hi = self._grid[min(i + 1, self._grid.size - 1)]
		d_lo = self._dphi(lo, v)
		d_hi = self._dphi(hi, v)
		if d_lo == 0.0:
			y = lo
		elif d_hi == 0.0:
			y = hi
		elif d_lo < 0.0 < d_hi:
			y = optimize.brentq(self._dphi, lo, hi, args=(v,), xtol=1e-15, rtol=4 * np.finfo(float).eps)
		else:
			result = optimize.minimize_scalar(
				self._phi, bounds=(lo, hi), args=(v,), method="bounded", options={"xatol": 1e-12}
			)
			y = float(result.x)
			if self._phi(self._grid[i], v) < result.fun:
				y = float(self._grid[i])
		if self.f_second is not None:
			y = self._newton_polish(y, v, self.bracket[0], self.bracket[1])
		return float(y)

	def _project(self, p: Point) -> Point:
		y = self.nearest_abscissa(p)
		return np.array([y, self.f(y)])

	def __repr__(self) -> str:
		return f"FunctionGraph({self.name}, bracket={self.bracket})"
