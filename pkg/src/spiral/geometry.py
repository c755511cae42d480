"""
Small-scale Euclidean geometry on points of R^d.

Provides the circumcenter of (at most) three points, colinearity tests,
perpendicular bisectors and projections onto the direction space of an
affine hull. Everything here is a pure function of immutable inputs.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from spiral.errors import ColinearError, DimensionMismatch, InvalidProblem, NonFiniteIterate
from spiral.settings.extract_settings import APP_SETTINGS

Point = npt.NDArray[np.float64]

DEFAULT_EPS_COL: float = float(APP_SETTINGS["numerics"]["eps_col"])
DEFAULT_MEMBERSHIP_TOL: float = float(APP_SETTINGS["numerics"]["membership_tol"])


def as_point(coords: npt.ArrayLike) -> Point:
	"""Coerce ``coords`` to a finite 1-D float64 array.

	Raises:
		DimensionMismatch: If ``coords`` is not one-dimensional or empty.
		NonFiniteIterate: If any coordinate is NaN or infinite.
	"""
	p = np.asarray(coords, dtype=np.float64)
	if p.ndim != 1 or p.size == 0:
		raise DimensionMismatch(f"a point must be a nonempty 1-D vector, got shape {p.shape}")
	if not np.all(np.isfinite(p)):
		raise NonFiniteIterate(f"point has non-finite coordinates: {p!r}")
	return p


def same_dimension(*points: Point) -> int:
	"""Return the shared dimension of ``points`` or raise DimensionMismatch."""
	dims = {p.shape[0] for p in points}
	if len(dims) != 1:
		raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
	return dims.pop()


@dataclass(frozen=True)
class ColinearityReport:
	is_colinear: bool
	triangle_gram_det: float
	scale: float


@dataclass(frozen=True)
class Bisector:
	"""The perpendicular bisector H(y, z) of the segment [y, z]."""

	anchor_y: Point
	anchor_z: Point

	def __post_init__(self):
		same_dimension(self.anchor_y, self.anchor_z)
		if np.array_equal(self.anchor_y, self.anchor_z):
			raise InvalidProblem("H(y, y) is all of E; branch on coincident anchors first")

	@property
	def midpoint(self) -> Point:
		return (self.anchor_y + self.anchor_z) / 2

	@property
	def normal(self) -> Point:
		return self.anchor_y - self.anchor_z


def colinearity_test(
	a: Point, b: Point, c: Point, eps_col: float = DEFAULT_EPS_COL
) -> ColinearityReport:
	"""Relative colinearity test for three points.

	The Gram determinant of two edge vectors is four times the squared
	triangle area and does not depend on which vertex is used. It is compared
	against the product of the two largest squared edge lengths, which keeps
	the whole test symmetric in (a, b, c). Coincident points are colinear.
	"""
	same_dimension(a, b, c)
	u = b - a
	v = c - a
	uu = float(u @ u)
	vv = float(v @ v)
	uv = float(u @ v)
	gram_det = max(uu * vv - uv * uv, 0.0)
	w = c - b
	edges = sorted((uu, vv, float(w @ w)))
	scale = edges[1] * edges[2]
	return ColinearityReport(
		is_colinear=gram_det <= eps_col * scale,
		triangle_gram_det=gram_det,
		scale=scale,
	)


def circumcenter(a: Point, b: Point, c: Point, eps_col: float = DEFAULT_EPS_COL) -> Point:
	"""The point of aff{a, b, c} equidistant to a, b and c.

	One distinct point is returned as is; two distinct points give their
	midpoint. Otherwise ``a + alpha*u + beta*v`` with ``u = b - a`` and
	``v = c - a``, where (alpha, beta) solves the 2x2 Gram system
	``[[uu, uv], [uv, vv]] @ (alpha, beta) = (uu, vv) / 2``.

	Raises:
		ColinearError: If the points are distinct and colinear.
	"""
	same_dimension(a, b, c)
	ab = np.array_equal(a, b)
	ac = np.array_equal(a, c)
	bc = np.array_equal(b, c)
	if ab and ac:
		return a.copy()
	if ab or ac:
		other = c if ab else b
		return (a + other) / 2
	if bc:
		return (a + b) / 2

	report = colinearity_test(a, b, c, eps_col)
	if report.is_colinear:
		raise ColinearError(
			f"distinct colinear points (gram_det={report.triangle_gram_det:.3e}, scale={report.scale:.3e})"
		)
	u = b - a
	v = c - a
	uu = float(u @ u)
	vv = float(v @ v)
	uv = float(u @ v)
	det = uu * vv - uv * uv
	alpha = 0.5 * vv * (uu - uv) / det
	beta = 0.5 * uu * (vv - uv) / det
	return a + alpha * u + beta * v


def bisector_contains(h: Bisector, p: Point, tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
	"""True iff ``<p - midpoint, y - z>`` vanishes within ``tol`` scaling."""
	normal = h.normal
	lhs = abs(float((p - h.midpoint) @ normal))
	return lhs <= tol * float(np.linalg.norm(normal)) * (1.0 + float(np.linalg.norm(p)))


def orthonormal_directions(basis_points: Sequence[Point], rank_tol: float = 1e-12) -> npt.NDArray[np.float64]:
	"""Orthonormal rows spanning span{b_i - b_0}.

	Modified Gram-Schmidt with one re-orthogonalisation pass; a direction
	whose residual norm falls below ``rank_tol`` times its original norm is
	dropped as linearly dependent.
	"""
	if len(basis_points) == 0:
		raise ValueError("basis_points must be nonempty")
	dim = same_dimension(*basis_points)
	origin = basis_points[0]
	basis: list = []
	for point in basis_points[1:]:
		w = point - origin
		norm0 = float(np.linalg.norm(w))
		if norm0 == 0.0:
			continue
		for _ in range(2):
			for q in basis:
				w = w - (q @ w) * q
		norm = float(np.linalg.norm(w))
		if norm > rank_tol * norm0:
			basis.append(w / norm)
	if not basis:
		return np.zeros((0, dim))
	return np.vstack(basis)


def project_affine_hull(p: Point, basis_points: Sequence[Point]) -> Point:
	"""Orthogonal projection of ``p`` onto the direction space span{b_i - b_0}."""
	q = orthonormal_directions(basis_points)
	same_dimension(p, basis_points[0])
	if q.shape[0] == 0:
		return np.zeros_like(p)
	return q.T @ (q @ p)
