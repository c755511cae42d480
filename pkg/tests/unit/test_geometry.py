import itertools
import logging

import numpy as np
import pytest

from spiral.errors import ColinearError, DimensionMismatch, InvalidProblem, NonFiniteIterate
from spiral.geometry import (
	Bisector,
	as_point,
	bisector_contains,
	circumcenter,
	colinearity_test,
	project_affine_hull,
)

logger = logging.getLogger(__name__)


def P(*coords):
	return np.array(coords, dtype=float)


def _well_conditioned_triples(rng, dim, count):
	triples = []
	while len(triples) < count:
		a, b, c = rng.standard_normal((3, dim))
		report = colinearity_test(a, b, c)
		if report.triangle_gram_det > 1e-6 * report.scale:
			triples.append((a, b, c))
	return triples


def test_circumcenter_examples():
	p = P(1.5, -2.0, 3.0)
	assert np.array_equal(circumcenter(p, p.copy(), p.copy()), p)
	assert np.allclose(circumcenter(P(0, 0), P(2, 0), P(0, 2)), P(1, 1))
	assert np.allclose(circumcenter(P(0, 0), P(2, 0), P(1, 5)), P(1, 2.4))

	with pytest.raises(ColinearError):
		circumcenter(P(0, 0), P(1, 0), P(2, 0))


def test_circumcenter_midpoint_reduction_is_exact():
	a = P(0.1, 0.7, -3.3)
	b = P(2.9, -1.1, 0.4)
	assert np.array_equal(circumcenter(a, a.copy(), b), (a + b) / 2)
	assert np.array_equal(circumcenter(a, b, a.copy()), (a + b) / 2)
	assert np.array_equal(circumcenter(b, a, a.copy()), (a + b) / 2)


def test_circumcenter_equidistance_and_hull_membership():
	rng = np.random.default_rng(11)
	for dim in range(2, 11):
		for a, b, c in _well_conditioned_triples(rng, dim, 1000):
			p = circumcenter(a, b, c)
			scale = 1 + np.linalg.norm(a) + np.linalg.norm(b) + np.linalg.norm(c)
			ra, rb, rc = (np.linalg.norm(p - q) for q in (a, b, c))
			assert abs(ra - rb) <= 1e-9 * scale
			assert abs(ra - rc) <= 1e-9 * scale

			offset = p - a
			in_span = project_affine_hull(offset, [a, b, c])
			assert np.linalg.norm(in_span - offset) <= 1e-9 * (1 + np.linalg.norm(offset))


def test_circumcenter_rigid_motion_equivariance():
	rng = np.random.default_rng(5)
	for dim in (2, 3, 7):
		R, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
		t = rng.standard_normal(dim)
		for a, b, c in _well_conditioned_triples(rng, dim, 20):
			expected = R @ circumcenter(a, b, c) + t
			moved = circumcenter(R @ a + t, R @ b + t, R @ c + t)
			assert np.linalg.norm(moved - expected) <= 1e-9 * (1 + np.linalg.norm(expected))


def test_circumcenter_matches_bisector_intersection_in_the_plane():
	rng = np.random.default_rng(3)
	for a, b, c in _well_conditioned_triples(rng, 2, 1000):
		# 2<q - a, b - a> = |b|^2 - |a|^2 and likewise for c
		lhs = 2 * np.vstack([b - a, c - a])
		rhs = np.array([b @ b - a @ a, c @ c - a @ a])
		expected = np.linalg.solve(lhs, rhs)
		assert np.linalg.norm(circumcenter(a, b, c) - expected) <= 1e-9 * (1 + np.linalg.norm(expected))


def test_colinearity_report():
	report = colinearity_test(P(0, 0), P(1, 0), P(2, 0))
	assert report.is_colinear

	report = colinearity_test(P(0, 0), P(1, 0), P(0, 1))
	assert not report.is_colinear
	assert report.triangle_gram_det == 1.0

	assert colinearity_test(P(0, 0), P(0, 0), P(5, 5)).is_colinear
	assert colinearity_test(P(1, 1), P(1, 1), P(1, 1)).is_colinear


def test_colinearity_is_symmetric():
	rng = np.random.default_rng(8)
	triples = [tuple(rng.standard_normal((3, 4))) for _ in range(20)]
	base = rng.standard_normal(4)
	direction = rng.standard_normal(4)
	triples.append((base, base + 1e-3 * direction, base + 2.5 * direction))
	for triple in triples:
		reports = [colinearity_test(*perm) for perm in itertools.permutations(triple)]
		assert len({r.is_colinear for r in reports}) == 1
		dets = [r.triangle_gram_det for r in reports]
		assert max(dets) - min(dets) <= 1e-12 * (1 + max(dets))
		assert len({r.scale for r in reports}) == 1


def test_bisector_membership():
	assert bisector_contains(Bisector(P(0, 0), P(2, 0)), P(1, 7))
	assert not bisector_contains(Bisector(P(0, 0), P(2, 0)), P(0, 0))
	assert bisector_contains(Bisector(P(0, 0), P(0, 2)), P(-3, 1))

	with pytest.raises(InvalidProblem):
		Bisector(P(1, 2), P(1, 2))


def test_project_affine_hull():
	assert np.allclose(project_affine_hull(P(1, 1, 1), [P(0, 0, 0), P(1, 0, 0)]), P(1, 0, 0))
	assert np.allclose(project_affine_hull(P(0, 0, 2), [P(0, 0, 0), P(1, 1, 0)]), P(0, 0, 0))

	p = P(0.3, -1.7, 2.2)
	full = [P(1, 1, 1), P(2, 1, 1), P(1, 3, 1), P(1, 1, -4)]
	assert np.allclose(project_affine_hull(p, full), p)

	# repeated points add no direction
	assert np.allclose(project_affine_hull(p, [P(0, 0, 0), P(0, 0, 0)]), np.zeros(3))


def test_points_are_validated():
	with pytest.raises(DimensionMismatch):
		circumcenter(P(0, 0), P(1, 0, 0), P(0, 1))
	with pytest.raises(DimensionMismatch):
		colinearity_test(P(0, 0), P(1, 0), P(0, 1, 2))
	with pytest.raises(NonFiniteIterate):
		as_point([0.0, np.nan])
	with pytest.raises(DimensionMismatch):
		as_point([[1.0, 2.0]])
