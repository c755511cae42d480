"""
Proximity operators.

``prox`` of a set indicator is the projection onto the set, so an
``IndicatorOf`` wraps any ``SetOracle``. The remaining kinds are the scaled
functions that show up on the dual side of basis pursuit.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from spiral.errors import InvalidProblem
from spiral.geometry import Point
from spiral.operators.sets import AffineSystem, InfBall, SetOracle


def shrinkage(v: Point, kappa: float) -> Point:
	"""Soft thresholding ``sign(v) * max(|v| - kappa, 0)``, the prox of kappa*||.||_1."""
	if kappa < 0:
		raise ValueError(f"kappa must be nonnegative, got {kappa}")
	return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


class ProxOracle(ABC):
	dim: Optional[int] = None

	@abstractmethod
	def prox(self, v: Point) -> Point:
		pass

	def reflect(self, v: Point) -> Point:
		"""Reflected resolvent ``2 prox - Id``."""
		return 2.0 * self.prox(v) - v


class IndicatorOf(ProxOracle):
	def __init__(self, target: SetOracle):
		self.target = target
		self.dim = target.dim

	def prox(self, v: Point) -> Point:
		return self.target.project(v)

	def __repr__(self) -> str:
		return f"IndicatorOf({self.target!r})"


class L1Norm(ProxOracle):
	"""kappa * ||.||_1."""

	def __init__(self, kappa: float = 1.0):
		if kappa < 0:
			raise InvalidProblem(f"kappa must be nonnegative, got {kappa}")
		self.kappa = float(kappa)

	def prox(self, v: Point) -> Point:
		return shrinkage(v, self.kappa)

	def __repr__(self) -> str:
		return f"L1Norm(kappa={self.kappa})"


class SupportConjugateBox(IndicatorOf):
	"""c * (||.||_1)^* = indicator of the unit infinity ball, for every c > 0."""

	def __init__(self, dim: Optional[int] = None):
		super().__init__(InfBall(dim=dim))

	def __repr__(self) -> str:
		return f"SupportConjugateBox(dim={self.dim})"


class AffineSupportConjugate(ProxOracle):
	"""c * d1 where d1(lam) = sigma_S(-lam) is the conjugate of iota_S at -lam.

	By the Moreau decomposition ``prox(w) = w + c * P_S(-w / c)``.
	"""

	def __init__(self, affine: AffineSystem, c: float = 1.0):
		if not c > 0:
			raise InvalidProblem(f"penalty c must be positive, got {c}")
		self.affine = affine
		self.c = float(c)
		self.dim = affine.dim

	def prox(self, v: Point) -> Point:
		return v + self.c * self.affine.project(-v / self.c)

	def __repr__(self) -> str:
		return f"AffineSupportConjugate({self.affine!r}, c={self.c})"
