"""Exception hierarchy shared by every ``spiral`` module."""


class SpiralError(Exception):
	"""Base class for all library errors."""


class DimensionMismatch(SpiralError, ValueError):
	"""Points or oracles of different ambient dimension were combined."""


class InvalidProblem(SpiralError, ValueError):
	"""An oracle or problem instance violates its construction invariants."""


class NonFiniteIterate(SpiralError, ArithmeticError):
	"""An iterate left the finite range (NaN or Inf coordinates)."""


class ColinearError(SpiralError):
	"""Three distinct colinear points have no circumcenter."""


class FixedPointError(SpiralError):
	"""``x++`` coincides with ``x+``: the iteration has already converged."""


class SphereCenterAmbiguity(SpiralError):
	"""Every point of a sphere is nearest to its center."""


class SingularGradient(SpiralError):
	"""``f'(y) = 0`` while ``f(y) != 0``, so ``f/f'`` is undefined."""


class DegenerateGradient(SpiralError):
	"""The surrogate gradient vanishes because the probe is the center."""


class ColinearSkip(SpiralError):
	"""An accelerator window is colinear; proceed with the regular update."""


class IterationCapExceeded(SpiralError):
	"""A solve hit its iteration cap before the stopping rule fired."""

	def __init__(self, message: str, iterations: int):
		super().__init__(message)
		self.iterations = iterations
