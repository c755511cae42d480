"""
Named two-set feasibility instances used by the CLI and the checkers.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt

from spiral.errors import InvalidProblem
from spiral.lyapunov import GraphLyapunov
from spiral.operators.sets import FunctionGraph, Hyperplane, LineAtAngle, SetOracle, Sphere

Box = Tuple[Tuple[float, float], Tuple[float, float]]


@dataclass(frozen=True)
class FeasibilityProblem:
	"""Find a point of A intersected with B."""

	name: str
	a: SetOracle
	b: SetOracle
	default_x0: npt.NDArray[np.float64] = field(default_factory=lambda: np.array([1.0, 1.0]))

	@property
	def dim(self) -> int:
		return int(self.default_x0.shape[0])


@dataclass(frozen=True)
class GraphInstance(FeasibilityProblem):
	"""A = R x {0}, B = gra f, with a known Lyapunov function for T_{A,B}."""

	lyapunov: Optional[GraphLyapunov] = None
	box: Box = ((-1.0, 1.0), (-1.0, 1.0))

	def sample(self, rng: np.random.Generator, count: int) -> npt.NDArray[np.float64]:
		"""``count`` points drawn uniformly from the sampling box."""
		(y_lo, y_hi), (r_lo, r_hi) = self.box
		return np.column_stack([rng.uniform(y_lo, y_hi, count), rng.uniform(r_lo, r_hi, count)])


def x_axis(offset: float = 0.0) -> Hyperplane:
	return Hyperplane(np.array([0.0, 1.0]), offset)


def two_lines(theta: float = np.pi / 4) -> GraphInstance:
	"""The x-axis and the line through 0 at angle theta.

	The second line is the graph of y -> tan(theta) y, so the instance also
	carries the Lyapunov function ||.||^2 / 2.
	"""
	if not 0.0 < theta < np.pi:
		raise InvalidProblem(f"theta must lie in (0, pi), got {theta}")
	return GraphInstance(
		name="two-lines",
		a=x_axis(),
		b=LineAtAngle(theta),
		default_x0=np.array([1.0, 1.0]),
		lyapunov=GraphLyapunov.linear(float(np.tan(theta))),
		box=((-1.0, 1.0), (-1.0, 1.0)),
	)


def circle_line(offset: float = 0.0) -> FeasibilityProblem:
	"""B the unit circle, A the horizontal line at height ``offset``.

	No Lyapunov oracle is attached; the default start spirals around the
	intersection point (1, 0).
	"""
	if abs(offset) > 1.0:
		raise InvalidProblem(f"the line y = {offset} misses the unit circle")
	return FeasibilityProblem(
		name="circle-line",
		a=x_axis(offset),
		b=Sphere(np.zeros(2), 1.0),
		default_x0=np.array([0.3, 0.8]),
	)


def exp_graph() -> GraphInstance:
	return GraphInstance(
		name="exp-graph",
		a=x_axis(),
		b=FunctionGraph(
			f=lambda y: np.expm1(y),
			f_prime=lambda y: np.exp(y),
			f_second=lambda y: np.exp(y),
			bracket=(-4.0, 4.0),
			name="exp(y) - 1",
		),
		default_x0=np.array([0.8, 0.3]),
		lyapunov=GraphLyapunov(
			f=lambda y: np.expm1(y),
			f_prime=lambda y: np.exp(y),
			domain=(-4.0, 4.0),
			anchor=0.0,
			name="exp(y) - 1",
		),
		box=((-1.0, 1.0), (-1.0, 1.0)),
	)


def quadratic_graph() -> GraphInstance:
	"""f(y) = y^2 - 2 restricted to y > 0, with root sqrt(2)."""
	return GraphInstance(
		name="quadratic-graph",
		a=x_axis(),
		b=FunctionGraph(
			f=lambda y: y * y - 2.0,
			f_prime=lambda y: 2.0 * y,
			f_second=lambda y: 2.0,
			bracket=(0.2, 5.0),
			name="y^2 - 2",
		),
		default_x0=np.array([2.0, 0.3]),
		lyapunov=GraphLyapunov(
			f=lambda y: y * y - 2.0,
			f_prime=lambda y: 2.0 * y,
			domain=(0.2, 5.0),
			anchor=float(np.sqrt(2.0)),
			name="y^2 - 2",
		),
		box=((1.0, 2.5), (-0.5, 0.5)),
	)


FEASIBILITY_PROBLEMS = ("two-lines", "circle-line", "exp-graph", "quadratic-graph")
GRAPH_INSTANCES = ("two-lines", "exp-graph", "quadratic-graph")

_BUILDERS: Dict[str, Callable[..., FeasibilityProblem]] = {
	"two-lines": lambda theta=np.pi / 4, **_: two_lines(theta),
	"circle-line": lambda offset=0.0, **_: circle_line(offset),
	"exp-graph": lambda **_: exp_graph(),
	"quadratic-graph": lambda **_: quadratic_graph(),
}


def build_problem(name: str, theta: Optional[float] = None, offset: Optional[float] = None) -> FeasibilityProblem:
	"""Look up a problem by its CLI name."""
	if name not in _BUILDERS:
		raise InvalidProblem(f"unknown problem {name!r}; expected one of {FEASIBILITY_PROBLEMS}")
	kwargs = {}
	if theta is not None:
		kwargs["theta"] = theta
	if offset is not None:
		kwargs["offset"] = offset
	return _BUILDERS[name](**kwargs)


def build_graph_instance(name: str, theta: Optional[float] = None) -> GraphInstance:
	if name not in GRAPH_INSTANCES:
		raise InvalidProblem(f"{name!r} has no Lyapunov oracle; expected one of {GRAPH_INSTANCES}")
	problem = build_problem(name, theta=theta)
	assert isinstance(problem, GraphInstance)
	return problem
