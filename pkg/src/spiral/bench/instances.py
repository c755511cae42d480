import math
from typing import Optional

import numpy as np

from spiral.errors import InvalidProblem
from spiral.splitting.basis_pursuit import BasisPursuitInstance


def generate_instance(
	seed: int, n: int = 30, nu: int = 10, c: float = 1.0, nonzeros: Optional[int] = None
) -> BasisPursuitInstance:
	"""A random basis pursuit instance drawn from a PCG64 stream seeded by ``seed``.

	A has i.i.d. standard normal entries and ``b = A x_true`` for an x_true
	with ``nonzeros`` nonzero standard normal entries, ``ceil(n / 10)`` by
	default. ``nonzeros=n`` gives a dense x_true, so the l1 minimizer is no
	longer x_true itself.
	"""
	k = math.ceil(n / 10) if nonzeros is None else nonzeros
	if not 1 <= k <= n:
		raise InvalidProblem(f"nonzeros must lie in [1, {n}], got {k}")
	rng = np.random.Generator(np.random.PCG64(seed))
	A = rng.standard_normal((nu, n))
	support = rng.choice(n, size=k, replace=False)
	x_true = np.zeros(n)
	x_true[support] = rng.standard_normal(k)
	return BasisPursuitInstance(A, A @ x_true, c=c, seed=seed)
