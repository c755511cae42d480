import logging

import numpy as np
import pytest
from pydantic import ValidationError

from spiral.bench.instances import generate_instance
from spiral.errors import ColinearSkip, InvalidProblem, IterationCapExceeded
from spiral.splitting import (
	AccelReason,
	AdmmState,
	BasisPursuitInstance,
	DualPoint,
	SolverConfig,
	accel_accept,
	admm_step,
	bp_solve,
	ct_dual_step,
	ct_install,
	dual_dr_operator,
	lt_dual_step,
	reconstruct_dual,
	run_admm,
)

logger = logging.getLogger(__name__)


def P(*coords):
	return np.array(coords, dtype=float)


def test_admm_step_example():
	inst = BasisPursuitInstance([[1.0, 0.0]], [1.0], c=1.0)
	s = admm_step(inst.problem(), AdmmState.zeros(2))
	assert np.allclose(s.x, P(1, 0))
	assert np.array_equal(s.z, P(0, 0))
	assert np.allclose(s.lam, P(1, 0))
	assert s.k == 1


def test_multiplier_update_tracks_the_primal_gap():
	inst = generate_instance(3, n=12, nu=4, c=1.5)
	states = run_admm(inst.problem(), AdmmState.zeros(12), 30)
	for prev, nxt in zip(states, states[1:]):
		assert np.allclose(nxt.lam - prev.lam, 1.5 * (nxt.x - nxt.z), atol=1e-12)


def test_reconstruct_dual_example():
	s = AdmmState(x=P(0), z=P(0.25), lam=P(0.5))
	y, r2, r12 = reconstruct_dual(s, P(1), c=1.0)
	assert np.allclose(y.y, P(0.75))
	assert np.allclose(r2, P(0.25))
	assert np.allclose(r12, P(2.25))


def test_admm_is_douglas_rachford_on_the_dual():
	for seed in range(20):
		c = 1.0 if seed % 2 == 0 else 2.0
		inst = generate_instance(seed, n=6, nu=3, c=c)
		prob = inst.problem()
		T = dual_dr_operator(inst)
		states = run_admm(prob, AdmmState.zeros(6), 50)
		ys = [DualPoint.from_state(s, c).y for s in states]
		for s, y in zip(states, ys):
			assert np.allclose(s.lam, np.clip(y, -1.0, 1.0), atol=1e-10)
			assert np.allclose(s.lam, prob.d2_prox.prox(y), atol=1e-10)
		for y, y_next in zip(ys, ys[1:]):
			assert np.linalg.norm(T(y) - y_next) <= 1e-8 * (1 + np.linalg.norm(y))


def test_reconstructed_reflections_match_the_dual_proxes():
	inst = generate_instance(4, n=8, nu=3, c=1.0)
	prob = inst.problem()
	states = run_admm(prob, AdmmState.zeros(8), 10)
	for s, nxt in zip(states, states[1:]):
		y, r2, r12 = reconstruct_dual(s, nxt.x, prob.c)
		assert np.allclose(r2, prob.d2_prox.reflect(y.y), atol=1e-10)
		assert np.allclose(r12, prob.d1_prox.reflect(r2), atol=1e-9)


def test_primal_iterates_stay_feasible():
	inst = generate_instance(5, n=20, nu=6)
	for s in run_admm(inst.problem(), AdmmState.zeros(20), 40)[1:]:
		assert np.linalg.norm(inst.A @ s.x - inst.b) <= 1e-9 * (1 + np.linalg.norm(inst.b))


def test_accel_accept_ties_accept():
	inst = generate_instance(1, n=10, nu=3)
	prob = inst.problem()
	s = AdmmState.zeros(10)
	decision, state, x_next = accel_accept(prob, s, DualPoint.from_state(s, prob.c).y)
	assert decision.accepted
	assert decision.reason is AccelReason.OBJECTIVE_IMPROVED
	assert decision.candidate_objective == decision.regular_objective
	assert np.array_equal(x_next, prob.x_update(s.z, s.lam, prob.c))
	assert state.k == s.k


def test_accel_accept_rejects_a_worse_candidate():
	inst = generate_instance(1, n=10, nu=3)
	prob = inst.problem()
	s = AdmmState.zeros(10)
	decision, state, x_next = accel_accept(prob, s, np.full(10, 100.0))
	assert not decision.accepted
	assert decision.reason is AccelReason.REJECTED
	assert decision.candidate_objective > decision.regular_objective
	assert state is s
	assert np.array_equal(x_next, prob.x_update(s.z, s.lam, prob.c))


def test_ct_install_keeps_a_worse_candidate():
	inst = generate_instance(1, n=10, nu=3)
	prob = inst.problem()
	s = AdmmState.zeros(10)
	candidate = np.full(10, 100.0)
	decision, state, x_next = ct_install(prob, s, candidate)
	assert decision.accepted
	assert decision.reason is AccelReason.INSTALLED
	assert decision.candidate_objective > decision.regular_objective
	assert np.array_equal(state.lam, np.ones(10))
	assert np.allclose(state.z, np.full(10, 99.0))
	assert np.allclose(x_next, prob.x_update(state.z, state.lam, prob.c))
	assert state.k == s.k


def test_dual_accelerators_skip_colinear_triples():
	inst = BasisPursuitInstance([[1.0, 1.0]], [1.0])
	prob = inst.problem()
	with pytest.raises(ColinearSkip):
		lt_dual_step(prob, (P(0, 0), P(1, 0), P(2, 0)))
	with pytest.raises(ColinearSkip):
		lt_dual_step(prob, (P(1, 1), P(1, 1), P(1, 1)))
	with pytest.raises(ColinearSkip):
		ct_dual_step(prob, DualPoint(P(0.5, 0.5)), P(0.5, 0.5), P(0.5, 0.5))


def test_ct_dual_step_is_equidistant():
	inst = BasisPursuitInstance([[1.0, 1.0, 0.0]], [1.0])
	prob = inst.problem()
	y, r2, r12 = P(0, 0, 0), P(1, 0, 0), P(0, 2, 1)
	center = ct_dual_step(prob, DualPoint(y), r2, r12)
	distances = [np.linalg.norm(center - q) for q in (y, r2, r12)]
	assert max(distances) - min(distances) <= 1e-12


def test_instance_validation():
	with pytest.raises(InvalidProblem):
		BasisPursuitInstance(np.eye(3), np.ones(3))
	with pytest.raises(InvalidProblem):
		BasisPursuitInstance([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]], [1.0, 2.0])
	with pytest.raises(InvalidProblem):
		BasisPursuitInstance([[1.0, 0.0]], [1.0], c=0.0)


def test_solver_config_validation():
	with pytest.raises(ValidationError):
		SolverConfig(accel_every=1)
	with pytest.raises(ValidationError):
		SolverConfig(tol=0.0)
	with pytest.raises(ValidationError):
		SolverConfig(max_iter=0)


def test_generated_instances_are_reproducible():
	first, second = generate_instance(42), generate_instance(42)
	assert np.array_equal(first.A, second.A)
	assert np.array_equal(first.b, second.b)
	assert (first.nu, first.n) == (10, 30)
	assert not np.array_equal(first.A, generate_instance(43).A)


def _assert_lt_decisions_never_worsen_the_objective(result):
	for decision in result.decisions:
		if decision.reason is AccelReason.COLINEAR_SKIP:
			assert not decision.accepted
			continue
		if decision.accepted:
			assert decision.reason is AccelReason.OBJECTIVE_IMPROVED
			assert decision.candidate_objective <= decision.regular_objective
		else:
			assert decision.reason is AccelReason.REJECTED
			assert decision.candidate_objective > decision.regular_objective


def test_bp_solve_accelerated_arms_agree_with_vanilla():
	config = SolverConfig(max_iter=200_000)
	vanilla_total = accelerated_total = 0
	for seed in range(1, 9):
		inst = generate_instance(seed)
		vanilla = bp_solve(inst, "none", config)
		accelerated = bp_solve(inst, "lt", config)
		assert vanilla.solved
		assert accelerated.solved
		assert vanilla.decisions == []
		assert accelerated.accel_attempts == len(accelerated.decisions) > 0
		_assert_lt_decisions_never_worsen_the_objective(accelerated)
		assert accelerated.objective == pytest.approx(vanilla.objective, rel=1e-4)
		assert accelerated.primal_residual <= 1e-8 * (1 + np.linalg.norm(inst.b))
		vanilla_total += vanilla.iterations
		accelerated_total += accelerated.iterations
	assert accelerated_total < vanilla_total


def test_bp_solve_ct_arm_installs_every_candidate():
	inst = generate_instance(2, n=12, nu=4)
	result = bp_solve(inst, "ct", SolverConfig(max_iter=200))
	assert result.iterations <= 200
	assert result.max_iter == 200
	assert result.accel_attempts == len(result.decisions) > 0
	assert result.accel_attempts == result.colinear_skips + result.objective_evaluations // 2
	for decision in result.decisions:
		assert decision.accepted == (decision.reason is AccelReason.INSTALLED)
	assert result.accel_accepted == result.accel_attempts - result.colinear_skips
	record = result.to_record()
	assert record.method == "ct"
	assert record.max_iter == 200


def test_bp_solve_ct_arm_hits_the_cap():
	inst = generate_instance(1)
	with pytest.raises(IterationCapExceeded) as excinfo:
		bp_solve(inst, "ct", SolverConfig(max_iter=100_000, raise_on_cap=True))
	assert excinfo.value.iterations == 100_000


def test_bp_solve_iteration_cap():
	inst = generate_instance(0)
	result = bp_solve(inst, "none", SolverConfig(max_iter=5))
	assert not result.solved
	assert result.iterations == 5

	with pytest.raises(IterationCapExceeded) as excinfo:
		bp_solve(inst, "none", SolverConfig(max_iter=5, raise_on_cap=True))
	assert excinfo.value.iterations == 5


def test_generator_nonzeros():
	sparse = generate_instance(6)
	dense = generate_instance(6, nonzeros=30)
	assert np.array_equal(sparse.A, dense.A)
	assert not np.array_equal(sparse.b, dense.b)
	with pytest.raises(InvalidProblem):
		generate_instance(6, nonzeros=0)
	with pytest.raises(InvalidProblem):
		generate_instance(6, n=30, nonzeros=31)


@pytest.mark.slow
def test_ct_arm_fails_where_vanilla_and_lt_solve():
	config = SolverConfig(max_iter=100_000)
	ct_capped = 0
	for seed in range(1, 21):
		inst = generate_instance(seed)
		assert bp_solve(inst, "none", config).solved
		assert bp_solve(inst, "lt", config).solved
		ct_capped += not bp_solve(inst, "ct", config).solved
	logger.info(f"ct capped on {ct_capped}/20 instances")
	assert ct_capped >= 18


@pytest.mark.slow
def test_lt_benchmark_on_200_instances():
	config = SolverConfig(max_iter=1_000_000)
	vanilla, accelerated, lt_wins = [], [], 0.0
	for seed in range(1, 201):
		inst = generate_instance(seed)
		none_run = bp_solve(inst, "none", config)
		lt_run = bp_solve(inst, "lt", config)
		assert none_run.solved and lt_run.solved
		_assert_lt_decisions_never_worsen_the_objective(lt_run)
		vanilla.append(none_run.iterations)
		accelerated.append(lt_run.iterations)
		if lt_run.iterations < none_run.iterations:
			lt_wins += 1
		elif lt_run.iterations == none_run.iterations:
			lt_wins += 0.5
	ratio = np.median(accelerated) / np.median(vanilla)
	logger.info(f"lt wins {lt_wins}/200, median ratio {ratio:.3f}")
	assert lt_wins >= 190
	# about 0.40 on these sparse instances
	assert ratio <= 0.45
