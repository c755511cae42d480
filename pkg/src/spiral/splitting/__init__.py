from .admm import (
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
	run_admm,
)
from .basis_pursuit import (
	Accel,
	BasisPursuitInstance,
	SolveResult,
	SolverConfig,
	bp_solve,
	dual_dr_operator,
)
