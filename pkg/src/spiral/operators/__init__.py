from .sets import (
	AffineSystem,
	FunctionGraph,
	Hyperplane,
	InfBall,
	LineAtAngle,
	SetOracle,
	Sphere,
	line_through,
)
from .prox import (
	AffineSupportConjugate,
	IndicatorOf,
	L1Norm,
	ProxOracle,
	SupportConjugateBox,
	shrinkage,
)
from .maps import (
	Branch,
	IterateWindow,
	StepOutcome,
	Trajectory,
	crm_apply,
	crm_step,
	dr_apply,
	dr_step,
	iterate,
	lt_apply,
	lt_from_window,
	lt_step,
	pi_t,
	project,
	reflect,
	resolvent,
	shadow,
)
