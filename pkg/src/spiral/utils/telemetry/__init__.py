from .report_generator import ReportGenerator
from .schemas import (
	BenchInstanceRow,
	BenchReport,
	BenchStats,
	SolveRecord,
	SolveReport,
	SweepReport,
	TrajectoryRecord,
)
