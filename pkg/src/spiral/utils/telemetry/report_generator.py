import logging
import os
from typing import List, Optional

from spiral.settings.extract_settings import APP_SETTINGS

from .schemas import BenchInstanceRow, BenchReport, BenchStats

logger = logging.getLogger(__name__)


class ReportGenerator:
	"""Renders a ``BenchReport`` as a Markdown document.

	The statistics table mirrors the usual layout of the benchmark
	(wins, min, Q1, median, Q3, max per method).
	"""

	def __init__(self, report: BenchReport) -> None:
		self._report = report

	def _unsolved_rows(self) -> List[BenchInstanceRow]:
		return [row for row in self._report.rows if not all(row.solved.values())]

	@staticmethod
	def _format_wins(wins: float) -> str:
		return f"{wins:g}"

	@staticmethod
	def _format_count(value: float) -> str:
		return f"{int(value)}" if float(value).is_integer() else f"{value:.1f}"

	def _stats_table(self, stats: List[BenchStats]) -> List[str]:
		lines = [
			"| Method | Solved | Wins | Min | Q1 | Median | Q3 | Max |",
			"|--------|--------|------|-----|----|--------|----|-----|",
		]
		for s in stats:
			lines.append(
				f"| `{s.method}` | {s.solved_count}/{s.instances} | {self._format_wins(s.wins)} "
				f"| {self._format_count(s.min)} | {self._format_count(s.q1)} | {self._format_count(s.median)} "
				f"| {self._format_count(s.q3)} | {self._format_count(s.max)} |"
			)
		return lines

	def render(self) -> str:
		r = self._report
		lines = [
			"# Basis Pursuit Benchmark",
			"",
			f"**Instances:** `{r.instances}` (seeds {r.seed_base}..{r.seed_base + r.instances - 1})",
			f"**Problem size:** `n={r.n}`, `nu={r.nu}`, `c={r.c:g}`"
			+ (f", `nonzeros={r.nonzeros}`" if r.nonzeros is not None else ""),
			f"**Stopping rule:** `tol={r.tol:g}`, cap `{r.max_iter}` passes",
			"",
			"## Iterations (passes through the ADMM updates)",
			"",
		]
		if r.stats:
			lines.extend(self._stats_table(r.stats))
		else:
			lines.append("No instances were run.")
		lines.append("")

		unsolved = self._unsolved_rows()
		if unsolved:
			lines.extend(["## Instances hitting the cap", ""])
			for row in unsolved:
				failed = ", ".join(m for m, ok in row.solved.items() if not ok)
				lines.append(f"- seed `{row.seed}`: {failed}")
			lines.append("")
		return "\n".join(lines)

	def generate_report(self, output_path: Optional[str] = None) -> str:
		"""Writes the Markdown summary and returns the path written."""
		output_path = output_path or APP_SETTINGS["bench"]["summary_path"]
		directory = os.path.dirname(output_path)
		if directory:
			os.makedirs(directory, exist_ok=True)
		with open(output_path, "w", encoding="utf-8") as f:
			f.write(self.render())
		logger.info(f"Benchmark summary written to {output_path}")
		return output_path
