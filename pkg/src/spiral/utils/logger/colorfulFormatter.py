import json

from pythonjsonlogger import jsonlogger


# ANSI color codes
class Colors:
	RESET = "\033[0m"

	RED = "\033[31m"
	CYAN = "\033[36m"
	BRIGHT_BLACK = "\033[90m"
	BRIGHT_RED = "\033[91m"
	BRIGHT_GREEN = "\033[92m"
	BRIGHT_YELLOW = "\033[93m"
	BRIGHT_BLUE = "\033[94m"
	BRIGHT_MAGENTA = "\033[95m"

	BOLD = "\033[1m"
	DIM = "\033[2m"
	ITALIC = "\033[3m"


def _render_value(value) -> str:
	"""Context values are mostly residuals and counts; floats print in %.3e."""
	if isinstance(value, float):
		return f"{value:.3e}"
	return str(value)


class ColoredJSONFormatter(jsonlogger.JsonFormatter):
	"""A JSON formatter that renders each record as one coloured line.

	Context fields injected with ``add_context_to_log`` (seed, method, ...)
	are appended as ``key=value`` pairs.
	"""

	LEVEL_COLORS = {
		"DEBUG": Colors.BRIGHT_BLACK,
		"INFO": Colors.BRIGHT_BLUE,
		"WARNING": Colors.BRIGHT_YELLOW,
		"ERROR": Colors.BRIGHT_RED,
		"CRITICAL": Colors.RED + Colors.BOLD,
	}

	RESERVED = ("time", "level", "name", "message")

	def format(self, record):
		log_dict = json.loads(super().format(record))

		level = log_dict.get("level", "")
		color = self.LEVEL_COLORS.get(level, "")
		parts = [
			f"{Colors.DIM}[{log_dict.get('time', '')}]{Colors.RESET}",
			f"[{color}{level:8}{Colors.RESET}]",
			f"({Colors.CYAN}{log_dict.get('name', '')}{Colors.RESET})",
			f"{Colors.ITALIC}{log_dict.get('message', '')}{Colors.RESET}",
		]

		context_parts = [
			f"{Colors.BRIGHT_MAGENTA}{key}{Colors.RESET}="
			f"{Colors.BRIGHT_GREEN}{_render_value(value)}{Colors.RESET}"
			for key, value in log_dict.items()
			if key not in self.RESERVED
		]
		if context_parts:
			parts.append(f"[{', '.join(context_parts)}]")

		return " ".join(parts)
