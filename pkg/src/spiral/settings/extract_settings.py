from copy import deepcopy
from typing import Any, Dict
import yaml
import os
from pathlib import Path

# Default settings
DEFAULT_SETTINGS = {
	"logger": {"level": "INFO", "colorful": True},
	"numerics": {
		"eps_col": 1e-12,
		"tol_fix": 1e-13,
		"membership_tol": 1e-9,
	},
	"solver": {
		"tol": 1e-8,
		"max_iter": 1_000_000,
		"ct_max_iter": 100_000,
		"accel_every": 3,
	},
	"bench": {
		"workers": 1,
		"summary_path": "bench_results/summary.md",
	},
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
	"""Recursively overlay ``override`` on a copy of ``base``."""
	merged = deepcopy(base)
	for key, value in (override or {}).items():
		if isinstance(value, dict) and isinstance(merged.get(key), dict):
			merged[key] = _merge(merged[key], value)
		else:
			merged[key] = value
	return merged


def _read(path: Path) -> Dict[str, Any]:
	with open(path, "r") as f:
		return _merge(DEFAULT_SETTINGS, yaml.safe_load(f) or {})


# Try to find config.yml in multiple locations
def load_config() -> Dict[str, Any]:
	"""Load configuration from config.yml or use defaults.

	Whatever file is found is merged over ``DEFAULT_SETTINGS``, so a config
	that only sets ``logger.level`` is valid.
	"""
	# Location 1: Current working directory
	cwd_config = Path.cwd() / "config.yml"
	if cwd_config.exists():
		return _read(cwd_config)

	# Location 2: User's home directory
	home_config = Path.home() / ".spiral" / "config.yml"
	if home_config.exists():
		return _read(home_config)

	# Location 3: Environment variable
	config_env = os.getenv("SPIRAL_CONFIG")
	if config_env:
		config_path = Path(config_env)
		if config_path.exists():
			return _read(config_path)

	# Location 4: Package directory (for development)
	current_file = Path(__file__).resolve()
	project_root = current_file.parent.parent.parent.parent
	dev_config = project_root / "config.yml"
	if dev_config.exists():
		return _read(dev_config)

	# Fall back to defaults
	return deepcopy(DEFAULT_SETTINGS)


APP_SETTINGS = load_config()
