from .utils import Logger

from .settings.extract_settings import APP_SETTINGS

logger_level = APP_SETTINGS["logger"]["level"]
logger_instance = Logger(
	colorful_output=APP_SETTINGS["logger"]["colorful"], logger_level=logger_level
)  # Initiating logger

from .cli import main  # noqa: E402

__all__ = ["APP_SETTINGS", "logger_instance", "main"]
