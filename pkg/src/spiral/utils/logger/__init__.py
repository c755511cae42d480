from .logger import Logger, add_context_to_log
