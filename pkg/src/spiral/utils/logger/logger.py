import atexit
import contextvars
import logging
import logging.handlers
import queue
import re
import sys
from contextlib import contextmanager

from pythonjsonlogger import jsonlogger

from .colorfulFormatter import ColoredJSONFormatter


class ArrayReprFilter(logging.Filter):
	"""A logging filter that shortens long numpy array reprs in log messages.

	Iterates are routinely interpolated into debug messages; a 30-dimensional
	``array([...])`` repr spans several lines, so anything longer than
	``max_chars`` is cut down to its head and tail.
	"""

	def __init__(self, max_chars: int = 160):
		"""Initializes the filter.

		Args:
			max_chars (int): Longest array repr kept verbatim.
		"""
		super().__init__()
		self.max_chars = max_chars
		self.array_regex = re.compile(r"array\(\[[^\]]*\]\)", re.DOTALL)

	def _shorten(self, match: re.Match) -> str:
		text = " ".join(match.group(0).split())
		if len(text) <= self.max_chars:
			return text
		keep = self.max_chars // 2
		return f"{text[:keep]} ... {text[-keep:]}"

	def filter(self, record: logging.LogRecord) -> bool:
		"""Rewrites the record message in place; never suppresses a record.

		Args:
			record (logging.LogRecord): The log record to be checked and modified.

		Returns:
			bool: Always True.
		"""
		message = record.getMessage()
		shortened = self.array_regex.sub(self._shorten, message)
		if shortened != message:
			record.msg = shortened
			record.args = ()
			if hasattr(record, "message"):
				delattr(record, "message")
		return True


class ContextAwareQueueHandler(logging.handlers.QueueHandler):
	"""Injects dynamic fields before enqueing"""

	def prepare(self, record):
		context = LOG_CONTEXT.get()
		for key, value in context.items():
			setattr(record, key, value)
		return super().prepare(record)


class Logger:
	"""Root logger wiring: queue handler in front, stderr stream behind.

	Data written with ``--out -`` goes to stdout, so log output is kept on
	stderr.
	"""

	def __init__(self, colorful_output=True, logger_level: str = "DEBUG") -> None:
		self.colorful_output = colorful_output
		self.queue_handler = self.__set_up_queue_handler()
		self.root_logger = logging.getLogger()
		self.root_logger.setLevel(self._resolve_logger_level(logger_level))
		self.root_logger.addHandler(self.queue_handler)

		atexit.register(self.shutdown)

	def _resolve_logger_level(self, logger_level: str):
		logger_level = str(logger_level).lower().strip()
		levels = {
			"notset": logging.NOTSET,
			"debug": logging.DEBUG,
			"info": logging.INFO,
			"warning": logging.WARNING,
			"error": logging.ERROR,
			"critical": logging.CRITICAL,
		}
		if logger_level not in levels:
			raise ValueError(f"{logger_level} is not an allowed logger level value")
		return levels[logger_level]

	def set_level(self, logger_level: str) -> None:
		self.root_logger.setLevel(self._resolve_logger_level(logger_level))

	def __set_up_queue_handler(self):
		log_queue = queue.Queue(-1)
		console_handler = self.__bind_handlers()
		self.listener = logging.handlers.QueueListener(log_queue, console_handler)
		self.listener.start()

		queue_handler = ContextAwareQueueHandler(log_queue)
		return queue_handler

	def __bind_handlers(self) -> logging.Handler:
		stream_handler = logging.StreamHandler(stream=sys.stderr)
		formatter = self.__bind_formatter()
		stream_handler.setFormatter(formatter)
		stream_handler.addFilter(ArrayReprFilter())
		return stream_handler

	def __bind_formatter(self):
		if not self.colorful_output:
			formatter = jsonlogger.JsonFormatter(
				"%(asctime)s %(name)s %(levelname)s %(message)s",
				rename_fields={"levelname": "level", "asctime": "time"},
			)
			return formatter
		else:
			formatter = ColoredJSONFormatter(
				"%(asctime)s %(name)s %(levelname)s %(message)s",
				rename_fields={"levelname": "level", "asctime": "time"},
			)

			return formatter

	def shutdown(self):
		"""Stops the QueueListener and flushes any remaining logs."""
		if self.listener:
			self.listener.stop()
			self.listener = None
		# Remove the queue handler from the root logger to prevent further logging attempts
		if self.queue_handler in self.root_logger.handlers:
			self.root_logger.removeHandler(self.queue_handler)


LOG_CONTEXT = contextvars.ContextVar("log_context", default={})


@contextmanager
def add_context_to_log(**kwargs):
	"""A context manager to add dynamic data to logs."""
	current_context = LOG_CONTEXT.get()
	new_context = {**current_context, **kwargs}

	token = LOG_CONTEXT.set(new_context)
	try:
		yield
	finally:
		LOG_CONTEXT.reset(token)
