# fmt: off
# ruff: noqa: N802, ANN002, ANN003

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from pathlib import Path

from . import global_vars as gv

UTC = timezone.utc

ANSI = "\033["
RESET = f"{ANSI}0m"
DEBUG_GRAY = f"{ANSI}90m"

LEVEL_COLORS = {
    logging.DEBUG: DEBUG_GRAY,
    logging.INFO: f"{ANSI}32m",
    logging.WARNING: f"{ANSI}33m",
    logging.ERROR: f"{ANSI}31m",
    logging.CRITICAL: f"{ANSI}35m",
}

# subcommand currently running, shown in front of every message
_current_command: ContextVar[str] = ContextVar("current_command", default="")


class CommandFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        command = _current_command.get()
        record.command = f"({command}) " if command else ""
        return True


class LevelFormatter(logging.Formatter):
    """
    `[ LEVEL ]   (command) message   [time (file:function)]`

    Colored with local time on the console, plain with UTC time in log files.
    """

    def __init__(self, *, color: bool) -> None:
        suffix = "[%(asctime)s (%(filename)s:%(funcName)s)]"
        if color:
            suffix = f"{DEBUG_GRAY}{suffix}{RESET}"
        super().__init__(f"[ %(levelname)s ]   %(command)s%(message)s   {suffix}")
        self.color = color

    def formatTime(self, record: logging.LogRecord, datefmt: str | None = None) -> str:  # noqa: ARG002
        if self.color:
            return datetime.fromtimestamp(record.created).astimezone().strftime("%m/%d/%Y %H:%M:%S %Z")
        return datetime.fromtimestamp(record.created, tz=UTC).strftime("%m/%d/%Y %H:%M:%S UTC")

    def format(self, record: logging.LogRecord) -> str:
        rc = logging.makeLogRecord(record.__dict__)
        rc.levelname = rc.levelname.center(8)
        if not hasattr(rc, "command"):
            rc.command = ""
        if self.color:
            rc.levelname = f"{LEVEL_COLORS.get(rc.levelno, '')}{rc.levelname}{RESET}"
        return super().format(rc)


class CustomLogger:
    def __init__(self, base_logger: logging.Logger) -> None:
        self.base_logger: logging.Logger = base_logger

    def debug(self, msg: str, *args, **kwargs) -> None:
        kwargs.setdefault("stacklevel", 2)
        return self.base_logger.debug(msg, *args, **kwargs)

    def info(self, msg: str, *args, **kwargs) -> None:
        kwargs.setdefault("stacklevel", 2)
        return self.base_logger.info(msg, *args, **kwargs)

    def warning(self, msg: str, *args, **kwargs) -> None:
        kwargs.setdefault("stacklevel", 2)
        return self.base_logger.warning(msg, *args, **kwargs)

    def error(self, msg: str, *args, **kwargs) -> None:
        kwargs.setdefault("stacklevel", 2)
        return self.base_logger.error(msg, *args, **kwargs)

    def exception(self, msg: str, *args, **kwargs) -> None:
        kwargs.setdefault("stacklevel", 2)
        return self.base_logger.exception(msg, *args, **kwargs)

    @contextmanager
    def command(self, name: str) -> Iterator[None]:
        token = _current_command.set(name)
        try:
            yield
        finally:
            _current_command.reset(token)

    @contextmanager
    def timed(self, label: str) -> Iterator[None]:
        """Debug-log how long the block took."""
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.base_logger.debug(f"{label} took {elapsed:.3f}s", stacklevel=3)


_base_logger = logging.getLogger("flagexp")
_base_logger.setLevel(logging.DEBUG)
_base_logger.propagate = False
_base_logger.addFilter(CommandFilter())

# StreamHandler defaults to stderr, stdout is reserved for command output
_console = logging.StreamHandler()
_console.setFormatter(LevelFormatter(color=True))
_console.setLevel(logging.DEBUG if gv.config.debug_mode else logging.INFO)
_base_logger.addHandler(_console)

if gv.config.file_logging:
    try:
        log_dir = Path(__file__).parent.parent / "logs"
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file_path = log_dir / f"flagexp_{datetime.now(UTC).strftime('%Y-%m-%d_%H-%M-%S')}.log"

        file_handler = logging.FileHandler(log_file_path, encoding="utf-8")
        file_handler.setFormatter(LevelFormatter(color=False))
        file_handler.setLevel(logging.DEBUG)
        _base_logger.addHandler(file_handler)
    except OSError as e:
        print(f"[ ERROR ] Failed to setup file logging: {e}")

logger = CustomLogger(_base_logger)
