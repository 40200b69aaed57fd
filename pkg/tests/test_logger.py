import logging

from modules.logger import CommandFilter, LevelFormatter, logger


def _record(message: str, level: int = logging.INFO) -> logging.LogRecord:
    record = logging.LogRecord("flagexp", level, __file__, 1, message, None, None, "test")
    CommandFilter().filter(record)
    return record


def test_plain_format_has_no_escape_codes():
    line = LevelFormatter(color=False).format(_record("hello"))
    assert line.startswith("[   INFO   ]   hello   [")
    assert line.endswith("UTC (test_logger.py:test)]")
    assert "\033[" not in line


def test_colored_level_badge():
    line = LevelFormatter(color=True).format(_record("careful", logging.WARNING))
    assert line.startswith("[ \033[33mWARNING \033[0m ]")


def test_command_prefix_is_scoped():
    with logger.command("flag exponent"):
        inside = LevelFormatter(color=False).format(_record("x"))
    outside = LevelFormatter(color=False).format(_record("x"))
    assert "   (flag exponent) x   " in inside
    assert "(flag exponent)" not in outside
