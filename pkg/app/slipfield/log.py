import logging
import os
from pathlib import Path
from typing import Optional

log = logging.getLogger("slipfield")

DEFAULT_LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"
RUN_LOG_NAME = "run.log"


def _resolve_log_level() -> int:
    env_level = os.getenv("SLIPFIELD_LOG_LEVEL")
    if env_level:
        return logging._nameToLevel.get(env_level.upper(), logging.INFO)
    return logging.INFO


def configure_logging(level: Optional[int] = None, log_file: Optional[Path] = None) -> None:
    resolved = level if level is not None else _resolve_log_level()
    log.setLevel(resolved)
    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
               for h in log.handlers):
        stream = logging.StreamHandler()
        stream.setFormatter(logging.Formatter(DEFAULT_LOG_FORMAT))
        log.addHandler(stream)

    if log_file is None:
        return
    log_file = Path(log_file)
    if any(isinstance(h, logging.FileHandler) and getattr(h, "baseFilename", "") == str(log_file.resolve())
           for h in log.handlers):
        return
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(DEFAULT_LOG_FORMAT))
        log.addHandler(file_handler)
    except OSError:
        log.warning("Failed to initialize log file %s", log_file)


def detach_file_handlers() -> None:
    """Close run-scoped file handlers so the next run starts a fresh run.log."""
    for handler in list(log.handlers):
        if isinstance(handler, logging.FileHandler):
            log.removeHandler(handler)
            handler.close()
