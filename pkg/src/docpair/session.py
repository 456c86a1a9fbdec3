#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 15:31:48"
# File: ./src/docpair/session.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/session.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
import json
import logging
import time
from pathlib import Path
from typing import Optional, Union

from .config import RunConfig
from .datagen import CorpusParams
from .utils import resolve_output_dir

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class RunSession:
    """
    Context manager for one CLI run: output dir, run.log, echoed config.

    ``config`` is a resolved RunConfig or, for corpus generation, the
    CorpusParams; either is echoed to ``config.cfg``.
    """

    def __init__(
        self,
        command: str,
        config: Optional[Union[RunConfig, CorpusParams]] = None,
        out: Optional[Union[str, Path]] = None,
        message: Optional[str] = None,
        level: int = logging.INFO,
    ):
        self.command = command
        self.config = config
        self.out = out
        self.message = message
        self.level = level
        self.out_dir: Optional[Path] = None
        self._handler: Optional[logging.Handler] = None
        self._previous_level: Optional[int] = None
        self._started = 0.0

    @property
    def logger(self) -> logging.Logger:
        return logging.getLogger("docpair")

    def __enter__(self) -> "RunSession":
        self.out_dir = resolve_output_dir(
            None if self.out is None else str(self.out), self.command, self.message
        )
        self._handler = logging.FileHandler(self.out_dir / "run.log", mode="a", encoding="utf-8")
        self._handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self._handler.setLevel(self.level)
        self._previous_level = self.logger.level
        if self.logger.level == logging.NOTSET or self.logger.level > self.level:
            self.logger.setLevel(self.level)
        self.logger.addHandler(self._handler)
        if self.config is not None:
            self.config.echo(self.out_dir)
        self._started = time.monotonic()
        self.logger.info("%s started, output in %s", self.command, self.out_dir)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            self.logger.info("%s finished in %.1fs", self.command, time.monotonic() - self._started)
        else:
            self.logger.error("%s failed: %s: %s", self.command, exc_type.__name__, exc_val)
        self.logger.removeHandler(self._handler)
        self._handler.close()
        self.logger.setLevel(self._previous_level)
        return False

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_report(self, name: str, text: str, data: Optional[dict] = None) -> Path:
        """Write ``<name>.txt`` and, with ``data``, ``<name>.json``."""
        path = self.path(f"{name}.txt")
        path.write_text(text.rstrip("\n") + "\n")
        if data is not None:
            self.path(f"{name}.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return path


def session(command: str, **kwargs) -> RunSession:
    """Create a new run session context manager."""
    return RunSession(command, **kwargs)


# EOF
