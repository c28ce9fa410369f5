"""
bblab/config.py
-----------------------------------------------------------------------------
Runtime configuration read from the environment (and an optional ``.env``).

Environment variables
---------------------
BBLAB_GLUE_BOUND – default candidate bound for the unimodular glue search
                   (default 1 000 000).  ``--glue-bound`` overrides it.
BBLAB_LOG_LEVEL  – root log level used by the CLI (default WARNING).
BBLAB_REPORT_DIR – directory that relative ``--out`` paths resolve against.
BBLAB_SEED       – accepted for compatibility and ignored: no check is
                   randomised.

Values are read once at import time so the whole process sees one
configuration.
"""

from __future__ import annotations

import logging
import os
import tomllib
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

_HERE = Path(__file__).parent

# -----------------------------------------------------------------------------
# Settings
# -----------------------------------------------------------------------------

DEFAULT_GLUE_BOUND: int = int(os.getenv("BBLAB_GLUE_BOUND", "1000000"))

LOG_LEVEL: str = os.getenv("BBLAB_LOG_LEVEL", "WARNING").upper()

_report_dir = os.getenv("BBLAB_REPORT_DIR")
REPORT_DIR: Path | None = Path(_report_dir) if _report_dir else None

if os.getenv("BBLAB_SEED") is not None:
    logger.debug("BBLAB_SEED is set but ignored; no check depends on a seed")


def _read_version() -> str:
    """Version from pyproject.toml, or "0.0.0" when running from an installed wheel."""
    pyproject = _HERE.parent / "pyproject.toml"
    if not pyproject.is_file():
        return "0.0.0"
    with open(pyproject, "rb") as f:
        return str(tomllib.load(f)["project"]["version"])


VERSION: str = _read_version()


def resolve_output_path(path: str | Path) -> Path:
    """Resolve ``path`` against BBLAB_REPORT_DIR when it is relative and the variable is set."""
    p = Path(path)
    if REPORT_DIR is not None and not p.is_absolute():
        return REPORT_DIR / p
    return p
