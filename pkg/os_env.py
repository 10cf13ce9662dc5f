from __future__ import annotations

import os

import psutil
from dotenv import load_dotenv

load_dotenv()


def _default_workers() -> int:
    # physical cores only
    try:
        return psutil.cpu_count(logical=False) or 1
    except Exception:
        return 1


OUTPUT_DIR = os.getenv('DRESSED_GATE_OUTPUT_DIR', './runs')
WORKERS = int(os.getenv('DRESSED_GATE_WORKERS', _default_workers()))
LOG_LEVEL = os.getenv('DRESSED_GATE_LOG_LEVEL', 'INFO')
DEFAULT_SEED = int(os.getenv('DRESSED_GATE_SEED', 20130101))

ARTIFACT_SCHEMA = 'dressed-gate/1'
