# helper/artifacts.py
from __future__ import annotations

import logging
from collections.abc import Iterable
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from helper.json_helper import dump_json
from models.config import RunConfig
from os_env import ARTIFACT_SCHEMA

logger = logging.getLogger(__name__)

# execution details that must not change the bytes of an artifact
_EXCLUDED_CONFIG_KEYS = {'workers', 'output_dir'}


def config_document(config: RunConfig) -> dict[str, Any]:
    return config.model_dump(mode='json', exclude=_EXCLUDED_CONFIG_KEYS)


def json_artifact(command: str, config: RunConfig, result: Any) -> str:
    document = {
        'schema': ARTIFACT_SCHEMA,
        'command': command,
        'config': config_document(config),
        'result': result,
    }
    return dump_json(document) + '\n'


def write_json_artifact(path: str | Path, command: str, config: RunConfig, result: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json_artifact(command, config, result), encoding='utf-8')
    logger.info(f"wrote {path}")
    return path


def _cell(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(value)
    return '%.17g' % value


def csv_artifact(config: RunConfig, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [
        f"# schema: {ARTIFACT_SCHEMA}",
        f"# config: {dump_json(config_document(config), indent=None)}",
        ','.join(header),
    ]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values for {len(header)} columns")
        lines.append(','.join(_cell(v) for v in row))
    return '\n'.join(lines) + '\n'


def write_csv_artifact(
    path: str | Path,
    config: RunConfig,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """CSV with the schema and the resolved config as comment lines, values at full double precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_artifact(config, header, rows), encoding='utf-8')
    logger.info(f"wrote {path}")
    return path
