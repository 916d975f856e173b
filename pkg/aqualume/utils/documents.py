"""Human-readable key-value documents (YAML) for configs and manifests."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from aqualume.errors import ConfigError
from aqualume.utils.storage import atomic_write


def load_document(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"document not found: {path}")
    with open(path, encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a key-value mapping at top level")
    return data


def dump_document(data: dict[str, Any], path: str | Path) -> Path:
    def _write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as handle:
            yaml.safe_dump(data, handle, sort_keys=False)

    return atomic_write(path, _write)
