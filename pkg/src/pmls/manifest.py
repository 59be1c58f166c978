"""
Run manifests.

A manifest records what a run needs to be repeated: the subcommand, the
fully resolved configuration, every seed and the produced artifacts. It is
validated against RUN_MANIFEST_SCHEMA and written atomically
(``run_manifest.json.tmp`` then ``os.replace``).
"""
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Union

from config import validate_document
from models.errors import ConfigError
from pmls import __version__
from schema import RUN_MANIFEST_SCHEMA

logger = logging.getLogger(__name__)

MANIFEST_NAME = "run_manifest.json"


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config: Dict[str, Any]
    seeds: Dict[str, int]
    artifacts: Dict[str, str] = field(default_factory=dict)
    version: str = __version__
    created_at: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "seeds": dict(self.seeds),
            "artifacts": dict(self.artifacts),
            "version": self.version,
            "created_at": self.created_at or datetime.now(timezone.utc).isoformat(),
        }

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "RunManifest":
        """Build from a parsed manifest.

        Raises:
            ConfigError: document fails schema validation
        """
        validate_document(document, RUN_MANIFEST_SCHEMA, "manifest")
        return cls(
            subcommand=document["subcommand"],
            config=document["config"],
            seeds={k: int(v) for k, v in document["seeds"].items()},
            artifacts=dict(document["artifacts"]),
            version=document["version"],
            created_at=document["created_at"],
        )

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Validate and write ``run_manifest.json`` into ``out_dir`` atomically."""
        out_dir = Path(out_dir)
        payload = self.to_dict()
        validate_document(payload, RUN_MANIFEST_SCHEMA, "manifest")
        path = out_dir / MANIFEST_NAME
        tmp_path = out_dir / f"{MANIFEST_NAME}.tmp"
        with open(tmp_path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp_path, path)
        logger.info(f"Wrote run manifest to {path}")
        return path


def load_manifest(path: Union[str, Path]) -> RunManifest:
    """Read a manifest file, or ``run_manifest.json`` inside a run directory.

    Raises:
        FileNotFoundError: no manifest at path
        ConfigError: not valid JSON or not a valid manifest
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"Run manifest not found: {path}")
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"could not parse: {e}", str(path)) from e
    if not isinstance(document, dict):
        raise ConfigError("root must be an object", str(path))
    return RunManifest.from_dict(document)
