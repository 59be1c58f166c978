"""
JSON schemas for input documents and result payloads, read at import.

    STUDY_CONFIG_SCHEMA    simulate --study
    SCENE_CONFIG_SCHEMA    surface --scene
    FIT_PAYLOAD_SCHEMA     fit.json
    PATH_PAYLOAD_SCHEMA    path.json
    RUN_MANIFEST_SCHEMA    run_manifest.json
"""
import json
from pathlib import Path
from typing import Any, Dict

SCHEMA_DIR = Path(__file__).parent


def _load_schema(name: str) -> Dict[str, Any]:
    """Parse ``SCHEMA_DIR / name``; a missing or malformed file breaks the import.

    Raises:
        FileNotFoundError: no such schema
        json.JSONDecodeError: the file is not JSON
    """
    path = SCHEMA_DIR / name
    try:
        text = path.read_text()
    except FileNotFoundError as e:
        raise FileNotFoundError(f"Schema {name} missing from {SCHEMA_DIR}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise json.JSONDecodeError(f"{name}: {e.msg}", e.doc, e.pos) from e


def _payload_schema(container: Dict[str, Any], name: str) -> Dict[str, Any]:
    # $defs travel along so nested $refs resolve from the new root
    return {"$schema": container["$schema"], "$defs": container["$defs"], **container["$defs"][name]}


STUDY_CONFIG_SCHEMA = _load_schema("study_config_schema.json")
SCENE_CONFIG_SCHEMA = _load_schema("scene_config_schema.json")
RUN_MANIFEST_SCHEMA = _load_schema("run_manifest_schema.json")
RESULTS_SCHEMA = _load_schema("results_schema.json")
FIT_PAYLOAD_SCHEMA = _payload_schema(RESULTS_SCHEMA, "fit_payload")
PATH_PAYLOAD_SCHEMA = _payload_schema(RESULTS_SCHEMA, "path_payload")
