"""Schema Package - JSON Schema Loading.

Loads the JSON schemas used to validate pmls inputs (study and scene files)
and outputs (result payloads, run manifests) once at import time.

Usage:
    from jsonschema import validate
    from schema import STUDY_CONFIG_SCHEMA
    validate(instance=study, schema=STUDY_CONFIG_SCHEMA)
"""
from .schema import (
    FIT_PAYLOAD_SCHEMA,
    PATH_PAYLOAD_SCHEMA,
    RUN_MANIFEST_SCHEMA,
    SCENE_CONFIG_SCHEMA,
    STUDY_CONFIG_SCHEMA,
)

__all__ = [
    "FIT_PAYLOAD_SCHEMA",
    "PATH_PAYLOAD_SCHEMA",
    "RUN_MANIFEST_SCHEMA",
    "SCENE_CONFIG_SCHEMA",
    "STUDY_CONFIG_SCHEMA",
]
