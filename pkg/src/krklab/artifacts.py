"""Model artifact files: a documented JSON schema, human-diffable.

Layout (schema_version 1):

    {
      "schema_version": 1,
      "kind": "decision_forest",
      "encoding_fingerprint": "ordinal+minmax:6",
      "class_order": ["draw", "zero", ...],
      "fitted_encoding": {"kind", "normalize", "col_min", "col_max"} | null,
      "payload": {...model parameters...},
      "manifest": {...training provenance...}
    }

Floats are serialized via repr, so a load/save round trip reproduces
bit-identical predictions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .dataset import EncodingScheme, FittedEncoding
from .models import MODEL_CLASSES, TrainedModel

SCHEMA_VERSION = 1


class SchemaVersionError(ValueError):
    pass


class CorruptPayloadError(ValueError):
    pass


@dataclass(frozen=True)
class ModelArtifact:
    model: TrainedModel
    fitted_encoding: FittedEncoding | None
    manifest: dict


def _encoding_to_json(enc: FittedEncoding | None) -> dict | None:
    if enc is None:
        return None
    return {
        "kind": enc.scheme.kind,
        "normalize": enc.scheme.normalize,
        "col_min": list(enc.col_min) if enc.col_min is not None else None,
        "col_max": list(enc.col_max) if enc.col_max is not None else None,
    }


def _encoding_from_json(data: dict | None) -> FittedEncoding | None:
    if data is None:
        return None
    return FittedEncoding(
        EncodingScheme(data["kind"], data["normalize"]),
        tuple(data["col_min"]) if data.get("col_min") is not None else None,
        tuple(data["col_max"]) if data.get("col_max") is not None else None,
    )


def save_model(model: TrainedModel, path: str | Path,
               fitted_encoding: FittedEncoding | None = None,
               manifest: dict | None = None) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": model.kind,
        "encoding_fingerprint": model.encoding_fingerprint,
        "class_order": list(model.class_order),
        "fitted_encoding": _encoding_to_json(fitted_encoding),
        "config": model.config,
        "payload": model.payload(),
        "manifest": manifest or {},
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path: str | Path) -> ModelArtifact:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptPayloadError(f"{path}: not a valid artifact file ({exc})") from exc
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise CorruptPayloadError(f"{path}: missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{path}: schema_version {doc['schema_version']} not supported "
            f"(this build reads version {SCHEMA_VERSION})"
        )
    try:
        cls = MODEL_CLASSES[doc["kind"]]
        model = cls.from_payload(
            doc["payload"],
            class_order=tuple(doc["class_order"]),
            encoding_fingerprint=doc["encoding_fingerprint"],
            config=doc.get("config", {}),
        )
        encoding = _encoding_from_json(doc.get("fitted_encoding"))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptPayloadError(f"{path}: malformed payload ({exc})") from exc
    return ModelArtifact(model, encoding, doc.get("manifest", {}))
