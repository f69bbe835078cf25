"""Checkpoints: one .npz with the config embedded as JSON."""

from __future__ import annotations

import json

import numpy as np

from ..errors import ValidationError
from .config import ModelConfig

FORMAT_VERSION = 1


def save_checkpoint(path, cfg: ModelConfig, params: dict, meta: dict | None = None) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "config": cfg.to_doc(),
        "meta": meta or {},
    }
    arrays = {f"param/{name}": arr for name, arr in params.items()}
    np.savez(path, __header__=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
             **arrays)


def load_checkpoint(path) -> tuple[ModelConfig, dict, dict]:
    try:
        blob = np.load(path)
    except (OSError, ValueError) as exc:
        if isinstance(exc, OSError):
            raise
        raise ValidationError(f"{path}: not a checkpoint file: {exc}") from exc
    if "__header__" not in blob:
        raise ValidationError(f"{path}: checkpoint header missing")
    header = json.loads(bytes(blob["__header__"]).decode())
    if header.get("format_version") != FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported checkpoint format_version {header.get('format_version')!r}"
        )
    cfg = ModelConfig.from_doc(header["config"])
    params = {
        name[len("param/") :]: blob[name] for name in blob.files if name.startswith("param/")
    }
    return cfg, params, header.get("meta", {})
