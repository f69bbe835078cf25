"""Model configuration."""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace

from ..errors import ValidationError

POSITIONAL_MODES = ("tree", "seq")


@dataclass(frozen=True)
class ModelConfig:
    src_vocab: int
    tgt_vocab: int
    d_model: int = 64
    n_heads: int = 4
    d_ff: int = 128
    n_enc_layers: int = 2
    n_dec_layers: int = 2
    positional: str = "tree"
    d_idx: int = 8
    path_len: int = 8
    dropout: float = 0.0
    max_len: int = 250
    dtype: str = "float32"

    def __post_init__(self):
        if self.positional not in POSITIONAL_MODES:
            raise ValidationError(f"positional mode must be one of {POSITIONAL_MODES}")
        if self.d_model <= 0 or self.d_model % 2 != 0:
            raise ValidationError("d_model must be a positive even integer")
        if self.d_model % self.n_heads != 0:
            raise ValidationError(
                f"n_heads {self.n_heads} must divide d_model {self.d_model}"
            )
        if self.positional == "tree":
            if self.d_idx < 2 or self.d_idx % 2 != 0:
                raise ValidationError("d_idx must be a positive even integer")
            if self.d_idx * self.path_len != self.d_model:
                raise ValidationError(
                    f"tree mode needs d_idx * path_len == d_model, got "
                    f"{self.d_idx} * {self.path_len} != {self.d_model}"
                )
        if not 0.0 <= self.dropout < 1.0:
            raise ValidationError("dropout must be in [0, 1)")
        if self.dtype not in ("float32", "float64"):
            raise ValidationError("dtype must be float32 or float64")
        if min(self.src_vocab, self.tgt_vocab) < 1:
            raise ValidationError("vocabulary sizes must be positive")
        if self.max_len < 2:
            raise ValidationError("max_len must be at least 2")

    def to_doc(self) -> dict:
        return asdict(self)

    @classmethod
    def from_doc(cls, doc: dict) -> "ModelConfig":
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ValidationError(f"malformed model config: {exc}") from exc

    def with_(self, **kw) -> "ModelConfig":
        return replace(self, **kw)
