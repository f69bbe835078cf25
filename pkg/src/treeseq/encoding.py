"""Sinusoidal encodings for edge paths and flat positions.

A single edge index ``idx`` is embedded into ``d_idx`` dimensions as
interleaved sine/cosine pairs:

    E[2i]     = sin(w_i * idx)
    E[2i + 1] = cos(w_i * idx)        w_i = 10000 ** (-2 i / d_idx)

for i in 0 .. d_idx/2 - 1.  A whole path of length L is the
concatenation of its index encodings, deepest edge first, giving a
vector of size L * d_idx.  Two consequences hold by construction and
are load-bearing for the model:

* a child's encoding ends with the leading blocks of its parent's
  encoding (paths share their tail), and
* moving a node k places within its sibling list multiplies the first
  index block by a fixed block-diagonal rotation R(k).

Everything here is float64; the model casts as configured.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def _check_d_idx(d_idx: int) -> None:
    if d_idx < 2 or d_idx % 2 != 0:
        raise ValidationError(f"d_idx must be a positive even integer, got {d_idx}")


def frequencies(d_idx: int) -> np.ndarray:
    """w_i = 10000 ** (-2 i / d_idx) for i in 0 .. d_idx/2 - 1."""
    _check_d_idx(d_idx)
    i = np.arange(d_idx // 2, dtype=np.float64)
    return np.power(10000.0, -2.0 * i / d_idx)


def encode_index(idx: int, d_idx: int) -> np.ndarray:
    return encode_indices(np.asarray([idx]), d_idx)[0]


def encode_indices(idxs: np.ndarray, d_idx: int) -> np.ndarray:
    """Vectorized index encoding; output shape ``idxs.shape + (d_idx,)``."""
    w = frequencies(d_idx)
    angles = np.asarray(idxs, dtype=np.float64)[..., None] * w
    out = np.empty(angles.shape[:-1] + (d_idx,), dtype=np.float64)
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


def encode_path(path, d_idx: int) -> np.ndarray:
    """Concatenated index encodings, deepest edge first; size L * d_idx."""
    arr = np.asarray(path, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("path must be a non-empty 1-D index sequence")
    return encode_indices(arr, d_idx).reshape(-1)


def encode_paths(paths: np.ndarray, d_idx: int) -> np.ndarray:
    """Batch version: (..., L) integer paths to (..., L * d_idx) rows."""
    arr = np.asarray(paths, dtype=np.int64)
    enc = encode_indices(arr, d_idx)
    return enc.reshape(arr.shape[:-1] + (arr.shape[-1] * d_idx,))


def sequential_encoding(positions: np.ndarray, d_model: int) -> np.ndarray:
    """Standard flat-position sinusoids; shape ``positions.shape + (d_model,)``."""
    if d_model < 2 or d_model % 2 != 0:
        raise ValidationError(f"d_model must be a positive even integer, got {d_model}")
    i = np.arange(d_model // 2, dtype=np.float64)
    w = np.power(10000.0, -2.0 * i / d_model)
    angles = np.asarray(positions, dtype=np.float64)[..., None] * w
    out = np.empty(angles.shape[:-1] + (d_model,), dtype=np.float64)
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


def sibling_rotation(k: int, d_idx: int) -> np.ndarray:
    """Block-diagonal R(k) with R(k) @ encode_index(idx) == encode_index(idx + k)."""
    w = frequencies(d_idx)
    out = np.zeros((d_idx, d_idx), dtype=np.float64)
    c, s = np.cos(w * k), np.sin(w * k)
    for i in range(d_idx // 2):
        out[2 * i, 2 * i] = c[i]
        out[2 * i, 2 * i + 1] = s[i]
        out[2 * i + 1, 2 * i] = -s[i]
        out[2 * i + 1, 2 * i + 1] = c[i]
    return out
