"""Seeded training loop."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from ..vocab import PAD, JointVocab
from .config import ModelConfig
from .data import Example, make_batch
from .optim import Adam
from .transformer import init_params, loss_and_grads
from .._kernels import kernels as default_kernels


def train(
    cfg: ModelConfig,
    examples: list[Example],
    joint: JointVocab,
    *,
    epochs: int,
    lr: float = 1e-4,
    batch_size: int = 15,
    seed: int = 0,
    kern=None,
    params: dict | None = None,
    log_cb=None,
) -> tuple[dict, list[float]]:
    """Train from scratch (or continue ``params``); returns params and
    the mean loss per epoch."""
    if not examples:
        raise ValidationError("cannot train on an empty corpus")
    if epochs < 0 or batch_size < 1:
        raise ValidationError("epochs must be >= 0 and batch_size >= 1")
    kern = kern or default_kernels
    if params is None:
        params = init_params(cfg, seed=seed)
    opt = Adam(params, lr=lr, kern=kern)
    rng = np.random.default_rng(seed + 1)
    history: list[float] = []
    order = np.arange(len(examples))
    for epoch in range(epochs):
        rng.shuffle(order)
        total, batches = 0.0, 0
        for start in range(0, len(order), batch_size):
            chunk = [examples[i] for i in order[start : start + batch_size]]
            batch = make_batch(chunk, joint, cfg.path_len)
            loss, grads = loss_and_grads(
                cfg,
                params,
                batch.nl,
                batch.ast,
                batch.paths if cfg.positional == "tree" else None,
                src_pad=PAD,
                tgt_pad=joint.pad_id,
                kern=kern,
            )
            opt.step(grads)
            total += loss
            batches += 1
        history.append(total / batches)
        if log_cb is not None:
            log_cb(epoch, history[-1])
    return params, history
