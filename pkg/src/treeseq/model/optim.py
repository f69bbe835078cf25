"""Adam with global-norm gradient clipping."""

from __future__ import annotations

import math

import numpy as np

from .._kernels import kernels as default_kernels


class Adam:
    def __init__(
        self,
        params: dict[str, np.ndarray],
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        clip_norm: float = 1.0,
        kern=None,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.clip_norm = clip_norm
        self.kern = kern or default_kernels
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads: dict[str, np.ndarray]) -> float:
        """Apply one update; returns the pre-clip gradient norm."""
        self.t += 1
        sq = 0.0
        for g in grads.values():
            sq += float((g.astype(np.float64) ** 2).sum())
        norm = math.sqrt(sq)
        scale = 1.0
        if self.clip_norm and norm > self.clip_norm:
            scale = self.clip_norm / norm
        for name, p in self.params.items():
            g = grads[name].ravel()
            if scale != 1.0:
                g = g * p.dtype.type(scale)
            self.kern.adam_step(
                p.ravel(),
                np.ascontiguousarray(g),
                self.m[name].ravel(),
                self.v[name].ravel(),
                p.dtype.type(self.lr),
                p.dtype.type(self.beta1),
                p.dtype.type(self.beta2),
                p.dtype.type(self.eps),
                self.t,
            )
        return norm
