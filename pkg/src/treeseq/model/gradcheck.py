"""Finite-difference validation of the analytic gradients.

Central differences with step 1e-5 against ``loss_and_grads`` on a
double-precision model.  The error of a coordinate is
``|analytic - numeric| / max(1, |analytic|, |numeric|)``: relative for
large gradients, absolute near zero, so the 1e-6 pass bar is
meaningful at both scales.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from .config import ModelConfig
from .transformer import loss_and_grads


def grad_check(
    cfg: ModelConfig,
    params: dict,
    batch_args: dict,
    *,
    n_coords: int = 200,
    step: float = 1e-5,
    seed: int = 0,
    kern=None,
) -> dict:
    """Compare analytic and numeric gradients on sampled coordinates.

    ``batch_args`` holds nl_ids / ast_ids / ast_paths / src_pad /
    tgt_pad.  Returns a report with the max error and its location.
    """
    if cfg.dtype != "float64":
        raise ValidationError("gradient checking is only meaningful in float64")
    loss, grads = loss_and_grads(cfg, params, kern=kern, want_grads=True, **batch_args)
    rng = np.random.default_rng(seed)
    names = sorted(params)
    sizes = np.asarray([params[n].size for n in names])
    total = int(sizes.sum())
    chosen = rng.choice(total, size=min(n_coords, total), replace=False)
    offsets = np.cumsum(sizes)
    worst = {"error": 0.0, "name": None, "index": None}
    for flat_idx in sorted(int(c) for c in chosen):
        which = int(np.searchsorted(offsets, flat_idx, side="right"))
        name = names[which]
        local = flat_idx - (0 if which == 0 else int(offsets[which - 1]))
        view = params[name].ravel()
        keep = view[local]
        view[local] = keep + step
        up, _ = loss_and_grads(cfg, params, kern=kern, want_grads=False, **batch_args)
        view[local] = keep - step
        down, _ = loss_and_grads(cfg, params, kern=kern, want_grads=False, **batch_args)
        view[local] = keep
        numeric = (up - down) / (2.0 * step)
        analytic = float(grads[name].ravel()[local])
        err = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
        if err > worst["error"]:
            worst = {"error": err, "name": name, "index": local,
                     "analytic": analytic, "numeric": numeric}
    worst["loss"] = loss
    worst["checked"] = len(chosen)
    return worst
