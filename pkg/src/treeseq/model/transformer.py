"""Encoder-decoder attention model on plain numpy arrays.

Matrix math is numpy; row-wise normalizations and the optimizer step
go through the selected kernel backend.  The backward pass is written
out by hand and is validated against central differences by
``treeseq.model.gradcheck``.

Layer layout is the pre-norm variant: every sublayer computes
``x + f(norm(x))`` and each stack ends with a final norm, which keeps
tiny models trainable without a warmup schedule.  Positional
information enters once, added to the scaled input embeddings: the
encoder always uses flat-position sinusoids over the text tokens, the
decoder uses edge-path encodings in ``tree`` mode and flat-position
sinusoids in ``seq`` mode.

``forward`` returns one log-probability row per decoder position: row
``t`` is the distribution of the token following ``ast_ids[:, :t+1]``.
"""

from __future__ import annotations

import math

import numpy as np

from ..encoding import encode_paths, sequential_encoding
from ..errors import ValidationError
from .._kernels import kernels as default_kernels
from .config import ModelConfig

NEG = -1e9


def _dtype(cfg: ModelConfig):
    return np.float32 if cfg.dtype == "float32" else np.float64


def init_params(cfg: ModelConfig, seed: int = 0) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    dt = _dtype(cfg)
    p: dict[str, np.ndarray] = {}

    def xavier(fan_in, fan_out):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dt)

    def block(prefix: str, cross: bool):
        names = ["self", "cross"] if cross else ["self"]
        for a in names:
            for m in ("wq", "wk", "wv", "wo"):
                p[f"{prefix}.{a}.{m}"] = xavier(cfg.d_model, cfg.d_model)
                p[f"{prefix}.{a}.{m[1]}b"] = np.zeros(cfg.d_model, dtype=dt)
        p[f"{prefix}.ff.w1"] = xavier(cfg.d_model, cfg.d_ff)
        p[f"{prefix}.ff.b1"] = np.zeros(cfg.d_ff, dtype=dt)
        p[f"{prefix}.ff.w2"] = xavier(cfg.d_ff, cfg.d_model)
        p[f"{prefix}.ff.b2"] = np.zeros(cfg.d_model, dtype=dt)
        n_norms = 3 if cross else 2
        for i in range(1, n_norms + 1):
            p[f"{prefix}.ln{i}.g"] = np.ones(cfg.d_model, dtype=dt)
            p[f"{prefix}.ln{i}.b"] = np.zeros(cfg.d_model, dtype=dt)

    p["enc.embed"] = (rng.normal(0.0, 0.02, size=(cfg.src_vocab, cfg.d_model))).astype(dt)
    p["dec.embed"] = (rng.normal(0.0, 0.02, size=(cfg.tgt_vocab, cfg.d_model))).astype(dt)
    for i in range(cfg.n_enc_layers):
        block(f"enc.{i}", cross=False)
    for i in range(cfg.n_dec_layers):
        block(f"dec.{i}", cross=True)
    for stack in ("enc", "dec"):
        p[f"{stack}.lnf.g"] = np.ones(cfg.d_model, dtype=dt)
        p[f"{stack}.lnf.b"] = np.zeros(cfg.d_model, dtype=dt)
    p["out.w"] = xavier(cfg.d_model, cfg.tgt_vocab)
    p["out.b"] = np.zeros(cfg.tgt_vocab, dtype=dt)
    return p


# ---------------------------------------------------------------------------
# positional rows


def decoder_pos_rows(cfg: ModelConfig, n_tokens: int, paths) -> np.ndarray:
    """(T, d_model) positional rows for one decoder prefix."""
    dt = _dtype(cfg)
    if cfg.positional == "seq":
        return sequential_encoding(np.arange(n_tokens), cfg.d_model).astype(dt)
    if paths is None:
        raise ValidationError("tree positional mode needs edge paths")
    return encode_paths(np.asarray(paths, dtype=np.int64), cfg.d_idx).astype(dt)


def _batch_pos_rows(cfg: ModelConfig, ast_ids: np.ndarray, ast_paths) -> np.ndarray:
    B, T = ast_ids.shape
    dt = _dtype(cfg)
    if cfg.positional == "seq":
        rows = sequential_encoding(np.arange(T), cfg.d_model).astype(dt)
        return np.broadcast_to(rows, (B, T, cfg.d_model)).copy()
    if ast_paths is None:
        raise ValidationError("tree positional mode needs edge paths")
    ast_paths = np.asarray(ast_paths, dtype=np.int64)
    if ast_paths.shape != (B, T, cfg.path_len):
        raise ValidationError(
            f"ast_paths must have shape {(B, T, cfg.path_len)}, got {ast_paths.shape}"
        )
    return encode_paths(ast_paths, cfg.d_idx).astype(dt)


# ---------------------------------------------------------------------------
# sublayers


def _ln_fwd(kern, x, g, b):
    B, T, D = x.shape
    y, mean, rstd = kern.layernorm_forward(
        np.ascontiguousarray(x.reshape(-1, D)), g, b, x.dtype.type(1e-5)
    )
    return y.reshape(B, T, D), (x, mean, rstd)


def _ln_bwd(kern, dy, cache, g):
    x, mean, rstd = cache
    B, T, D = x.shape
    dx, dg, db = kern.layernorm_backward(
        np.ascontiguousarray(dy.reshape(-1, D)),
        np.ascontiguousarray(x.reshape(-1, D)),
        g,
        mean,
        rstd,
    )
    return dx.reshape(B, T, D), dg, db


def _linear_bwd(dy, x, w):
    din = x.shape[-1]
    dout = dy.shape[-1]
    dw = x.reshape(-1, din).T @ dy.reshape(-1, dout)
    db = dy.reshape(-1, dout).sum(axis=0)
    dx = dy @ w.T
    return dx, dw, db


def _split_heads(x, n_heads):
    B, T, D = x.shape
    return x.reshape(B, T, n_heads, D // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    B, H, T, dk = x.shape
    return x.transpose(0, 2, 1, 3).reshape(B, T, H * dk)


def _attn_fwd(kern, p, prefix, q_in, kv_in, add_mask, n_heads):
    q = q_in @ p[f"{prefix}.wq"] + p[f"{prefix}.qb"]
    k = kv_in @ p[f"{prefix}.wk"] + p[f"{prefix}.kb"]
    v = kv_in @ p[f"{prefix}.wv"] + p[f"{prefix}.vb"]
    qh, kh, vh = (_split_heads(a, n_heads) for a in (q, k, v))
    scale = 1.0 / math.sqrt(qh.shape[-1])
    scores = qh @ kh.transpose(0, 1, 3, 2) * scale + add_mask
    B, H, Tq, Tk = scores.shape
    attn = kern.softmax_rows(np.ascontiguousarray(scores.reshape(-1, Tk))).reshape(
        B, H, Tq, Tk
    )
    merged = _merge_heads(attn @ vh)
    out = merged @ p[f"{prefix}.wo"] + p[f"{prefix}.ob"]
    cache = (q_in, kv_in, qh, kh, vh, attn, merged, scale)
    return out, cache


def _attn_bwd(kern, p, grads, prefix, dout, cache, n_heads):
    q_in, kv_in, qh, kh, vh, attn, merged, scale = cache
    dmerged, dwo, dbo = _linear_bwd(dout, merged, p[f"{prefix}.wo"])
    grads[f"{prefix}.wo"] += dwo
    grads[f"{prefix}.ob"] += dbo
    dctx = _split_heads(dmerged, n_heads)
    dattn = dctx @ vh.transpose(0, 1, 3, 2)
    dvh = attn.transpose(0, 1, 3, 2) @ dctx
    B, H, Tq, Tk = dattn.shape
    dscores = kern.softmax_backward_rows(
        np.ascontiguousarray(dattn.reshape(-1, Tk)),
        np.ascontiguousarray(attn.reshape(-1, Tk)),
    ).reshape(B, H, Tq, Tk)
    dscores *= scale
    dqh = dscores @ kh
    dkh = dscores.transpose(0, 1, 3, 2) @ qh
    dq = _merge_heads(dqh)
    dk = _merge_heads(dkh)
    dv = _merge_heads(dvh)
    dq_in, dwq, dbq = _linear_bwd(dq, q_in, p[f"{prefix}.wq"])
    dkv_k, dwk, dbk = _linear_bwd(dk, kv_in, p[f"{prefix}.wk"])
    dkv_v, dwv, dbv = _linear_bwd(dv, kv_in, p[f"{prefix}.wv"])
    grads[f"{prefix}.wq"] += dwq
    grads[f"{prefix}.qb"] += dbq
    grads[f"{prefix}.wk"] += dwk
    grads[f"{prefix}.kb"] += dbk
    grads[f"{prefix}.wv"] += dwv
    grads[f"{prefix}.vb"] += dbv
    return dq_in, dkv_k + dkv_v


def _ffn_fwd(p, prefix, x):
    pre = x @ p[f"{prefix}.w1"] + p[f"{prefix}.b1"]
    h = np.maximum(pre, 0)
    out = h @ p[f"{prefix}.w2"] + p[f"{prefix}.b2"]
    return out, (x, pre, h)


def _ffn_bwd(p, grads, prefix, dout, cache):
    x, pre, h = cache
    dh, dw2, db2 = _linear_bwd(dout, h, p[f"{prefix}.w2"])
    grads[f"{prefix}.w2"] += dw2
    grads[f"{prefix}.b2"] += db2
    dpre = dh * (pre > 0)
    dx, dw1, db1 = _linear_bwd(dpre, x, p[f"{prefix}.w1"])
    grads[f"{prefix}.w1"] += dw1
    grads[f"{prefix}.b1"] += db1
    return dx


# ---------------------------------------------------------------------------
# full forward / backward


def _masks(cfg, nl_ids, ast_ids, src_pad, tgt_pad):
    dt = _dtype(cfg)
    B, S = nl_ids.shape
    T = ast_ids.shape[1]
    src_key = np.where(nl_ids == src_pad, dt(NEG), dt(0.0))  # (B, S)
    enc_mask = src_key[:, None, None, :]  # (B,1,1,S)
    causal = np.triu(np.full((T, T), NEG, dtype=dt), k=1)
    tgt_key = np.where(ast_ids == tgt_pad, dt(NEG), dt(0.0))
    dec_mask = causal[None, None, :, :] + tgt_key[:, None, None, :]
    cross_mask = enc_mask
    return enc_mask, dec_mask, cross_mask


def _forward(cfg, params, kern, nl_ids, ast_ids, ast_paths, src_pad, tgt_pad, pos_rows=None):
    nl_ids = np.asarray(nl_ids, dtype=np.int64)
    ast_ids = np.asarray(ast_ids, dtype=np.int64)
    if nl_ids.ndim != 2 or ast_ids.ndim != 2 or nl_ids.shape[0] != ast_ids.shape[0]:
        raise ValidationError("nl_ids and ast_ids must be parallel 2-D id arrays")
    enc_mask, dec_mask, cross_mask = _masks(cfg, nl_ids, ast_ids, src_pad, tgt_pad)
    dt = _dtype(cfg)
    scale = math.sqrt(cfg.d_model)

    cache: dict = {"nl_ids": nl_ids, "ast_ids": ast_ids}
    S = nl_ids.shape[1]
    x = params["enc.embed"][nl_ids] * dt(scale)
    x = x + sequential_encoding(np.arange(S), cfg.d_model).astype(dt)
    enc_layers = []
    for i in range(cfg.n_enc_layers):
        pre = f"enc.{i}"
        a_in, ln1 = _ln_fwd(kern, x, params[f"{pre}.ln1.g"], params[f"{pre}.ln1.b"])
        attn, attn_c = _attn_fwd(kern, params, f"{pre}.self", a_in, a_in, enc_mask, cfg.n_heads)
        x = x + attn
        f_in, ln2 = _ln_fwd(kern, x, params[f"{pre}.ln2.g"], params[f"{pre}.ln2.b"])
        ff, ff_c = _ffn_fwd(params, f"{pre}.ff", f_in)
        x = x + ff
        enc_layers.append((ln1, attn_c, ln2, ff_c))
    enc_out, enc_lnf = _ln_fwd(kern, x, params["enc.lnf.g"], params["enc.lnf.b"])
    cache.update(enc_layers=enc_layers, enc_lnf=enc_lnf, enc_out=enc_out)

    if pos_rows is not None:
        pos = np.asarray(pos_rows, dtype=dt)
        if pos.shape != ast_ids.shape + (cfg.d_model,):
            raise ValidationError(
                f"pos_rows must have shape {ast_ids.shape + (cfg.d_model,)}, got {pos.shape}"
            )
    else:
        pos = _batch_pos_rows(cfg, ast_ids, ast_paths)
    y = params["dec.embed"][ast_ids] * dt(scale) + pos
    dec_layers = []
    for i in range(cfg.n_dec_layers):
        pre = f"dec.{i}"
        a_in, ln1 = _ln_fwd(kern, y, params[f"{pre}.ln1.g"], params[f"{pre}.ln1.b"])
        sa, sa_c = _attn_fwd(kern, params, f"{pre}.self", a_in, a_in, dec_mask, cfg.n_heads)
        y = y + sa
        c_in, ln2 = _ln_fwd(kern, y, params[f"{pre}.ln2.g"], params[f"{pre}.ln2.b"])
        ca, ca_c = _attn_fwd(
            kern, params, f"{pre}.cross", c_in, enc_out, cross_mask, cfg.n_heads
        )
        y = y + ca
        f_in, ln3 = _ln_fwd(kern, y, params[f"{pre}.ln3.g"], params[f"{pre}.ln3.b"])
        ff, ff_c = _ffn_fwd(params, f"{pre}.ff", f_in)
        y = y + ff
        dec_layers.append((ln1, sa_c, ln2, ca_c, ln3, ff_c))
    dec_out, dec_lnf = _ln_fwd(kern, y, params["dec.lnf.g"], params["dec.lnf.b"])
    cache.update(dec_layers=dec_layers, dec_lnf=dec_lnf, dec_out=dec_out)

    logits = dec_out @ params["out.w"] + params["out.b"]
    B, T, V = logits.shape
    logp = kern.log_softmax_rows(np.ascontiguousarray(logits.reshape(-1, V))).reshape(
        B, T, V
    )
    return logp, cache


def forward(
    cfg: ModelConfig,
    params: dict,
    nl_ids,
    ast_ids,
    ast_paths=None,
    *,
    src_pad: int,
    tgt_pad: int,
    kern=None,
) -> np.ndarray:
    """Next-token log-probabilities, shape (batch, T, tgt_vocab)."""
    logp, _ = _forward(
        cfg, params, kern or default_kernels, nl_ids, ast_ids, ast_paths, src_pad, tgt_pad
    )
    return logp


def _backward(cfg, params, kern, cache, dlogits):
    grads = {name: np.zeros_like(arr) for name, arr in params.items()}
    dt = _dtype(cfg)
    scale = dt(math.sqrt(cfg.d_model))

    dec_out = cache["dec_out"]
    ddec, dwout, dbout = _linear_bwd(dlogits, dec_out, params["out.w"])
    grads["out.w"] += dwout
    grads["out.b"] += dbout
    dy, dg, db = _ln_bwd(kern, ddec, cache["dec_lnf"], params["dec.lnf.g"])
    grads["dec.lnf.g"] += dg
    grads["dec.lnf.b"] += db

    denc_out = np.zeros_like(cache["enc_out"])
    for i in reversed(range(cfg.n_dec_layers)):
        pre = f"dec.{i}"
        ln1, sa_c, ln2, ca_c, ln3, ff_c = cache["dec_layers"][i]
        dff_in = _ffn_bwd(params, grads, f"{pre}.ff", dy, ff_c)
        dres, dg, db = _ln_bwd(kern, dff_in, ln3, params[f"{pre}.ln3.g"])
        grads[f"{pre}.ln3.g"] += dg
        grads[f"{pre}.ln3.b"] += db
        dy = dy + dres
        dq_in, dkv = _attn_bwd(kern, params, grads, f"{pre}.cross", dy, ca_c, cfg.n_heads)
        denc_out += dkv
        dres, dg, db = _ln_bwd(kern, dq_in, ln2, params[f"{pre}.ln2.g"])
        grads[f"{pre}.ln2.g"] += dg
        grads[f"{pre}.ln2.b"] += db
        dy = dy + dres
        dsa_q, dsa_kv = _attn_bwd(kern, params, grads, f"{pre}.self", dy, sa_c, cfg.n_heads)
        dres, dg, db = _ln_bwd(kern, dsa_q + dsa_kv, ln1, params[f"{pre}.ln1.g"])
        grads[f"{pre}.ln1.g"] += dg
        grads[f"{pre}.ln1.b"] += db
        dy = dy + dres

    demb = dy * scale
    np.add.at(grads["dec.embed"], cache["ast_ids"].ravel(), demb.reshape(-1, cfg.d_model))

    dx, dg, db = _ln_bwd(kern, denc_out, cache["enc_lnf"], params["enc.lnf.g"])
    grads["enc.lnf.g"] += dg
    grads["enc.lnf.b"] += db
    for i in reversed(range(cfg.n_enc_layers)):
        pre = f"enc.{i}"
        ln1, attn_c, ln2, ff_c = cache["enc_layers"][i]
        dff_in = _ffn_bwd(params, grads, f"{pre}.ff", dx, ff_c)
        dres, dg, db = _ln_bwd(kern, dff_in, ln2, params[f"{pre}.ln2.g"])
        grads[f"{pre}.ln2.g"] += dg
        grads[f"{pre}.ln2.b"] += db
        dx = dx + dres
        da_q, da_kv = _attn_bwd(kern, params, grads, f"{pre}.self", dx, attn_c, cfg.n_heads)
        dres, dg, db = _ln_bwd(kern, da_q + da_kv, ln1, params[f"{pre}.ln1.g"])
        grads[f"{pre}.ln1.g"] += dg
        grads[f"{pre}.ln1.b"] += db
        dx = dx + dres
    demb = dx * scale
    np.add.at(grads["enc.embed"], cache["nl_ids"].ravel(), demb.reshape(-1, cfg.d_model))
    return grads


def loss_and_grads(
    cfg: ModelConfig,
    params: dict,
    nl_ids,
    ast_ids,
    ast_paths=None,
    *,
    src_pad: int,
    tgt_pad: int,
    kern=None,
    want_grads: bool = True,
):
    """Mean next-token NLL over non-pad targets, optionally with grads.

    Position ``t`` is scored against ``ast_ids[:, t+1]``; pad targets
    are ignored.  Raises if every target is pad.
    """
    kern = kern or default_kernels
    logp, cache = _forward(cfg, params, kern, nl_ids, ast_ids, ast_paths, src_pad, tgt_pad)
    ast_ids = cache["ast_ids"]
    B, T, V = logp.shape
    targets = ast_ids[:, 1:]
    valid = targets != tgt_pad
    count = int(valid.sum())
    if count == 0:
        raise ValidationError("batch contains no non-pad targets")
    rows = logp[:, :-1, :]
    picked = np.take_along_axis(rows, targets[..., None], axis=2)[..., 0]
    loss = float(-(picked * valid).sum() / count)
    if not want_grads:
        return loss, None
    dlogits = np.exp(logp)
    onehot_scale = 1.0 / count
    # row t scores target t+1; the final row carries no loss
    dlogits[:, -1, :] = 0
    sub = np.zeros_like(dlogits[:, :-1, :])
    np.put_along_axis(sub, targets[..., None], 1.0, axis=2)
    dlogits[:, :-1, :] -= sub
    dlogits[:, :-1, :] *= valid[..., None]
    dlogits *= dlogits.dtype.type(onehot_scale)
    grads = _backward(cfg, params, kern, cache, dlogits)
    return loss, grads
