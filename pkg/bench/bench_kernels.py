"""Benchmark the compiled kernels against the numpy fallback.

Times each hot kernel on training-shaped inputs, then a full forward +
backward + optimizer step on a small model, with both backends. Run from
the repo root after an editable install:

    python bench/bench_kernels.py [--repeats 30]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from treeseq._kernels import available_backends, get_backend
from treeseq.model import Adam, ModelConfig, init_params
from treeseq.model.transformer import loss_and_grads


def _time(fn, repeats: int) -> float:
    fn()  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ops(kern, dtype, repeats: int) -> dict[str, float]:
    rng = np.random.default_rng(0)
    rows = np.ascontiguousarray(rng.standard_normal((2048, 256)), dtype=dtype)
    g = np.ascontiguousarray(rng.standard_normal((64, 256)), dtype=dtype)
    gamma = np.ones(256, dtype=dtype)
    beta = np.zeros(256, dtype=dtype)
    eps = dtype(1e-5)

    p = rng.standard_normal(200_000).astype(dtype)
    grad = rng.standard_normal(200_000).astype(dtype)
    m = np.zeros_like(p)
    v = np.zeros_like(p)

    sm = kern.softmax_rows(rows)
    y, mean, rstd = kern.layernorm_forward(rows[:64], gamma, beta, eps)
    out = {}
    out["softmax"] = _time(lambda: kern.softmax_rows(rows), repeats)
    out["log_softmax"] = _time(lambda: kern.log_softmax_rows(rows), repeats)
    out["softmax_bwd"] = _time(lambda: kern.softmax_backward_rows(sm, rows), repeats)
    out["layernorm_fwd"] = _time(lambda: kern.layernorm_forward(rows[:64], gamma, beta, eps), repeats)
    out["layernorm_bwd"] = _time(
        lambda: kern.layernorm_backward(g, rows[:64], gamma, mean, rstd), repeats
    )
    out["adam_step"] = _time(
        lambda: kern.adam_step(p, grad, m, v, dtype(1e-4), dtype(0.9), dtype(0.999), dtype(1e-8), 5),
        repeats,
    )
    return out


def bench_train_step(kern, repeats: int) -> float:
    cfg = ModelConfig(src_vocab=90, tgt_vocab=120)
    params = init_params(cfg, seed=0)
    opt = Adam(params, kern=kern)
    rng = np.random.default_rng(1)
    nl = rng.integers(3, 90, size=(15, 12))
    ast = rng.integers(3, 120, size=(15, 20))
    paths = np.zeros((15, 20, cfg.path_len), dtype=np.int64)
    paths[:, :, 0] = rng.integers(1, 4, size=(15, 20))

    def step():
        loss, grads = loss_and_grads(cfg, params, nl, ast, paths, src_pad=0, tgt_pad=0, kern=kern)
        opt.step(grads)

    return _time(step, repeats)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=30)
    args = ap.parse_args()

    backends = {name: get_backend(name) for name in available_backends()}
    if len(backends) < 2:
        print(f"only {list(backends)} available; build the extension to compare")

    results: dict[str, dict[str, float]] = {}
    for name, kern in backends.items():
        for dtype in (np.float32, np.float64):
            col = f"{name}/{np.dtype(dtype).name}"
            results[col] = bench_ops(kern, dtype, args.repeats)
        results[f"{name}/train_step"] = {"full_step": bench_train_step(kern, max(3, args.repeats // 5))}

    ops = ["softmax", "log_softmax", "softmax_bwd", "layernorm_fwd", "layernorm_bwd", "adam_step", "full_step"]
    cols = list(results)
    width = max(len(c) for c in cols) + 2
    print(f"{'op':<16}" + "".join(f"{c:>{width}}" for c in cols))
    for op in ops:
        cells = []
        for c in cols:
            t = results[c].get(op)
            cells.append(f"{t * 1e3:>{width - 3}.3f} ms" if t is not None else " " * (width - 3) + "  -")
        print(f"{op:<16}" + "".join(cells))

    if "cython/float32" in results and "numpy/float32" in results:
        speed = {
            op: results["numpy/float32"][op] / results["cython/float32"][op]
            for op in ops
            if op in results["cython/float32"]
        }
        print("\nspeedup (numpy/cython, float32): " + "  ".join(f"{k}={v:.2f}x" for k, v in speed.items()))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
