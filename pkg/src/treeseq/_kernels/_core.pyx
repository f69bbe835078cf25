# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the fallback kernels.

One pass per row, no temporaries.  Fused types cover float32/float64;
dispatch happens on the argument dtype.  Contracts match
``treeseq._kernels.fallback`` exactly.
"""

import numpy as np

cimport cython
from libc.math cimport exp, expf, log, logf, sqrt, sqrtf

ctypedef fused floating:
    float
    double

NAME = "cython"


# Single-precision math for the float32 specialization; the branch is
# resolved when the fused type is instantiated, not at runtime.

cdef inline floating _exp(floating x) noexcept nogil:
    if floating is float:
        return expf(x)
    else:
        return exp(x)


cdef inline floating _log(floating x) noexcept nogil:
    if floating is float:
        return logf(x)
    else:
        return log(x)


cdef inline floating _sqrt(floating x) noexcept nogil:
    if floating is float:
        return sqrtf(x)
    else:
        return sqrt(x)


def softmax_rows(floating[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], w = x.shape[1]
    out_arr = np.empty((n, w), dtype=np.asarray(x).dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef floating m, s
    for i in range(n):
        m = x[i, 0]
        for j in range(1, w):
            if x[i, j] > m:
                m = x[i, j]
        s = 0
        for j in range(w):
            out[i, j] = _exp(x[i, j] - m)
            s += out[i, j]
        for j in range(w):
            out[i, j] /= s
    return out_arr


def log_softmax_rows(floating[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], w = x.shape[1]
    out_arr = np.empty((n, w), dtype=np.asarray(x).dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef floating m, s, lse
    for i in range(n):
        m = x[i, 0]
        for j in range(1, w):
            if x[i, j] > m:
                m = x[i, j]
        s = 0
        for j in range(w):
            s += _exp(x[i, j] - m)
        lse = _log(s)
        for j in range(w):
            out[i, j] = x[i, j] - m - lse
    return out_arr


def softmax_backward_rows(floating[:, ::1] dy, floating[:, ::1] y):
    cdef Py_ssize_t n = dy.shape[0], w = dy.shape[1]
    out_arr = np.empty((n, w), dtype=np.asarray(dy).dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef floating inner
    for i in range(n):
        inner = 0
        for j in range(w):
            inner += dy[i, j] * y[i, j]
        for j in range(w):
            out[i, j] = y[i, j] * (dy[i, j] - inner)
    return out_arr


def layernorm_forward(floating[:, ::1] x, floating[::1] gamma, floating[::1] beta,
                      floating eps):
    cdef Py_ssize_t n = x.shape[0], w = x.shape[1]
    dtype = np.asarray(x).dtype
    y_arr = np.empty((n, w), dtype=dtype)
    mean_arr = np.empty(n, dtype=dtype)
    rstd_arr = np.empty(n, dtype=dtype)
    cdef floating[:, ::1] y = y_arr
    cdef floating[::1] mean = mean_arr
    cdef floating[::1] rstd = rstd_arr
    cdef Py_ssize_t i, j
    cdef floating mu, var, d, r
    for i in range(n):
        mu = 0
        for j in range(w):
            mu += x[i, j]
        mu /= w
        var = 0
        for j in range(w):
            d = x[i, j] - mu
            var += d * d
        var /= w
        r = 1 / _sqrt(var + eps)
        mean[i] = mu
        rstd[i] = r
        for j in range(w):
            y[i, j] = (x[i, j] - mu) * r * gamma[j] + beta[j]
    return y_arr, mean_arr, rstd_arr


def layernorm_backward(floating[:, ::1] dy, floating[:, ::1] x, floating[::1] gamma,
                       floating[::1] mean, floating[::1] rstd):
    cdef Py_ssize_t n = dy.shape[0], w = dy.shape[1]
    dtype = np.asarray(dy).dtype
    dx_arr = np.empty((n, w), dtype=dtype)
    dgamma_arr = np.zeros(w, dtype=dtype)
    dbeta_arr = np.zeros(w, dtype=dtype)
    cdef floating[:, ::1] dx = dx_arr
    cdef floating[::1] dgamma = dgamma_arr
    cdef floating[::1] dbeta = dbeta_arr
    cdef Py_ssize_t i, j
    cdef floating xhat, dxhat, m1, m2, r
    for i in range(n):
        r = rstd[i]
        m1 = 0
        m2 = 0
        for j in range(w):
            xhat = (x[i, j] - mean[i]) * r
            dxhat = dy[i, j] * gamma[j]
            m1 += dxhat
            m2 += dxhat * xhat
            dgamma[j] += dy[i, j] * xhat
            dbeta[j] += dy[i, j]
        m1 /= w
        m2 /= w
        for j in range(w):
            xhat = (x[i, j] - mean[i]) * r
            dxhat = dy[i, j] * gamma[j]
            dx[i, j] = r * (dxhat - m1 - xhat * m2)
    return dx_arr, dgamma_arr, dbeta_arr


def adam_step(floating[::1] param, floating[::1] grad, floating[::1] m,
              floating[::1] v, floating lr, floating beta1, floating beta2,
              floating eps, int t):
    cdef Py_ssize_t n = param.shape[0]
    cdef Py_ssize_t i
    cdef floating c1 = 1 - beta1 ** t
    cdef floating c2 = 1 - beta2 ** t
    cdef floating g
    for i in range(n):
        g = grad[i]
        m[i] = beta1 * m[i] + (1 - beta1) * g
        v[i] = beta2 * v[i] + (1 - beta2) * g * g
        param[i] -= lr * (m[i] / c1) / (_sqrt(v[i] / c2) + eps)
