"""Compiled inner loops for training and evaluation.

The network is passed as a flat parameter vector plus its layer sizes,
with the same layout as :mod:`cann.mlp`.  Each pair update computes the
full gradient and applies ``theta -= alpha * grad`` before moving on, so
the update sequence matches the plain-numpy path in :mod:`cann.mlp`.
"""
import math

import numpy as np
from numba import njit

# status codes returned by train_level
RUNNING = 0
STOPPED_AT_TOL = 1
DIVERGED = 2


@njit(cache=True)
def _offsets(sizes):
    L = sizes.shape[0] - 1
    w_off = np.empty(L, dtype=np.int64)
    b_off = np.empty(L, dtype=np.int64)
    a_off = np.empty(L + 1, dtype=np.int64)
    pos = 0
    for i in range(L):
        w_off[i] = pos
        pos += sizes[i + 1] * sizes[i]
        b_off[i] = pos
        pos += sizes[i + 1]
    apos = 0
    for i in range(L + 1):
        a_off[i] = apos
        apos += sizes[i]
    return w_off, b_off, a_off, apos


@njit(cache=True)
def _forward(params, sizes, w_off, b_off, a_off, x, acts):
    L = sizes.shape[0] - 1
    for k in range(sizes[0]):
        acts[k] = x[k]
    for i in range(L):
        n_in = sizes[i]
        n_out = sizes[i + 1]
        ai = a_off[i]
        ao = a_off[i + 1]
        wo = w_off[i]
        bo = b_off[i]
        for r in range(n_out):
            s = params[bo + r]
            row = wo + r * n_in
            for c in range(n_in):
                s += params[row + c] * acts[ai + c]
            if i < L - 1:
                s = math.tanh(s)
            acts[ao + r] = s
    return acts[a_off[L]]


@njit(cache=True)
def forward_rows(params, sizes, X):
    w_off, b_off, a_off, n_act = _offsets(sizes)
    acts = np.empty(n_act)
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        out[r] = _forward(params, sizes, w_off, b_off, a_off, X[r], acts)
    return out


@njit(cache=True)
def _sgd_pair(params, sizes, w_off, b_off, a_off, x, center, target, alpha,
              acts, delta, delta_prev, grad):
    """One stochastic gradient step on a single (input, target) pair; returns the loss."""
    L = sizes.shape[0] - 1
    y = _forward(params, sizes, w_off, b_off, a_off, x, acts)
    r = center + y - target
    loss = r * r
    g = 2.0 * r
    delta[0] = g
    for i in range(L - 1, -1, -1):
        n_in = sizes[i]
        n_out = sizes[i + 1]
        ai = a_off[i]
        wo = w_off[i]
        bo = b_off[i]
        for c in range(n_in):
            delta_prev[c] = 0.0
        for o in range(n_out):
            d = delta[o]
            grad[bo + o] = d
            row = wo + o * n_in
            for c in range(n_in):
                grad[row + c] = d * acts[ai + c]
                delta_prev[c] += params[row + c] * d
        if i > 0:
            for c in range(n_in):
                a = acts[ai + c]
                delta[c] = delta_prev[c] * (1.0 - a * a)
    for k in range(params.shape[0]):
        params[k] -= alpha * grad[k]
    return loss


@njit(cache=True)
def level_error(params, sizes, X, centers, targets, dx):
    w_off, b_off, a_off, n_act = _offsets(sizes)
    acts = np.empty(n_act)
    s = 0.0
    for j in range(X.shape[0]):
        y = _forward(params, sizes, w_off, b_off, a_off, X[j], acts)
        r = centers[j] + y - targets[j]
        s += r * r
    return s * dx


@njit(cache=True)
def train_level(params, sizes, X, centers, targets, alpha, K, dx, stop_tol,
                check_stop, trace, err_from=0):
    """Run up to K sweeps over the rows of ``X`` (normally the cells of one level).

    Writes the squared L2 error of rows ``err_from:`` after each sweep into
    ``trace`` and returns ``(sweeps_run, status, bad_sweep, bad_row)``; the
    last two are -1 unless the run diverged.
    """
    w_off, b_off, a_off, n_act = _offsets(sizes)
    max_w = 0
    for i in range(sizes.shape[0]):
        if sizes[i] > max_w:
            max_w = sizes[i]
    acts = np.empty(n_act)
    delta = np.empty(max_w)
    delta_prev = np.empty(max_w)
    grad = np.empty(params.shape[0])
    J = X.shape[0]
    for it in range(K):
        for j in range(J):
            loss = _sgd_pair(params, sizes, w_off, b_off, a_off, X[j], centers[j],
                             targets[j], alpha, acts, delta, delta_prev, grad)
            if not math.isfinite(loss):
                return it, DIVERGED, it, j
        for k in range(params.shape[0]):
            if not math.isfinite(params[k]):
                return it, DIVERGED, it, J - 1
        s = 0.0
        for j in range(err_from, J):
            y = _forward(params, sizes, w_off, b_off, a_off, X[j], acts)
            r = centers[j] + y - targets[j]
            s += r * r
        err = s * dx
        trace[it] = err
        if not math.isfinite(err):
            return it + 1, DIVERGED, it, -1
        if check_stop and err <= stop_tol:
            return it + 1, STOPPED_AT_TOL, -1, -1
    return K, RUNNING, -1, -1
