"""NumPy implementation of the chain-contraction kernels.

All kernels work on a list of non-negative 3-way cores with shapes
(R[i-1], N[i], R[i]) and keep interface vectors max-normalized so that
chains of arbitrary depth neither overflow nor underflow.
"""

import numpy as np

NAME = "python"


def log_eval_many(cores, indices):
    """Log of the chain value at each row of ``indices``; -inf where the value is 0."""
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    k = indices.shape[0]
    v = np.ones((k, 1))
    logs = np.zeros(k)
    for i, core in enumerate(cores):
        slices = core[:, indices[:, i], :]  # (r, k, q)
        v = np.einsum("kr,rkq->kq", v, slices)
        m = v.max(axis=1)
        alive = m > 0.0
        logs[~alive] = -np.inf
        m[~alive] = 1.0
        v[~alive] = 1.0
        logs[alive] += np.log(m[alive])
        v /= m[:, None]
    return logs


def sample_indices(cores, suffix_units, uniforms):
    """Sequential conditional draws, one uniform variate per (sample, mode).

    Returns (indices, log_conditionals, degenerate_mode_count).  The log
    conditional of a sample is the log of the product of its per-mode
    normalized weights, i.e. the log of its exact sampling probability.
    """
    uniforms = np.asarray(uniforms)
    k, d = uniforms.shape
    v = np.ones((k, 1))
    out = np.empty((k, d), dtype=np.int64)
    log_cond = np.zeros(k)
    rows = np.arange(k)
    degenerate = 0
    for i, core in enumerate(cores):
        n_i = core.shape[1]
        table = core @ suffix_units[i + 1]  # (r, N_i)
        w = v @ table  # (k, N_i)
        np.clip(w, 0.0, None, out=w)
        total = w.sum(axis=1)
        bad = total <= 0.0
        if bad.any():
            degenerate += int(bad.sum())
            w[bad] = 1.0
            total[bad] = float(n_i)
        cdf = np.cumsum(w, axis=1)
        targets = uniforms[:, i] * total
        chosen = (cdf <= targets[:, None]).sum(axis=1)
        np.clip(chosen, 0, n_i - 1, out=chosen)
        out[:, i] = chosen
        log_cond += np.log(w[rows, chosen] / total)
        v = np.einsum("kr,rkq->kq", v, core[:, chosen, :])
        m = v.max(axis=1)
        m[m <= 0.0] = 1.0
        v /= m[:, None]
    return out, log_cond, degenerate
