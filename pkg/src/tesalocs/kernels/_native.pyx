# cython: boundscheck=False, wraparound=False, cdivision=True
"""C implementation of the chain-contraction kernels (sampling and evaluation).

Mirrors the NumPy backend in ``_python.py``: identical signatures, identical
max-normalization scheme.  The batched weight matrices reuse the same BLAS
matmul as the fallback; the per-sample scans, gathers and interface updates
run as C loops, so results agree with the fallback to floating-point
round-off.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log

cnp.import_array()

NAME = "native"


def log_eval_many(cores, indices):
    """Log of the chain value at each row of ``indices``; -inf where the value is 0."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t d = len(cores)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logs = np.zeros(k)
    cdef Py_ssize_t r_max = 1
    for core in cores:
        r_max = max(r_max, (<object> core).shape[0], (<object> core).shape[2])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.empty(r_max)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt = np.empty(r_max)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] core_view
    cdef Py_ssize_t s, i, a, b, r0, r1, n
    cdef double acc, m
    cdef bint dead

    for s in range(k):
        v[0] = 1.0
        logs[s] = 0.0
        dead = False
        for i in range(d):
            core_view = cores[i]
            r0 = core_view.shape[0]
            r1 = core_view.shape[2]
            n = idx[s, i]
            m = 0.0
            for b in range(r1):
                acc = 0.0
                for a in range(r0):
                    acc += v[a] * core_view[a, n, b]
                nxt[b] = acc
                if acc > m:
                    m = acc
            if m <= 0.0:
                dead = True
                for b in range(r1):
                    v[b] = 1.0
            else:
                if not dead:
                    logs[s] += log(m)
                for b in range(r1):
                    v[b] = nxt[b] / m
        if dead:
            logs[s] = -INFINITY
    return logs


def sample_indices(cores, suffix_units, uniforms):
    """Sequential conditional draws, one uniform variate per (sample, mode).

    Returns (indices, log_conditionals, degenerate_mode_count); see the
    NumPy backend for the contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t k = u.shape[0]
    cdef Py_ssize_t d = u.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((k, d), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] log_cond = np.zeros(k)
    cdef Py_ssize_t r_max = 1
    for core in cores:
        r_max = max(r_max, (<object> core).shape[0], (<object> core).shape[2])
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ones((k, 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_next = np.empty((k, r_max))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w
    cdef cnp.ndarray[cnp.float64_t, ndim=3] core_view
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_view
    cdef Py_ssize_t s, i, a, b, m_idx, r0, r1, n_i, chosen
    cdef double acc, total, target, running, mx, weight
    cdef long degenerate = 0

    for i in range(d):
        core_view = cores[i]
        r0 = core_view.shape[0]
        r1 = core_view.shape[2]
        n_i = core_view.shape[1]
        table = np.ascontiguousarray(cores[i] @ suffix_units[i + 1])
        w = v @ table  # (k, n_i) conditional weights, BLAS
        v_view = v
        for s in range(k):
            total = 0.0
            for m_idx in range(n_i):
                if w[s, m_idx] > 0.0:
                    total += w[s, m_idx]
            if total <= 0.0:
                degenerate += 1
                target = u[s, i] * n_i
                chosen = <Py_ssize_t> target
                if chosen > n_i - 1:
                    chosen = n_i - 1
                weight = 1.0
                total = <double> n_i
            else:
                target = u[s, i] * total
                running = 0.0
                chosen = n_i - 1
                weight = w[s, n_i - 1]
                for m_idx in range(n_i):
                    if w[s, m_idx] > 0.0:
                        running += w[s, m_idx]
                        if running > target:
                            chosen = m_idx
                            weight = w[s, m_idx]
                            break
            out[s, i] = chosen
            log_cond[s] += log(weight / total)
            mx = 0.0
            for b in range(r1):
                acc = 0.0
                for a in range(r0):
                    acc += v_view[s, a] * core_view[a, chosen, b]
                v_next[s, b] = acc
                if acc > mx:
                    mx = acc
            if mx <= 0.0:
                mx = 1.0
            for b in range(r1):
                v_next[s, b] /= mx
        # must copy: v_next is reused as the scratch buffer of the next mode
        v = v_next[:, :r1].copy()
    return out, log_cond, degenerate
