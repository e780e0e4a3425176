# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels; see _kernels_py for the reference semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport lgamma

cnp.import_array()

COMPILED = True


def accumulate_layer(const cnp.int32_t[:, ::1] hists, const cnp.int32_t[::1] succs,
                     const cnp.int64_t[::1] counts, const cnp.int32_t[::1] labels,
                     int n_labels, cnp.int64_t[::1] out):
    cdef Py_ssize_t e, c
    cdef Py_ssize_t n_entries = succs.shape[0]
    cdef Py_ssize_t width = hists.shape[1]
    cdef cnp.int64_t key
    for e in range(n_entries):
        key = 0
        for c in range(width):
            key = key * n_labels + labels[hists[e, c]]
        key = key * n_labels + labels[succs[e]]
        out[key] += counts[e]


def layer_evidence(const cnp.int64_t[::1] table, int n_labels, int hist_len,
                   double default_size, object succ_sizes=None):
    cdef Py_ssize_t r, c
    cdef Py_ssize_t rows = table.shape[0] // n_labels
    cdef cnp.int64_t cnt, total
    cdef double acc, s
    cdef double out = 0.0
    cdef bint per_last = succ_sizes is not None and hist_len > 0
    cdef const cnp.int64_t[::1] sizes
    if per_last:
        sizes = np.ascontiguousarray(succ_sizes, dtype=np.int64)
    for r in range(rows):
        total = 0
        acc = 0.0
        for c in range(n_labels):
            cnt = table[r * n_labels + c]
            if cnt > 0:
                total += cnt
                acc += lgamma(cnt + 1.0)
        if total > 0:
            s = <double>sizes[r % n_labels] if per_last else default_size
            out += acc + lgamma(s) - lgamma(s + total)
    return out
