# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled reading-density kernels.

Both kernels evaluate  sum_c | sum_p a[c, p] prod_k T_k[p, i_k] |^2  on a
tensor grid, with the per-axis tables T_k[p, i] = G_k(f_i - shift[p, k]).
The innermost loops run along contiguous table rows.  Rows of the first
axis of the 2-d kernel are distributed over OpenMP threads.
"""
import numpy as np
from cython.parallel import parallel, prange
from libc.stdlib cimport free, malloc
from libc.string cimport memset


def density_1d(const double[:, ::1] are, const double[:, ::1] aim,
               const double[:, ::1] t0, int nthreads=1):
    cdef Py_ssize_t nc = are.shape[0], npath = are.shape[1], m0 = t0.shape[1]
    out_arr = np.zeros(m0, dtype=np.float64)
    sr_arr = np.empty(m0, dtype=np.float64)
    si_arr = np.empty(m0, dtype=np.float64)
    cdef double[::1] out = out_arr, sr = sr_arr, si = si_arr
    cdef Py_ssize_t i, c, p
    cdef double cr, ci, w
    with nogil:
        for c in range(nc):
            sr[:] = 0.0
            si[:] = 0.0
            for p in range(npath):
                cr = are[c, p]
                ci = aim[c, p]
                for i in range(m0):
                    w = t0[p, i]
                    sr[i] += cr * w
                    si[i] += ci * w
            for i in range(m0):
                out[i] += sr[i] * sr[i] + si[i] * si[i]
    return out_arr


def density_2d(const double[:, ::1] are, const double[:, ::1] aim,
               const double[:, ::1] t0, const double[:, ::1] t1, int nthreads=1):
    cdef Py_ssize_t nc = are.shape[0], npath = are.shape[1]
    cdef Py_ssize_t m0 = t0.shape[1], m1 = t1.shape[1]
    out_arr = np.zeros((m0, m1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, c, p
    cdef double g, cr, ci, w
    cdef double *sr
    cdef double *si
    with nogil, parallel(num_threads=nthreads):
        # per-thread accumulators for one output row
        sr = <double *> malloc(m1 * sizeof(double))
        si = <double *> malloc(m1 * sizeof(double))
        for i in prange(m0, schedule="static"):
            for c in range(nc):
                memset(sr, 0, m1 * sizeof(double))
                memset(si, 0, m1 * sizeof(double))
                for p in range(npath):
                    g = t0[p, i]
                    if g == 0.0:
                        continue
                    cr = are[c, p] * g
                    ci = aim[c, p] * g
                    for j in range(m1):
                        w = t1[p, j]
                        sr[j] = sr[j] + cr * w
                        si[j] = si[j] + ci * w
                for j in range(m1):
                    out[i, j] += sr[j] * sr[j] + si[j] * si[j]
        free(sr)
        free(si)
    return out_arr
