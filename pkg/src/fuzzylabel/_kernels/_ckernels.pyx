# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Mirrors ``_pykernels`` function by function. Distances and neighbor
selection are plain loops; the propagation update calls BLAS ``dgemm``
through scipy's Cython bindings.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


def pairwise_sq_dists(A, B):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], dim = a.shape[1]
    if b.shape[1] != dim:
        raise ValueError("dimension mismatch")
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for t in range(dim):
                    diff = a[i, t] - b[j, t]
                    acc = acc + diff * diff
                out[i, j] = acc
    return out_arr


def knn_indices(dist, Py_ssize_t k):
    cdef const double[:, ::1] d = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], m = d.shape[1]
    if k < 1 or k > m:
        raise ValueError(f"k must be in [1, {m}], got {k}")
    out_arr = np.empty((n, k), dtype=np.intp)
    cdef Py_ssize_t[:, ::1] out = out_arr
    buf_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i, j, pos, filled
    cdef double v
    with nogil:
        for i in range(n):
            filled = 0
            for j in range(m):
                v = d[i, j]
                if filled == k and not (v < buf[k - 1]):
                    continue
                # insertion after every entry <= v keeps lower indices first on ties
                pos = filled if filled < k else k - 1
                while pos > 0 and buf[pos - 1] > v:
                    buf[pos] = buf[pos - 1]
                    out[i, pos] = out[i, pos - 1]
                    pos -= 1
                buf[pos] = v
                out[i, pos] = j
                if filled < k:
                    filled += 1
    return out_arr


def fcm_memberships(sq_dist, double m):
    cdef const double[:, ::1] d = np.ascontiguousarray(sq_dist, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], k = d.shape[1]
    out_arr = np.zeros((n, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double expo = 1.0 / (m - 1.0)
    cdef Py_ssize_t i, j, hit
    cdef double dmin, total, r
    with nogil:
        for i in range(n):
            hit = -1
            dmin = INFINITY
            for j in range(k):
                if d[i, j] <= 0.0:
                    hit = j
                    break
                if d[i, j] < dmin:
                    dmin = d[i, j]
            if hit >= 0:
                out[i, hit] = 1.0
                continue
            total = 0.0
            for j in range(k):
                r = pow(dmin / d[i, j], expo)
                out[i, j] = r
                total = total + r
            for j in range(k):
                out[i, j] = out[i, j] / total
    return out_arr


def propagate(P, Y, double alpha, double tol, Py_ssize_t max_iter):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    y_arr = np.ascontiguousarray(Y, dtype=np.float64)
    cdef const double[:, ::1] y = y_arr
    cdef int n = <int>y.shape[0], lab = <int>y.shape[1]
    if p.shape[0] != n or p.shape[1] != n:
        raise ValueError("propagation matrix shape does not match labels")
    u_arr = y_arr.copy()
    new_arr = np.empty_like(y_arr)
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] new = new_arr
    cdef double[:, ::1] tmp
    cdef double beta = 1.0, keep = 1.0 - alpha, delta = INFINITY, diff
    cdef Py_ssize_t it = 0, i, j
    cdef char trans = b'N'
    if n == 0 or lab == 0:
        return u_arr, 0, 0.0
    while it < max_iter:
        for i in range(n):
            for j in range(lab):
                new[i, j] = keep * y[i, j]
        # row-major (P @ U) seen as column-major U^T @ P^T
        dgemm(&trans, &trans, &lab, &n, &n, &alpha, &u[0, 0], &lab,
              <double*>&p[0, 0], &n, &beta, &new[0, 0], &lab)
        delta = 0.0
        for i in range(n):
            for j in range(lab):
                diff = fabs(new[i, j] - u[i, j])
                if diff > delta:
                    delta = diff
        tmp = u
        u = new
        new = tmp
        u_arr, new_arr = new_arr, u_arr
        it += 1
        if delta < tol:
            break
    return u_arr, it, delta
