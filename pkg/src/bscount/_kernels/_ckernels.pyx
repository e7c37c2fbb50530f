# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, sin, sqrt, M_PI

cnp.import_array()

cdef double LANCZOS_G = 7.0
cdef double[9] LANCZOS_COEFFS = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]


cdef double _gamma(double x) nogil:
    cdef double acc, t
    cdef int i
    if x < 0.5:
        return M_PI / (sin(M_PI * x) * _gamma(1.0 - x))
    x -= 1.0
    acc = LANCZOS_COEFFS[0]
    for i in range(1, 9):
        acc += LANCZOS_COEFFS[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    return sqrt(2.0 * M_PI) * pow(t, x + 0.5) * exp(-t) * acc


def lanczos_gamma(double x):
    return _gamma(x)


cdef Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t i) nogil:
    cdef Py_ssize_t root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


def cluster_labels(z, double tol):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(
        np.asarray(z, dtype=np.complex128).ravel())
    cdef Py_ssize_t n = zz.shape[0]
    cdef Py_ssize_t[::1] order = np.argsort(zz.real, kind="stable").astype(np.intp)
    cdef double[::1] re = np.ascontiguousarray(zz.real)
    cdef double[::1] im = np.ascontiguousarray(zz.imag)
    cdef Py_ssize_t[::1] parent = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t a, b, i, j, ri, rj
    cdef double dr, di
    with nogil:
        for a in range(n):
            i = order[a]
            b = a + 1
            while b < n and re[order[b]] - re[i] <= tol:
                j = order[b]
                dr = re[i] - re[j]
                di = im[i] - im[j]
                if sqrt(dr * dr + di * di) <= tol:
                    ri = _find(parent, i)
                    rj = _find(parent, j)
                    if ri != rj:
                        if ri < rj:
                            parent[rj] = ri
                        else:
                            parent[ri] = rj
                b += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t[::1] remap = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t count = 0
    for i in range(n):
        ri = _find(parent, i)
        if remap[ri] < 0:
            remap[ri] = count
            count += 1
        labels[i] = remap[ri]
    return labels


def wedge_coefficients(vectors, perms, signs):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] vec = np.ascontiguousarray(vectors, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] pm = np.ascontiguousarray(perms, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sg = np.ascontiguousarray(signs, dtype=np.float64)
    cdef Py_ssize_t n_vec = vec.shape[0], dim = vec.shape[1], n_perm = pm.shape[0]
    cdef Py_ssize_t total = dim ** n_vec
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(total, dtype=np.complex128)
    cdef Py_ssize_t[::1] idx = np.zeros(n_vec, dtype=np.intp)
    cdef Py_ssize_t flat, rem, k, p
    cdef double complex acc, term
    for flat in range(total):
        rem = flat
        for k in range(n_vec - 1, -1, -1):
            idx[k] = rem % dim
            rem = rem // dim
        acc = 0
        for p in range(n_perm):
            term = sg[p]
            for k in range(n_vec):
                term = term * vec[pm[p, k], idx[k]]
            acc = acc + term
        out[flat] = acc
    return out


def negative_part_power_sum(values, weights, double gamma):
    cdef double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double total = 0.0
    for i in range(n):
        if x[i] < 0.0:
            if gamma == 0.0:
                total += w[i]
            else:
                total += w[i] * pow(-x[i], gamma)
    return total
