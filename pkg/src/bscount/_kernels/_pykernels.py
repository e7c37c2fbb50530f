"""Pure-Python kernels. Reference semantics for the compiled twin in ``_ckernels.pyx``."""

import math

import numpy as np

LANCZOS_G = 7.0
# Godfrey's coefficients for g = 7, n = 9.
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def lanczos_gamma(x):
    """Gamma function for real ``x > 0`` via the Lanczos approximation."""
    x = float(x)
    if x < 0.5:
        # reflection keeps the series argument in its accurate range
        return math.pi / (math.sin(math.pi * x) * lanczos_gamma(1.0 - x))
    x -= 1.0
    acc = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        acc += LANCZOS_COEFFS[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (x + 0.5) * math.exp(-t) * acc


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def cluster_labels(z, tol):
    """Single-linkage labels of complex points: ``|z_i - z_j| <= tol`` joins i and j.

    Labels are numbered 0, 1, ... in order of first appearance in ``z``.
    """
    z = np.asarray(z, dtype=complex).ravel()
    n = z.size
    parent = list(range(n))
    order = sorted(range(n), key=lambda i: z[i].real)
    re = [z[i].real for i in order]
    for a in range(n):
        i = order[a]
        b = a + 1
        while b < n and re[b] - re[a] <= tol:
            j = order[b]
            if abs(z[i] - z[j]) <= tol:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
            b += 1
    labels = np.empty(n, dtype=np.int64)
    seen = {}
    for i in range(n):
        r = _find(parent, i)
        if r not in seen:
            seen[r] = len(seen)
        labels[i] = seen[r]
    return labels


def wedge_coefficients(vectors, perms, signs):
    """Signed permutation sum of tensor products, flattened row-major.

    ``vectors`` is (N, d); ``perms`` is (P, N) with matching ``signs``. Entry for
    multi-index (i_1..i_N) is sum_pi sgn(pi) prod_k vectors[pi(k), i_k] (no normalisation).
    """
    vectors = np.asarray(vectors, dtype=complex)
    n_vec, dim = vectors.shape
    out = np.zeros(dim**n_vec, dtype=complex)
    for flat in range(dim**n_vec):
        idx = []
        rem = flat
        for _ in range(n_vec):
            idx.append(rem % dim)
            rem //= dim
        idx.reverse()
        total = 0j
        for perm, sgn in zip(perms, signs):
            term = complex(sgn)
            for k in range(n_vec):
                term *= vectors[perm[k], idx[k]]
            total += term
        out[flat] = total
    return out


def negative_part_power_sum(values, weights, gamma):
    """sum_j w_j * max(-x_j, 0)**gamma, with gamma = 0 read as the indicator of x_j < 0."""
    total = 0.0
    for x, w in zip(np.asarray(values, dtype=float), np.asarray(weights, dtype=float)):
        if x < 0.0:
            total += w if gamma == 0 else w * (-x) ** gamma
    return float(total)
