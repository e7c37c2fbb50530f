"""Antisymmetric tensor products and lifted operators.

Two routes are provided for the same quantities. The Gram route works with
N x N matrices of inner products; the full-tensor route builds the complete
d^N coefficient array by brute-force permutation sums and serves as the
oracle for the Gram route on small instances.

Inner products are linear in the first slot: <x, y> = sum_k x_k conj(y_k).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import wedge_coefficients
from .linalg import as_matrix, hermitian_eigenvalues

TENSOR_BUDGET = 10**7
INV_SQRT_FLOOR = 1e-13


class DegenerateFamilyError(ValueError):
    pass


@dataclass
class VectorFamily:
    """N vectors of length d, stored as the rows of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError(f"vector family must be (N, d), got shape {v.shape}")
        self.vectors = v

    @property
    def n_vectors(self):
        return self.vectors.shape[0]

    @property
    def ambient_dim(self):
        return self.vectors.shape[1]

    def rank_tol(self):
        return 1e-12 * float(np.prod(np.sum(np.abs(self.vectors) ** 2, axis=1)))

    def is_independent(self):
        return self.n_vectors <= self.ambient_dim and wedge_norm_sq(self) > self.rank_tol()

    def swapped(self, i, j):
        v = self.vectors.copy()
        v[[i, j]] = v[[j, i]]
        return VectorFamily(v)


@dataclass
class FullTensor:
    """Complete coefficient array of an element of the N-fold tensor power of C^d."""

    coefficients: np.ndarray

    @property
    def order(self):
        return self.coefficients.ndim

    @property
    def ambient_dim(self):
        return self.coefficients.shape[0]

    def inner(self, other):
        return complex(np.vdot(other.coefficients, self.coefficients))

    def is_antisymmetric(self, rng=None, samples=8, tol=1e-12):
        """Check the sign flip under sampled transpositions of index slots."""
        n = self.order
        if n < 2:
            return True
        pairs = list(itertools.combinations(range(n), 2))
        if rng is not None and len(pairs) > samples:
            pairs = [pairs[k] for k in rng.choice(len(pairs), samples, replace=False)]
        c = self.coefficients
        scale = max(float(np.max(np.abs(c))), 1.0)
        return all(
            np.max(np.abs(np.swapaxes(c, i, j) + c)) <= tol * scale for i, j in pairs
        )


def gram_matrix(f):
    """A_ij = <phi_j, phi_i>."""
    phi = f.vectors
    return phi.conj() @ phi.T


def moment_matrix(t, f):
    """M_ij = <T phi_j, phi_i>."""
    t = as_matrix(t)
    phi = f.vectors
    return phi.conj() @ (t @ phi.T)


def wedge_norm_sq(f):
    """||phi_1 ^ ... ^ phi_N||^2 = det A."""
    return float(np.linalg.det(gram_matrix(f)).real)


def _inv_sqrt(a):
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    floor = INV_SQRT_FLOOR * max(float(np.max(np.abs(w))), 1e-300)
    if w[0] <= floor:
        raise DegenerateFamilyError(
            f"Gram matrix is numerically singular: smallest eigenvalue {w[0]:.3e}"
        )
    return (v * w**-0.5) @ v.conj().T


def lifted_quadratic_form(t, f):
    """<T^(N) Psi, Psi> = det(A) Tr(A^{-1/2} M A^{-1/2}) for Psi = phi_1 ^ ... ^ phi_N."""
    det_a = wedge_norm_sq(f)
    if not (f.n_vectors <= f.ambient_dim and det_a > f.rank_tol()):
        raise DegenerateFamilyError(
            f"vector family is not linearly independent (Gram determinant {det_a:.3e})"
        )
    r = _inv_sqrt(gram_matrix(f))
    return det_a * complex(np.trace(r @ moment_matrix(t, f) @ r))


def permutations_with_signs(n):
    """All permutations of range(n) in lexicographic order with their signs."""
    perms = list(itertools.permutations(range(n)))
    signs = []
    for p in perms:
        # sign by counting transpositions needed to sort
        p = list(p)
        swaps = 0
        for i in range(n):
            while p[i] != i:
                j = p[i]
                p[i], p[j] = p[j], p[i]
                swaps += 1
        signs.append(-1.0 if swaps % 2 else 1.0)
    return np.array(perms, dtype=np.int64).reshape(len(perms), n), np.array(signs)


def _check_budget(n, d, budget):
    cost = math.factorial(n) * d**n
    if cost > budget:
        raise ValueError(f"full-tensor oracle too large: N! d^N = {cost} > budget {budget}")


def build_wedge_tensor(f, budget=TENSOR_BUDGET):
    """(1/sqrt(N!)) sum_pi sgn(pi) phi_pi(1) x ... x phi_pi(N) as a full tensor."""
    n, d = f.n_vectors, f.ambient_dim
    _check_budget(n, d, budget)
    perms, signs = permutations_with_signs(n)
    flat = wedge_coefficients(f.vectors, perms, signs) / math.sqrt(math.factorial(n))
    return FullTensor(np.asarray(flat).reshape((d,) * n))


def lifted_apply(t, x, budget=TENSOR_BUDGET):
    """T^(N) x = sum_j (I x ... x T x ... x I) x, with T acting on slot j."""
    t = as_matrix(t)
    n, d = x.order, x.ambient_dim
    if t.shape[0] != d:
        raise ValueError(f"operator dimension {t.shape[0]} does not match tensor dimension {d}")
    _check_budget(n, d, budget)
    out = np.zeros_like(x.coefficients)
    for slot in range(n):
        moved = np.tensordot(t, x.coefficients, axes=([1], [slot]))
        out += np.moveaxis(moved, 0, slot)
    return FullTensor(out)


def kyfan_sum(t, n, convention="raw"):
    """Sum of the n largest eigenvalues of Hermitian ``t``.

    ``clamp_at_zero`` replaces each term by max(E_j, 0), modelling a compact
    operator whose essential spectrum is {0}; there n may exceed dim.
    """
    if convention not in ("raw", "clamp_at_zero"):
        raise ValueError(f"unknown convention {convention!r}")
    w = hermitian_eigenvalues(t)
    if n < 0:
        raise ValueError("n must be non-negative")
    if convention == "raw":
        if n > w.size:
            raise ValueError(f"n={n} exceeds dimension {w.size} under the raw convention")
        return float(np.sum(w[:n]))
    return float(np.sum(np.clip(w[:n], 0.0, None)))


def family_to_record(f):
    return {
        "n_vectors": f.n_vectors,
        "ambient_dim": f.ambient_dim,
        "vectors": [[[float(z.real), float(z.imag)] for z in row] for row in f.vectors],
    }


def family_from_record(rec):
    arr = np.asarray(rec["vectors"], dtype=float)
    return VectorFamily(arr[..., 0] + 1j * arr[..., 1])

