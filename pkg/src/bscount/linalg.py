"""Dense complex linear algebra: spectra with multiplicities, PSD functional calculus.

Eigenvalues of general matrices are read off the diagonal of a complex Schur
form and grouped into clusters; the geometric multiplicity of a cluster is the
nullity of ``m - lambda I`` by singular-value thresholding.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ._kernels import cluster_labels

ABS_FLOOR = 1e-12
HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10


class SpectrumError(np.linalg.LinAlgError):
    """Eigensolver failure or an input outside an operation's contract."""


@dataclass(frozen=True)
class EigenItem:
    lam: complex
    alg_mult: int
    geo_mult: int


@dataclass
class Spectrum:
    items: list
    cluster_tol: float
    dim: int = 0
    # pairs of item indices closer than 10 * cluster_tol (possible mis-clustering)
    ambiguous: list = field(default_factory=list)

    @property
    def eigenvalues(self):
        """Eigenvalues repeated by algebraic multiplicity."""
        return np.repeat(
            np.array([it.lam for it in self.items], dtype=complex),
            [it.alg_mult for it in self.items],
        )

    def __len__(self):
        return len(self.items)


def as_matrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def spectral_norm(m):
    return float(sla.norm(m, 2))


def default_cluster_tol(m):
    return max(1e-8, 1e-12 * spectral_norm(m))


def check_hermitian(m, tol=HERMITIAN_TOL):
    a = as_matrix(m)
    scale = max(np.max(np.abs(a)), ABS_FLOOR)
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol * scale:
        raise SpectrumError(
            f"matrix is not Hermitian: max|m - m*| = {asym:.3e} > {tol:.0e} * max|m| = {tol * scale:.3e}"
        )
    return a


def hermitian_spectrum(m):
    """Eigenvalues in non-increasing order and the matching orthonormal eigenvectors (columns)."""
    a = check_hermitian(m)
    herm = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    return w[::-1].copy(), v[:, ::-1].copy()


def hermitian_eigenvalues(m):
    a = check_hermitian(m)
    return np.linalg.eigvalsh((a + a.conj().T) / 2)[::-1].copy()


def schur_eigenvalues(m):
    """Diagonal of the complex Schur form of ``m``."""
    a = as_matrix(m)
    try:
        t, _ = sla.schur(a, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"Schur decomposition failed: {exc}") from exc
    return np.diag(t).copy()


def cluster_assignments(eigs, cluster_tol):
    """Single-linkage clusters as (labels, centres, sizes), labels in first-appearance order.

    Clusters whose centres still lie within ``cluster_tol`` are merged until the
    centres are separated by more than ``cluster_tol``.
    """
    eigs = np.asarray(eigs, dtype=complex)
    labels = cluster_labels(eigs, cluster_tol)
    while True:
        k = int(labels.max()) + 1 if labels.size else 0
        sizes = np.bincount(labels, minlength=k)
        centres = np.bincount(labels, weights=eigs.real, minlength=k) / sizes + 1j * (
            np.bincount(labels, weights=eigs.imag, minlength=k) / sizes
        )
        if k <= 1:
            return labels, centres, sizes
        merged = cluster_labels(centres, cluster_tol)
        if merged.max() + 1 == k:
            return labels, centres, sizes
        labels = merged[labels]


def cluster_eigenvalues(eigs, cluster_tol):
    """Group eigenvalues by single linkage; returns (centres, sizes) in first-appearance order."""
    _, centres, sizes = cluster_assignments(eigs, cluster_tol)
    return centres, sizes


def geometric_multiplicity(m, lam, alg_mult=None):
    """dim - numerical rank of (m - lam I), threshold dim * 1e-10 * sigma_max."""
    a = as_matrix(m)
    n = a.shape[0]
    if alg_mult == 1:
        return 1
    s = sla.svdvals(a - lam * np.eye(n))
    if s[0] == 0:
        return n
    rank = int(np.sum(s > n * RANK_TOL * s[0]))
    geo = n - rank
    if alg_mult is not None:
        geo = min(max(geo, 1), alg_mult)
    return geo


def spectrum_from_eigenvalues(eigs, cluster_tol, m=None, dim=None):
    """Build a Spectrum from raw eigenvalues; ``m`` is needed for geometric multiplicities."""
    centres, sizes = cluster_eigenvalues(eigs, cluster_tol)
    items = []
    for lam, size in zip(centres, sizes):
        size = int(size)
        if size == 1 or m is None:
            geo = 1 if size == 1 else size
        else:
            geo = geometric_multiplicity(m, lam, size)
        items.append(EigenItem(complex(lam), size, geo))
    ambiguous = []
    if len(centres) > 1:
        near = cluster_labels(centres, 10 * cluster_tol)
        for lab in np.unique(near):
            members = np.flatnonzero(near == lab)
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    a, b = members[i], members[j]
                    if abs(centres[a] - centres[b]) <= 10 * cluster_tol:
                        ambiguous.append((int(a), int(b)))
    return Spectrum(items, cluster_tol, int(dim if dim is not None else len(eigs)), ambiguous)


def general_spectrum(m, cluster_tol=None):
    """Eigenvalues of an arbitrary square matrix with algebraic and geometric multiplicities."""
    a = as_matrix(m)
    tol = default_cluster_tol(a) if cluster_tol is None else float(cluster_tol)
    if not tol > 0:
        raise ValueError(f"cluster_tol must be positive, got {tol}")
    eigs = schur_eigenvalues(a)
    return spectrum_from_eigenvalues(eigs, tol, m=a, dim=a.shape[0])


def psd_inv_sqrt(h, eps):
    """(h + eps I)^{-1/2} for Hermitian PSD ``h`` via the spectral theorem."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    w, v = np.linalg.eigh(_herm(h))
    norm = max(float(np.max(np.abs(w))), ABS_FLOOR)
    if w[0] < -RANK_TOL * norm:
        raise SpectrumError(
            f"matrix is not positive semidefinite: smallest eigenvalue {w[0]:.3e} < -1e-10 * {norm:.3e}"
        )
    w = np.clip(w, 0.0, None)
    return (v * (w + eps) ** -0.5) @ v.conj().T


def _herm(h):
    a = check_hermitian(h)
    return (a + a.conj().T) / 2


def is_psd(h, tol=RANK_TOL):
    a = _herm(h)
    w = np.linalg.eigvalsh(a)
    return bool(w[0] >= -tol * max(float(np.max(np.abs(w))), ABS_FLOOR))


def singular_values(m):
    a = as_matrix(m)
    try:
        return sla.svdvals(a)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"SVD failed: {exc}") from exc


def real_part(s):
    """(S + S*) / 2."""
    return (s + s.conj().T) / 2


def imag_part(s):
    """(S - S*) / (2i)."""
    return (s - s.conj().T) / 2j


def matrix_to_record(m):
    """Exchange record: dim and row-major (re, im) pairs."""
    a = np.asarray(m, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_record(rec):
    dim = int(rec["dim"])
    entries = np.asarray(rec["entries"], dtype=float)
    if entries.shape != (dim * dim, 2):
        raise ValueError(f"matrix record with dim={dim} needs {dim * dim} (re, im) pairs")
    return as_matrix((entries[:, 0] + 1j * entries[:, 1]).reshape(dim, dim))
