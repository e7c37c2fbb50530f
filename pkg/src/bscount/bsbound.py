"""Finite-dimensional Birman-Schwinger operator and the half-plane counting bound.

For H = h0 + v (+ k) with h0 Hermitian PSD and eps > 0, the number N of
eigenvalues with Re l + alpha Im l < -eps (algebraic multiplicity) satisfies

    N <= sum_{j <= N} E_j(-Re S - alpha Im S),   S = R (v + k) R,  R = (h0 + eps)^{-1/2}

where E_j are eigenvalues in non-increasing order. The verifiers here evaluate
both sides; they never assume the inequality.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .antisym import kyfan_sum
from .jordan import build_jordan_matrix, build_K0
from .linalg import (
    SpectrumError,
    as_matrix,
    general_spectrum,
    hermitian_eigenvalues,
    imag_part,
    is_psd,
    matrix_from_record,
    matrix_to_record,
    psd_inv_sqrt,
    real_part,
    spectral_norm,
)

BOUNDARY_TOL = 1e-12
MARGIN_TOL = 1e-9
CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class HalfPlane:
    """{l : Re l + alpha Im l < -eps}."""

    alpha: float
    eps: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")

    def value(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return lam.real + self.alpha * lam.imag


@dataclass
class PerturbedPair:
    h0: np.ndarray
    v: np.ndarray
    k: np.ndarray | None = None

    def __post_init__(self):
        self.h0 = as_matrix(self.h0)
        self.v = as_matrix(self.v)
        if self.k is not None:
            self.k = as_matrix(self.k)
        n = self.h0.shape[0]
        for name in ("v", "k"):
            m = getattr(self, name)
            if m is not None and m.shape[0] != n:
                raise ValueError(f"{name} has dimension {m.shape[0]}, h0 has {n}")
        if not is_psd(self.h0):
            raise SpectrumError("h0 must be Hermitian positive semidefinite")

    @property
    def dim(self):
        return self.h0.shape[0]

    def hamiltonian(self):
        h = self.h0 + self.v
        return h if self.k is None else h + self.k

    def with_k(self, k):
        return PerturbedPair(self.h0, self.v, k)

    def to_record(self):
        rec = {"h0": matrix_to_record(self.h0), "v": matrix_to_record(self.v)}
        if self.k is not None:
            rec["k"] = matrix_to_record(self.k)
        return rec

    @classmethod
    def from_record(cls, rec):
        k = rec.get("k")
        return cls(
            matrix_from_record(rec["h0"]),
            matrix_from_record(rec["v"]),
            None if k is None else matrix_from_record(k),
        )

    def digest(self, hp=None):
        h = hashlib.sha256()
        for m in (self.h0, self.v, self.k):
            if m is not None:
                h.update(np.ascontiguousarray(m).tobytes())
        if hp is not None:
            h.update(json.dumps([hp.alpha, hp.eps]).encode())
        return h.hexdigest()[:16]


def birman_schwinger(p, eps):
    """S = R v R (+ R k R) with R = (h0 + eps)^{-1/2}."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    r = psd_inv_sqrt(p.h0, eps)
    pert = p.v if p.k is None else p.v + p.k
    return r @ pert @ r


def closure_residual(p, eps):
    """||R (H + eps) R - (S + I)||_2 / (1 + ||S||_2), with the product formed directly."""
    r = psd_inv_sqrt(p.h0, eps)
    s = birman_schwinger(p, eps)
    lhs = r @ (p.hamiltonian() + eps * np.eye(p.dim)) @ r
    return spectral_norm(lhs - s - np.eye(p.dim)) / (1.0 + spectral_norm(s))


def counted_combination(s, alpha):
    """-Re S - alpha Im S, Hermitian."""
    t = -real_part(s) - alpha * imag_part(s)
    return (t + t.conj().T) / 2


def halfplane_count(spec, hp):
    """Eigenvalues strictly inside the half-plane, by algebraic multiplicity.

    Items within BOUNDARY_TOL of the boundary line are left out; see ``boundary_items``.
    """
    n = 0
    for it in spec.items:
        x = hp.value(it.lam) + hp.eps
        if x < -BOUNDARY_TOL:
            n += it.alg_mult
    return n


def boundary_items(spec, hp):
    return [it for it in spec.items if abs(hp.value(it.lam) + hp.eps) <= BOUNDARY_TOL]


@dataclass
class BoundReport:
    n_count: int
    partial_sum: float
    margin: float
    holds: bool
    convention: str
    inputs_digest: str
    alpha: float = 0.0
    eps: float = 0.0
    dim: int = 0
    boundary: int = 0
    extra: dict = field(default_factory=dict)

    def to_record(self):
        return asdict(self)


def bound_holds(margin, partial_sum):
    return margin >= -MARGIN_TOL * (1.0 + abs(partial_sum))


def verify_counting_bound(p, hp, convention="raw", cluster_tol=None):
    """Evaluate N and the Ky Fan partial sum of -Re S - alpha Im S for one instance."""
    if not hp.eps > 0:
        raise ValueError("the counting bound needs eps > 0")
    spec = general_spectrum(p.hamiltonian(), cluster_tol)
    n = halfplane_count(spec, hp)
    t = counted_combination(birman_schwinger(p, hp.eps), hp.alpha)
    assert n <= p.dim
    partial = kyfan_sum(t, n, convention)
    margin = partial - n
    return BoundReport(
        n_count=n,
        partial_sum=partial,
        margin=margin,
        holds=bound_holds(margin, partial),
        convention=convention,
        inputs_digest=p.digest(hp),
        alpha=float(hp.alpha),
        eps=float(hp.eps),
        dim=p.dim,
        boundary=len(boundary_items(spec, hp)),
    )


def trace_negative_part_bound(p, hp):
    """Tr((Re S + alpha Im S)_-)."""
    if not hp.eps > 0:
        raise ValueError("the counting bound needs eps > 0")
    mu = hermitian_eigenvalues(-counted_combination(birman_schwinger(p, hp.eps), hp.alpha))
    return float(np.sum(np.clip(-mu, 0.0, None)))


@dataclass
class DeltaRow:
    delta: float
    max_diff: float
    weyl_bound: float
    norm_bound: float
    n_count: int
    partial_sum: float
    holds: bool


def delta_semisimplification_experiment(p, hp, s, deltas, convention="raw"):
    """Track E_j(-Re S_{K + delta K0} - alpha Im S_{K + delta K0}) as delta -> 0.

    K0 is built from ``s`` on the leading coordinates and is zero elsewhere.
    Each row carries the Weyl bound ||T(delta) - T(0)||_2 on the eigenvalue
    shift and the cruder (1 + |alpha|) delta ||R K0 R||_2.
    """
    if s.total_dim > p.dim:
        raise ValueError(f"structure of size {s.total_dim} does not fit dimension {p.dim}")
    k_base = np.zeros((p.dim, p.dim), dtype=complex) if p.k is None else p.k
    k0 = build_K0(s, p.dim)
    r = psd_inv_sqrt(p.h0, hp.eps)
    rk0r = spectral_norm(r @ k0 @ r)
    t0 = counted_combination(birman_schwinger(p.with_k(k_base), hp.eps), hp.alpha)
    e0 = hermitian_eigenvalues(t0)
    rows = []
    for delta in deltas:
        q = p.with_k(k_base + delta * k0)
        t = counted_combination(birman_schwinger(q, hp.eps), hp.alpha)
        e = hermitian_eigenvalues(t)
        rep = verify_counting_bound(q, hp, convention)
        rows.append(
            DeltaRow(
                delta=float(delta),
                max_diff=float(np.max(np.abs(e - e0))),
                weyl_bound=spectral_norm(t - t0),
                norm_bound=(1 + abs(hp.alpha)) * delta * rk0r,
                n_count=rep.n_count,
                partial_sum=rep.partial_sum,
                holds=rep.holds,
            )
        )
    return rows


def random_pair(rng, dim, sigma, with_k=False, k_sigma=None):
    """h0 = G* G, v = sigma (G1 + i G2), optional k of the same form."""

    def gauss():
        return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

    g = gauss() / np.sqrt(2 * dim)
    h0 = g.conj().T @ g
    h0 = (h0 + h0.conj().T) / 2
    v = sigma * gauss() / np.sqrt(2 * dim)
    k = None
    if with_k:
        k = (sigma if k_sigma is None else k_sigma) * gauss() / np.sqrt(2 * dim)
    return PerturbedPair(h0, v, k)


def jordan_pair(rng, s, dim, sigma=1.0):
    """Pair whose H = h0 + v is similar to a Jordan matrix with structure ``s`` (padded)."""
    j = np.zeros((dim, dim), dtype=complex)
    j[: s.total_dim, : s.total_dim] = build_jordan_matrix(s)
    for i in range(s.total_dim, dim):
        j[i, i] = complex(*(sigma * rng.uniform(-1, 1, 2)))
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    # unitary similarity keeps the Jordan structure exact up to rounding
    target = q @ j @ q.conj().T
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2 * dim)
    h0 = g.conj().T @ g
    h0 = (h0 + h0.conj().T) / 2
    return PerturbedPair(h0, target - h0)
