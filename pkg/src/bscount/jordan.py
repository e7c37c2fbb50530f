"""Jordan-structured matrices and the chain-breaking perturbation K0.

Adding delta * K0 to a Jordan block of size m closes the chain into a cycle:
the characteristic polynomial becomes (lambda - z)^m - (-1)^m delta, whose m
simple roots sit on a circle of radius delta^(1/m) around lambda.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import default_cluster_tol, general_spectrum


@dataclass(frozen=True)
class Block:
    lam: complex
    size: int


@dataclass
class JordanStructure:
    blocks: list

    def __post_init__(self):
        blocks = []
        for b in self.blocks:
            if not isinstance(b, Block):
                b = Block(complex(b[0]), int(b[1]))
            if b.size < 1:
                raise ValueError(f"Jordan block size must be >= 1, got {b.size}")
            blocks.append(b)
        if not blocks:
            raise ValueError("a Jordan structure needs at least one block")
        self.blocks = blocks

    @property
    def total_dim(self):
        return sum(b.size for b in self.blocks)

    @property
    def max_size(self):
        return max(b.size for b in self.blocks)

    def to_record(self):
        return [[float(b.lam.real), float(b.lam.imag), b.size] for b in self.blocks]

    @classmethod
    def from_record(cls, rec):
        return cls([Block(complex(re, im), int(m)) for re, im, m in rec])


def _block_diag(blocks, dim):
    out = np.zeros((dim, dim), dtype=complex)
    pos = 0
    for b in blocks:
        out[pos : pos + b.shape[0], pos : pos + b.shape[0]] = b
        pos += b.shape[0]
    return out


def build_jordan_matrix(s):
    """Block diagonal of lambda_n I + (superdiagonal ones) of size m_n."""
    return _block_diag(
        [b.lam * np.eye(b.size) + np.eye(b.size, k=1) for b in s.blocks], s.total_dim
    )


def build_K0(s, dim=None):
    """Block diagonal with a single 1 in each block's bottom-left corner.

    With ``dim`` larger than the structure, the chains occupy the leading
    coordinates and K0 vanishes on the rest.
    """
    corners = []
    for b in s.blocks:
        m = np.zeros((b.size, b.size), dtype=complex)
        m[-1, 0] = 1.0
        corners.append(m)
    total = s.total_dim if dim is None else dim
    if total < s.total_dim:
        raise ValueError(f"dim={dim} is smaller than the structure ({s.total_dim})")
    return _block_diag(corners, total)


def split_eigenvalues_closed_form(s, delta):
    """z_{n,l} = lambda_n - ((-1)^m_n delta)^(1/m_n) exp(2 pi i l / m_n), l = 1..m_n."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    out = []
    for b in s.blocks:
        root = complex((-1) ** b.size * delta) ** (1.0 / b.size)
        for ell in range(1, b.size + 1):
            out.append(b.lam - root * np.exp(2j * np.pi * ell / b.size))
    return np.array(out, dtype=complex)


def match_multisets(a, b):
    """Minimum-weight bipartite matching by |a_i - b_j|; returns (max distance, permutation of b)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"multisets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0, np.arange(0)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()), cols


def splitting_scale(s, delta):
    return 1.0 + max(abs(b.lam) for b in s.blocks) + delta ** (1.0 / s.max_size)


def closed_form_splitting_error(s, delta):
    """Max matched distance between numerical and closed-form spectra of J + delta K0."""
    m = build_jordan_matrix(s) + delta * build_K0(s)
    numeric = general_spectrum(m).eigenvalues
    err, _ = match_multisets(split_eigenvalues_closed_form(s, delta), numeric)
    return err


@dataclass
class SemisimpleReport:
    semisimple: bool
    items: list
    ambiguous: list


def verify_semisimple(m, cluster_tol=None):
    """True iff every clustered eigenvalue has equal algebraic and geometric multiplicity."""
    tol = default_cluster_tol(m) if cluster_tol is None else cluster_tol
    spec = general_spectrum(m, tol)
    rows = [
        {"lam": it.lam, "alg_mult": it.alg_mult, "geo_mult": it.geo_mult, "semisimple": it.alg_mult == it.geo_mult}
        for it in spec.items
    ]
    return SemisimpleReport(all(r["semisimple"] for r in rows), rows, list(spec.ambiguous))


def min_separation(points):
    p = np.asarray(points, dtype=complex)
    if p.size < 2:
        return np.inf
    d = np.abs(p[:, None] - p[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def random_structure(rng, max_block=5, max_blocks=3, spread=2.0):
    """Random structure; a block may reuse an earlier eigenvalue with probability 1/4."""
    k = int(rng.integers(1, max_blocks + 1))
    blocks = []
    for _ in range(k):
        if blocks and rng.random() < 0.25:
            lam = blocks[int(rng.integers(len(blocks)))].lam
        else:
            lam = complex(*(spread * rng.uniform(-1, 1, 2)))
        blocks.append(Block(lam, int(rng.integers(1, max_block + 1))))
    return JordanStructure(blocks)
