"""Finite-difference Schrodinger operators -Delta_h + V on boxes in d = 1, 2.

The box [-L, L]^d carries n interior points per axis, spacing h = 2L/(n+1),
Dirichlet conditions, and the second-order stencil. V acts by multiplication
with its grid samples. Integrals of V use the midpoint rule on the same grid,
so the sampled operator and the quadrature see the same potential.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from . import constants
from ._kernels import negative_part_power_sum
from .bsbound import HalfPlane, PerturbedPair, halfplane_count
from .linalg import EigenItem, Spectrum, cluster_assignments

GRID_BUDGET = 5000
MIN_POINTS = 16
DRIFT_TOL = 0.05
DISCRETIZATION_ALLOWANCE = 0.05
NUMERICAL_RANGE_TOL = 1e-9
TAIL_TOL = 1e-6
MAX_CERTIFIED = 200


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    dim_space: int
    L: float
    n: int

    def __post_init__(self):
        if self.dim_space not in (1, 2):
            raise ValueError(f"dim_space must be 1 or 2, got {self.dim_space}")
        if not self.L > 0:
            raise ValueError(f"half width L must be positive, got {self.L}")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise ValueError(f"points per axis must be an integer >= {MIN_POINTS}, got {self.n}")

    @property
    def h(self):
        return 2.0 * self.L / (self.n + 1)

    @property
    def size(self):
        return self.n**self.dim_space

    @property
    def cell_volume(self):
        return self.h**self.dim_space

    def axis(self):
        return -self.L + self.h * np.arange(1, self.n + 1)

    def coordinates(self):
        """(size, dim_space) array of grid points, first axis slowest."""
        x = self.axis()
        if self.dim_space == 1:
            return x[:, None]
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def radii(self):
        return np.sqrt(np.sum(self.coordinates() ** 2, axis=1))

    def refined(self, factor):
        """Grid with spacing h / factor on the same box."""
        return Grid(self.dim_space, self.L, (self.n + 1) * factor - 1)

    def coarsened(self, factor):
        return Grid(self.dim_space, self.L, (self.n + 1) // factor - 1)

    def to_record(self):
        return {"dim_space": self.dim_space, "L": self.L, "n": self.n}

    @classmethod
    def from_record(cls, rec):
        return cls(int(rec["dim_space"]), float(rec["L"]), int(rec["n"]))


def laplacian_eigenvalues(g):
    """Closed-form Dirichlet spectrum of -Delta_h, ascending."""
    k = np.arange(1, g.n + 1)
    one = (2.0 / g.h**2) * (1.0 - np.cos(k * np.pi / (g.n + 1)))
    if g.dim_space == 1:
        return one
    return np.sort((one[:, None] + one[None, :]).ravel())


def dirichlet_laplacian(g):
    """Sparse -Delta_h (CSR), Hermitian positive definite."""
    n = g.n
    t = sp.diags(
        [-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr"
    ) / g.h**2
    if g.dim_space == 1:
        return t
    eye = sp.identity(n, format="csr")
    return (sp.kron(t, eye) + sp.kron(eye, t)).tocsr()


_KINDS = ("zero", "delta_well", "imaginary_ball", "scaled_char", "grid_samples")


@dataclass
class PotentialSpec:
    """Potential V by kind; ``params`` holds the kind's parameters.

    zero: no parameters. delta_well: t, width (well of integral -t on |x| < w/2).
    imaginary_ball: h_strength, radius (default 1), V = i h on the ball.
    scaled_char: c (complex), radius, V = c on the ball.
    grid_samples: values, explicit complex samples in grid order.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {_KINDS}")
        p = dict(self.params)
        if self.kind == "delta_well":
            if not p.get("width", 0) > 0:
                raise ValueError("delta_well needs width > 0")
            p["t"] = float(p["t"])
            p["width"] = float(p["width"])
        elif self.kind == "imaginary_ball":
            p["h_strength"] = float(p["h_strength"])
            p["radius"] = float(p.get("radius", 1.0))
        elif self.kind == "scaled_char":
            c = p["c"]
            p["c"] = complex(*c) if isinstance(c, (list, tuple)) else complex(c)
            p["radius"] = float(p["radius"])
        elif self.kind == "grid_samples":
            vals = np.asarray(p["values"])
            if vals.ndim == 2 and vals.shape[1] == 2 and not np.iscomplexobj(vals):
                vals = vals[:, 0] + 1j * vals[:, 1]
            p["values"] = np.asarray(vals, dtype=complex).ravel()
        if "radius" in p and not p["radius"] > 0:
            raise ValueError(f"radius must be positive, got {p['radius']}")
        self.params = p

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def delta_well(cls, t, width):
        return cls("delta_well", {"t": t, "width": width})

    @classmethod
    def imaginary_ball(cls, h_strength, radius=1.0):
        return cls("imaginary_ball", {"h_strength": h_strength, "radius": radius})

    @classmethod
    def scaled_char(cls, c, radius):
        return cls("scaled_char", {"c": c, "radius": radius})

    @classmethod
    def grid_samples(cls, values):
        return cls("grid_samples", {"values": values})

    def sample(self, g):
        """Complex samples of V at the grid points, plus a list of warnings."""
        notes = []
        if "radius" in self.params and self.params["radius"] > g.L:
            raise ValueError(f"radius {self.params['radius']} exceeds box half width {g.L}")
        if self.kind == "zero":
            return np.zeros(g.size, dtype=complex), notes
        if self.kind == "grid_samples":
            vals = self.params["values"]
            if vals.size != g.size:
                raise ValueError(f"grid_samples has {vals.size} values, grid has {g.size} points")
            return vals.copy(), notes
        r = g.radii()
        if self.kind == "delta_well":
            t, w = self.params["t"], self.params["width"]
            if w < 2 * g.h:
                notes.append(f"delta_well width {w:g} is below 2h = {2 * g.h:g}")
            inside = r < w / 2
            if not inside.any():
                inside = r <= r.min()
            # normalise on the grid so the midpoint integral is exactly -t
            v = np.zeros(g.size, dtype=complex)
            v[inside] = -t / (np.count_nonzero(inside) * g.cell_volume)
            return v, notes
        inside = r < self.params["radius"]
        if not inside.any():
            notes.append("potential support contains no grid point")
        value = 1j * self.params["h_strength"] if self.kind == "imaginary_ball" else self.params["c"]
        return np.where(inside, value, 0.0).astype(complex), notes

    def to_record(self):
        rec = {"kind": self.kind}
        for k, v in self.params.items():
            if isinstance(v, complex):
                rec[k] = [v.real, v.imag]
            elif isinstance(v, np.ndarray):
                rec[k] = [[float(z.real), float(z.imag)] for z in v]
            else:
                rec[k] = v
        return rec

    @classmethod
    def from_record(cls, rec):
        params = {k: v for k, v in rec.items() if k != "kind"}
        return cls(rec["kind"], params)


@dataclass
class GridHamiltonian:
    """-Delta_h + diag(v) kept sparse; ``as_pair`` densifies for the abstract verifier."""

    grid: Grid
    potential: PotentialSpec
    h0: sp.csr_matrix
    v: np.ndarray
    notes: list = field(default_factory=list)

    @property
    def is_real(self):
        return not np.any(self.v.imag)

    def dense(self):
        m = self.h0.toarray().astype(complex)
        m[np.diag_indices_from(m)] += self.v
        return m

    def as_pair(self):
        return PerturbedPair(self.h0.toarray(), np.diag(self.v))


def build_hamiltonian(g, p):
    if g.size > GRID_BUDGET:
        raise BudgetError(f"grid has {g.size} points, budget is {GRID_BUDGET}")
    v, notes = p.sample(g)
    return GridHamiltonian(g, p, dirichlet_laplacian(g), v, notes)


def potential_integral(g, p, alpha, power, v=None):
    """Midpoint rule for int (Re V + alpha Im V)_-^power dx."""
    if v is None:
        v, _ = p.sample(g)
    vals = v.real + alpha * v.imag
    return negative_part_power_sum(vals, np.full(vals.size, g.cell_volume), power)


def abs_potential_integral(g, p, power):
    v, _ = p.sample(g)
    return float(np.sum(np.abs(v) ** power) * g.cell_volume)


def solve_eigenvalues(ham):
    """All eigenvalues of the grid Hamiltonian (dense solve unless real 1D)."""
    g = ham.grid
    if ham.is_real and g.dim_space == 1:
        diag = 2.0 / g.h**2 + ham.v.real
        off = -np.ones(g.n - 1) / g.h**2
        return sla.eigh_tridiagonal(diag, off, eigvals_only=True).astype(complex)
    if ham.is_real:
        m = ham.h0.toarray()
        m[np.diag_indices_from(m)] += ham.v.real
        return sla.eigvalsh(m, overwrite_a=True, check_finite=False).astype(complex)
    return sla.eigvals(ham.dense(), overwrite_a=True, check_finite=False)


def _cloud_tol(eigs):
    return max(1e-8, 1e-12 * float(np.max(np.abs(eigs))) if eigs.size else 1e-8)


@dataclass
class EigenCloud:
    """Eigenvalues of one discretization with optional refinement certificates.

    ``certificates[i]`` is the Cauchy difference of item i against the next
    coarser level (nan where no partner was matched); ``converged`` is None for
    a single-level cloud.
    """

    spectrum: Spectrum
    grid: Grid
    potential: PotentialSpec
    level: int = 0
    certificates: np.ndarray | None = None
    converged: np.ndarray | None = None
    extrapolated: np.ndarray | None = None
    notes: list = field(default_factory=list)
    raw: np.ndarray | None = None

    @property
    def certified(self):
        return self.converged is not None

    @property
    def checked_items(self):
        """Items allowed into bound checks: converged ones, or all for a single-level cloud."""
        if self.converged is None:
            return list(self.spectrum.items)
        return [it for it, ok in zip(self.spectrum.items, self.converged) if ok]

    @property
    def excluded_items(self):
        if self.converged is None:
            return []
        return [it for it, ok in zip(self.spectrum.items, self.converged) if not ok]

    def rows(self):
        """(re, im, alg_mult, certificate) per item, in spectrum order."""
        out = []
        for i, it in enumerate(self.spectrum.items):
            cert = math.nan if self.certificates is None else float(self.certificates[i])
            out.append((it.lam.real, it.lam.imag, it.alg_mult, cert))
        return out


def _tail_note(eigs, g):
    neg = eigs.real[eigs.real < 0]
    if neg.size and math.exp(-math.sqrt(-neg.min()) * g.L) >= TAIL_TOL:
        return f"box half width {g.L:g} may truncate the ground-state tail (decay {math.exp(-math.sqrt(-neg.min()) * g.L):.1e})"
    return None


def _range_notes(ham, eigs):
    notes = []
    scale = 1.0 + float(np.max(np.abs(eigs))) * 1e-12
    if np.all(ham.v.real >= 0) and eigs.real.min() < -NUMERICAL_RANGE_TOL * scale:
        notes.append(f"numerical-range guard violated: min Re = {eigs.real.min():.3e} with Re V >= 0")
    return notes


def compute_cloud(g, p, level=0):
    ham = build_hamiltonian(g, p)
    eigs = solve_eigenvalues(ham)
    notes = list(ham.notes) + _range_notes(ham, eigs)
    tail = _tail_note(eigs, g)
    if tail:
        notes.append(tail)
    labels, centres, sizes = cluster_assignments(eigs, _cloud_tol(eigs))
    # grid clouds are not checked for Jordan structure; geometric = algebraic
    items = [EigenItem(complex(c), int(s), int(s)) for c, s in zip(centres, sizes)]
    spec = Spectrum(items, _cloud_tol(eigs), g.size)
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    cloud = EigenCloud(spec, g, p, level, notes=notes, raw=eigs)
    cloud._labels = labels
    return cloud


def numerical_range_ok(cloud):
    """No eigenvalue below -1e-9 (scaled) when Re V >= 0 pointwise; True otherwise vacuously."""
    return not any(n.startswith("numerical-range guard") for n in cloud.notes)


def _match(fine, coarse, count):
    """Certify the ``count`` fine eigenvalues with smallest real part against the coarse set."""
    order = np.argsort(fine.real, kind="stable")[:count]
    cost = np.abs(fine[order][:, None] - coarse[None, :])
    rows, cols = linear_sum_assignment(cost)
    diff = np.full(fine.size, np.nan)
    partner = np.full(fine.size, np.nan + 0j)
    diff[order[rows]] = cost[rows, cols]
    partner[order[rows]] = coarse[cols]
    return diff, partner


def refine_and_extrapolate(g, p, levels=2, max_certified=MAX_CERTIFIED, rate=2.0):
    """Solve on ``levels`` grids ending at ``g`` (spacing doubling downwards) and certify.

    Each certified eigenvalue of the finest cloud carries the Cauchy difference
    to its matched partner one level down and a Richardson value assuming
    order-``rate`` convergence. Relative drift above 5% marks it unconverged.
    """
    if levels < 2:
        raise ValueError(f"refinement needs levels >= 2, got {levels}")
    grids = []
    for j in range(levels - 1, -1, -1):
        n_j = (g.n + 1) // 2**j - 1
        if n_j >= MIN_POINTS:
            grids.append(Grid(g.dim_space, g.L, n_j))
    if len(grids) < 2:
        raise ValueError(f"fewer than 2 usable refinement levels for n={g.n}")
    clouds = [compute_cloud(gr, p, level=k) for k, gr in enumerate(grids)]
    fine, coarse = clouds[-1], clouds[-2]
    count = min(max_certified, coarse.raw.size)
    diff, partner = _match(fine.raw, coarse.raw, count)
    factor = 2.0**rate
    extrap_raw = fine.raw + (fine.raw - partner) / (factor - 1.0)
    rel = diff / np.maximum(np.abs(fine.raw), 1e-12)
    labels = fine._labels
    k = len(fine.spectrum.items)
    cert = np.full(k, np.nan)
    conv = np.zeros(k, dtype=bool)
    extrap = np.full(k, np.nan + 0j)
    for i in range(k):
        members = np.flatnonzero(labels == i)
        d = diff[members]
        if np.all(np.isfinite(d)):
            cert[i] = float(d.max())
            conv[i] = bool(np.all(rel[members] <= DRIFT_TOL))
            extrap[i] = extrap_raw[members].mean()
    fine.certificates, fine.converged, fine.extrapolated = cert, conv, extrap
    fine.level = len(grids) - 1
    fine.levels = clouds
    return fine


def _items(obj):
    if isinstance(obj, EigenCloud):
        return obj.checked_items
    return list(getattr(obj, "items", obj))


def _space_dim(cloud, d):
    if d is None:
        return cloud.grid.dim_space
    if isinstance(cloud, EigenCloud) and d != cloud.grid.dim_space:
        raise ValueError(f"d={d} does not match grid dimension {cloud.grid.dim_space}")
    return d


@dataclass
class CLRRecord:
    n_count: int
    rhs: float
    ratio: float
    holds: bool
    inconsistent: bool
    excluded_inside: int
    gamma: float
    alpha: float
    eps: float


def clr_functional(cloud, gamma, hp, p=None, d=None):
    """N(Re l + a Im l < -eps) against C_{d,p} eps^-gamma int (Re V + a Im V)_-^p, p = d/2 + gamma."""
    d = _space_dim(cloud, d)
    p = cloud.potential if p is None else p
    if not hp.eps > 0:
        raise ValueError("the CLR functional needs eps > 0")
    if not constants.is_admissible(d, gamma):
        raise ValueError(f"(d={d}, gamma={gamma}) is not admissible for the CLR bound")
    power = d / 2 + gamma
    n = halfplane_count(Spectrum(cloud.checked_items, cloud.spectrum.cluster_tol), hp)
    excluded = halfplane_count(Spectrum(cloud.excluded_items, cloud.spectrum.cluster_tol), hp)
    integral = potential_integral(cloud.grid, p, hp.alpha, power)
    rhs = constants.clr_constant(d, power) * hp.eps**-gamma * integral
    if rhs > 0:
        ratio = n / rhs
    else:
        ratio = 0.0 if n == 0 else math.inf
    return CLRRecord(
        n_count=n,
        rhs=float(rhs),
        ratio=float(ratio),
        holds=n <= (1 + DISCRETIZATION_ALLOWANCE) * rhs,
        inconsistent=(rhs == 0 and n > 0),
        excluded_inside=excluded,
        gamma=float(gamma),
        alpha=float(hp.alpha),
        eps=float(hp.eps),
    )


def lt_halfplane_sum(cloud, gamma, alpha):
    """sum alg_mult * (Re l + alpha Im l)_-^gamma; gamma = 0 counts strictly negative values."""
    items = _items(cloud)
    vals = np.array([it.lam.real + alpha * it.lam.imag for it in items], dtype=float)
    mult = np.array([it.alg_mult for it in items], dtype=float)
    return negative_part_power_sum(vals, mult, gamma)


@dataclass
class LTRecord:
    lhs: float
    rhs: float
    constant: float
    gamma_prime: float
    holds: bool
    gamma: float
    alpha: float


def lt_check(cloud, gamma, alpha, p=None, d=None):
    """LT half-plane sum against best-gamma' C~_{d,p} times the potential integral."""
    d = _space_dim(cloud, d)
    p = cloud.potential if p is None else p
    const, gp = constants.best_lt_constant(d, gamma)
    integral = potential_integral(cloud.grid, p, alpha, d / 2 + gamma)
    lhs = lt_halfplane_sum(cloud, gamma, alpha)
    rhs = const * integral
    return LTRecord(
        lhs=float(lhs),
        rhs=float(rhs),
        constant=float(const),
        gamma_prime=float(gp),
        holds=lhs <= (1 + DISCRETIZATION_ALLOWANCE) * rhs,
        gamma=float(gamma),
        alpha=float(alpha),
    )


def sector_sum(cloud, gamma, kappa):
    """sum alg_mult |l|^gamma over items with |Im l| >= kappa Re l."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    total = 0.0
    for it in _items(cloud):
        if abs(it.lam.imag) >= kappa * it.lam.real:
            total += it.alg_mult * abs(it.lam) ** gamma
    return total


def sector_ratio(cloud, gamma, kappa, p=None, d=None):
    """sector_sum / ((1 + 2/kappa)^p int |V|^p), p = d/2 + gamma."""
    d = _space_dim(cloud, d)
    p = cloud.potential if p is None else p
    power = d / 2 + gamma
    denom = (1 + 2 / kappa) ** power * abs_potential_integral(cloud.grid, p, power)
    s = sector_sum(cloud, gamma, kappa)
    if denom == 0:
        return 0.0 if s == 0 else math.inf
    return s / denom


_WEIGHT_KINDS = ("exp", "const", "inv1p")
_WEIGHT_SAMPLES = np.concatenate([[0.0], np.geomspace(1e-3, 20.0, 41)])


@dataclass(frozen=True)
class WeightFunction:
    """f on [0, inf): exp -> e^{-param x}, const -> param, inv1p -> 1/(1+x)."""

    kind: str
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {_WEIGHT_KINDS}")
        vals = self(_WEIGHT_SAMPLES)
        if not np.all(vals > 0):
            raise ValueError(f"weight {self.kind}({self.param}) is not positive on the sampled points")
        if np.any(np.diff(vals) > 0):
            raise ValueError(f"weight {self.kind}({self.param}) is not non-increasing")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "exp":
            return np.exp(-self.param * x)
        if self.kind == "const":
            return np.full_like(x, self.param)
        return 1.0 / (1.0 + x)

    @property
    def integrable(self):
        return self.kind == "exp"

    def to_record(self):
        return {"kind": self.kind, "param": self.param}


def dist_to_halfline(lam):
    """dist(l, [0, inf)): |Im l| if Re l >= 0, else |l|."""
    lam = complex(lam)
    return abs(lam.imag) if lam.real >= 0 else abs(lam)


def dist_weighted_sum(cloud, p_exp, d, f):
    """sum alg_mult dist^p / |l|^{d/2} f(-log(dist / |l|)); items at l = 0 are skipped with a warning."""
    total = 0.0
    skipped = 0
    for it in _items(cloud):
        mod = abs(it.lam)
        if mod == 0:
            skipped += it.alg_mult
            continue
        dist = dist_to_halfline(it.lam)
        if dist == 0:
            # eigenvalue on [0, inf): summand vanishes for p > 0
            continue
        arg = -math.log(dist / mod)
        total += it.alg_mult * dist**p_exp / mod ** (d / 2) * float(f(arg))
    if skipped:
        warnings.warn(f"{skipped} eigenvalue(s) at 0 excluded from the distance sum", RuntimeWarning, stacklevel=2)
    return total


def cloud_to_csv(cloud, path):
    with open(path, "w") as fh:
        fh.write("re,im,alg_mult,certificate\n")
        for re, im, m, c in cloud.rows():
            fh.write(f"{re!r},{im!r},{m},{c!r}\n")


def halfplane(alpha, eps):
    return HalfPlane(float(alpha), float(eps))
