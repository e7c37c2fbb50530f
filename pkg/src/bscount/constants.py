"""Closed-form constants of the complex-potential CLR and Lieb-Thirring bounds.

Every constant that would ideally be the sharp one is replaced by the proven
constant implemented here. Those values are upper bounds for the sharp ones,
so inequalities checked with them stay valid; they are labelled
"proven, not sharp" wherever they are reported.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import lanczos_gamma, negative_part_power_sum

# endpoint guard for gamma' -> gamma, where Gamma(gamma - gamma') has a pole
GAMMA_PRIME_GUARD = 1e-3
GAMMA_PRIME_GRID = 200


def gamma_function(x):
    """Gamma for real x > 0 (Lanczos, g=7, 9 terms; ~1e-14 relative on [1e-2, 50])."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"gamma_function needs a finite x > 0, got {x}")
    return lanczos_gamma(x)


@dataclass(frozen=True)
class AdmissiblePair:
    """Dimension d and exponent gamma with p = d/2 + gamma."""

    d: int
    gamma: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if not is_admissible(self.d, self.gamma):
            raise ValueError(f"inadmissible (d, gamma) = ({self.d}, {self.gamma})")

    @property
    def p(self):
        return self.d / 2 + self.gamma


def is_admissible(d, gamma):
    """gamma >= 1/2 (d=1), gamma > 0 (d=2), gamma >= 0 (d>=3)."""
    if d == 1:
        return gamma >= 0.5
    if d == 2:
        return gamma > 0.0
    return d >= 3 and gamma >= 0.0


def unit_ball_volume(d):
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2) / gamma_function(d / 2 + 1)


def clr_constant(d, p):
    """Proven constant C_{d,p} of the complex CLR bound N <= C eps^-gamma int (Re V + a Im V)_-^p."""
    gamma = p - d / 2
    tau = unit_ball_volume(d)
    if d == 1 and p == 1:
        return 0.5
    if p > max(1.0, d / 2):
        return (
            2.0 ** (p + gamma - 4)
            * math.pi ** (-2 * p)
            * tau
            * d ** (d / 2)
            * _pow0(gamma)
            * p ** (p + 1)
            * (p - 1) ** (1 - 2 * p)
        )
    if d >= 3 and p == d / 2:
        return 2.0**-5 * math.pi**-d * tau * d ** (d + 1) * (d / 2 - 1) ** (1 - d)
    raise ValueError(f"no CLR constant for (d, p) = ({d}, {p})")


def _pow0(x):
    # x**x with the convention 0**0 = 1
    return 1.0 if x == 0 else x**x


def cwikel_Kq(q):
    """Constant in Cwikel's weak-Schatten estimate, for 2 < q < inf."""
    if not q > 2:
        raise ValueError(f"Cwikel constant needs q > 2, got {q}")
    return (q / 2) * (4 / (q / 2 - 1)) ** (1 - 2 / q) * (1 + 2 / (q - 2)) ** (1 / q)


def weak_norm_u(d, q, eps):
    """Weak L^{q,inf} quasi-norm of u(xi) = (|xi|^2 + eps)^{-1/2} / (2 pi) on R^d."""
    if q < d:
        raise ValueError(f"weak norm needs q >= d, got q={q}, d={d}")
    tau = unit_ball_volume(d)
    if q == d:
        return tau ** (1 / d) / (2 * math.pi)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return (
        tau ** (1 / q)
        / (2 * math.pi)
        * (q - d) ** (0.5 - d / (2 * q))
        * d ** (d / (2 * q))
        / math.sqrt(q)
        * eps ** (-(q - d) / (2 * q))
    )


def weak_norm_maximizer(d, q, eps):
    """Location t* of the maximum of t^q |{|u| > t}| for q > d."""
    if not q > d:
        raise ValueError("the maximum is only attained in the interior for q > d")
    return math.sqrt(q - d) / (2 * math.pi * math.sqrt(q * eps))


def weak_norm_profile(d, q, eps, t):
    """F(t) = tau_d t^q ((2 pi t)^-2 - eps)^{d/2} on 0 < t < eps^{-1/2} / (2 pi)."""
    t = np.asarray(t, dtype=float)
    inner = np.clip((2 * np.pi * t) ** -2.0 - eps, 0.0, None)
    return unit_ball_volume(d) * t**q * inner ** (d / 2)


def kss_integral_check(eps):
    """Closed form of int_R (xi^2 + eps)^-1 d xi."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return math.pi / math.sqrt(eps)


@dataclass(frozen=True)
class TOptimum:
    t_star: float
    inf_value: float
    boundary: bool


def t_optimum(gamma, gamma_prime):
    """Minimiser and minimum of t^-gamma' (1 + t)^gamma over t > 0."""
    if not 0 <= gamma_prime < gamma:
        raise ValueError(f"need 0 <= gamma' < gamma, got gamma'={gamma_prime}, gamma={gamma}")
    if gamma_prime == 0:
        # infimum approached as t -> 0+, not attained
        return TOptimum(0.0, 1.0, True)
    rest = gamma - gamma_prime
    value = gamma**gamma / (gamma_prime**gamma_prime * rest**rest)
    return TOptimum(gamma_prime / rest, value, False)


def gamma_prime_range(d, gamma):
    """Admissible interval (lo, hi, lo_closed) for gamma' with the pole guard applied."""
    hi = gamma - min(GAMMA_PRIME_GUARD, gamma / 2)
    if d == 1:
        lo, closed = 0.5, True
    elif d == 2:
        lo, closed = 0.0, False
    else:
        lo, closed = 0.0, True
    return lo, hi, closed


def lt_constant_tilde(d, gamma, gamma_prime):
    """Half-plane Lieb-Thirring constant C~_{d,p} for a given gamma' (proven, not sharp)."""
    lo, hi, closed = gamma_prime_range(d, gamma)
    ok_lo = gamma_prime >= lo if closed else gamma_prime > lo
    if not (ok_lo and gamma_prime <= hi + 1e-15):
        raise ValueError(f"gamma'={gamma_prime} not admissible for d={d}, gamma={gamma}")
    rest = gamma - gamma_prime
    return (
        clr_constant(d, d / 2 + gamma_prime)
        * gamma ** (gamma + 1)
        / (_pow0(gamma_prime) * rest**rest)
        * gamma_function(d / 2 + gamma_prime + 1)
        * gamma_function(rest)
        / gamma_function(d / 2 + gamma + 1)
    )


def best_lt_constant(d, gamma, points=GAMMA_PRIME_GRID):
    """Smallest C~ over a uniform gamma' grid; returns (value, gamma')."""
    lo, hi, closed = gamma_prime_range(d, gamma)
    if hi < lo:
        raise ValueError(f"empty gamma' range for d={d}, gamma={gamma}")
    grid = np.linspace(lo, hi, points)
    if not closed:
        grid = grid[grid > lo]
        if grid.size == 0:
            grid = np.array([hi])
    values = [lt_constant_tilde(d, gamma, float(g)) for g in grid]
    k = int(np.argmin(values))
    return values[k], float(grid[k])


def semiclassical_constant(gamma, d):
    if gamma < 0 or d < 1:
        raise ValueError(f"need gamma >= 0 and d >= 1, got ({gamma}, {d})")
    return (4 * math.pi) ** (-d / 2) * gamma_function(gamma + 1) / gamma_function(d / 2 + gamma + 1)


def semiclassical_bracket(gamma, d):
    """(L^cl, C~ at gamma'=0, C_d L^cl) for d >= 3; the first must not exceed the other two."""
    if d < 3:
        raise ValueError("the gamma'=0 bracket needs d >= 3")
    lcl = semiclassical_constant(gamma, d)
    cd = clr_constant(d, d / 2) * gamma_function(d / 2 + 1) * (4 * math.pi) ** (d / 2)
    return lcl, lt_constant_tilde(d, gamma, 0.0), cd * lcl


@dataclass(frozen=True)
class LayerCake:
    direct: float
    quadrature: float
    rel_err: float


def layer_cake_check(spectrum, gamma, alpha):
    """Compare sum (Re l + a Im l)_-^gamma with gamma * int_0^inf N(< -s) s^{gamma-1} ds.

    The counting function is a step function of the threshold s, so the integral
    is evaluated exactly step by step.
    """
    if not gamma > 0:
        raise ValueError(f"layer-cake check needs gamma > 0, got {gamma}")
    lam, mult = _eigen_arrays(spectrum)
    values = lam.real + alpha * lam.imag
    direct = negative_part_power_sum(values, mult, gamma)
    depth = np.maximum(-values, 0.0)
    keep = depth > 0
    depth, weight = depth[keep], mult[keep]
    order = np.argsort(depth)
    depth, weight = depth[order], weight[order]
    quad = 0.0
    previous = 0.0
    remaining = weight.sum()
    for level, w in zip(depth, weight):
        # gamma * int_prev^level s^(gamma-1) ds, with N = remaining on this step
        quad += remaining * (level**gamma - previous**gamma)
        previous = level
        remaining -= w
    scale = max(abs(direct), abs(quad))
    rel = 0.0 if scale == 0 else abs(direct - quad) / scale
    return LayerCake(float(direct), float(quad), rel)


def _eigen_arrays(spectrum):
    items = getattr(spectrum, "items", spectrum)
    lam = np.array([it.lam for it in items], dtype=complex)
    mult = np.array([it.alg_mult for it in items], dtype=float)
    return lam, mult


def constants_table(ds, gammas):
    """Rows of constants for every admissible (d, gamma) pair."""
    rows = []
    for d in ds:
        for g in gammas:
            if not is_admissible(d, g):
                continue
            p = d / 2 + g
            row = {"d": d, "gamma": g, "p": p, "label": "proven, not sharp"}
            row["tau_d"] = unit_ball_volume(d)
            row["C_clr"] = clr_constant(d, p)
            row["L_cl"] = semiclassical_constant(g, d)
            if g > (0.5 if d == 1 else 0.0):
                row["C_lt"], row["gamma_prime"] = best_lt_constant(d, g)
            else:
                row["C_lt"], row["gamma_prime"] = None, None
            if p > 1:
                row["K_q"] = cwikel_Kq(2 * p)
            rows.append(row)
    return rows
