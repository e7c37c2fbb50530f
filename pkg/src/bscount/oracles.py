"""Independent numerical oracles for the closed forms in ``constants``.

Nothing here calls the closed-form routine it is meant to check.
"""

import math

import numpy as np
from scipy import integrate, optimize


def weak_norm_sup(d, q, eps, grid_points=4001):
    """Numerical sup of F(t)^{1/q}: log-grid bracketing followed by golden-section refinement.

    Returns (sup value, argmax). For q = d the sup is the t -> 0+ limit and the
    argmax is reported as 0.
    """
    tau = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    t_max = eps**-0.5 / (2 * math.pi)

    def log_f(t):
        inner = (2 * math.pi * t) ** -2 - eps
        if inner <= 0:
            return -math.inf
        return math.log(tau) + q * math.log(t) + (d / 2) * math.log(inner)

    if q == d:
        # F is decreasing; evaluate the limit from F(t) = tau (2pi)^-d (1 - (2 pi t)^2 eps)^{d/2}
        t = t_max * 1e-9
        return math.exp(log_f(t) / q), 0.0
    ts = t_max * np.geomspace(1e-8, 1 - 1e-12, grid_points)
    vals = np.array([log_f(t) for t in ts])
    k = int(np.argmax(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    res = optimize.minimize_scalar(
        lambda s: -log_f(s), bracket=(lo, ts[k], hi), method="golden", tol=1e-14
    )
    return math.exp(-res.fun / q), float(res.x)


def kss_quadrature(eps, cutoff=None):
    """int_R (xi^2 + eps)^-1 by adaptive quadrature on (-X, X) plus an asymptotic tail."""
    x = cutoff if cutoff is not None else 50.0 * math.sqrt(eps)
    core, _ = integrate.quad(lambda s: 1.0 / (s * s + eps), -x, x, epsabs=0, epsrel=1e-13, limit=200)
    # int_X^inf ds/(s^2+eps) = sum_k (-eps)^k X^-(2k+1) / (2k+1), converging for X > sqrt(eps)
    tail = 0.0
    for k in range(60):
        tail += (-eps) ** k * x ** (-(2 * k + 1)) / (2 * k + 1)
    return core + 2 * tail


def t_grid_minimum(gamma, gamma_prime, points=200001):
    """Minimum of t^-gamma' (1+t)^gamma on a log grid, refined by bounded Brent."""
    ts = np.geomspace(1e-8, 1e6, points)
    vals = ts ** (-gamma_prime) * (1 + ts) ** gamma
    k = int(np.argmin(vals))
    if k in (0, points - 1):
        return float(vals[k]), float(ts[k])
    res = optimize.minimize_scalar(
        lambda t: t ** (-gamma_prime) * (1 + t) ** gamma,
        bounds=(ts[k - 1], ts[k + 1]),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.fun), float(res.x)


def beta_quadrature(a, b):
    """int_0^1 s^(a-1) (1-s)^(b-1) ds by adaptive quadrature with algebraic end weights."""
    val, _ = integrate.quad(
        lambda s: 1.0, 0.0, 1.0, weight="alg", wvar=(a - 1, b - 1), epsabs=0, epsrel=1e-13
    )
    return val
