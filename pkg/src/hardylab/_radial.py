"""Exact cell-pair reduction of the Riesz double integral on radial grids.

For a density that is piecewise constant on spherical shells, the double
integral D_lam = 1/2 iint rho rho' |x-x'|^(-lam) reduces to a quadratic
form over shells,

    D = 1/2 sum_ij rho_i rho_j T_ij,
    T_ij = iint_{shell_i x shell_j} A(r, r') dV dV',

where A(r, r') is the spherical average of the kernel over directions,
A(r, r') = max(r,r')^(-lam) * phi(min/max).  T_ij is evaluated to
quadrature accuracy (no midpoint rule anywhere), so the discrete energy
is the exact Riesz energy of the piecewise-constant density.  That makes
dilation covariance and positivity hold to roundoff.

On a log-uniform grid T_ij depends on (i, j) only through |i-j| up to an
analytic prefactor, so a single table of n one-dimensional integrals
builds the full matrix.  Tables are cached per (d, lam, n, spacing).
"""

from __future__ import annotations

import math

import numpy as np

from .special import gamma, sphere_area

# shared panel structure for the angular quadrature: geometric theta-panels
# covering [~1e-13, pi] resolve every near-singularity scale at once
_GL_NODES = 12


def _gl_rule(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _theta_panels():
    edges = [math.pi / 2.0**k for k in range(44, -1, -1)]
    x, w = _gl_rule(_GL_NODES)
    nodes = []
    weights = []
    lo = 0.0
    for hi in edges:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
        lo = hi
    return np.concatenate(nodes), np.concatenate(weights)


_THETA_NODES, _THETA_WEIGHTS = _theta_panels()


def angular_factor_w(ws: np.ndarray, d: int, lam: float) -> np.ndarray:
    """phi as a function of w = 1 - t, evaluated in the cancellation-free form
    |e - t e'|^2 = w^2 + 2 t (1 - cos theta).  Vectorized over w in (0, 1]."""
    ws = np.asarray(ws, dtype=float)
    if d == 1:
        return 0.5 * (ws**-lam + (2.0 - ws) ** -lam)
    one_minus_cos = 2.0 * np.sin(0.5 * _THETA_NODES) ** 2
    meas = np.sin(_THETA_NODES) ** (d - 2) * _THETA_WEIGHTS
    norm = math.sqrt(math.pi) * gamma((d - 1) / 2.0) / gamma(d / 2.0)
    block = max(1, int(2e6) // _THETA_NODES.size)
    flat = ws.ravel()
    res = np.empty(flat.size)
    for start in range(0, flat.size, block):
        w = flat[start : start + block, None]
        base = w * w + 2.0 * (1.0 - w) * one_minus_cos[None, :]
        res[start : start + block] = base ** (-0.5 * lam) @ meas
    return res.reshape(ws.shape) / norm


def angular_factor(ts: np.ndarray, d: int, lam: float) -> np.ndarray:
    """phi(t): spherical average of |e - t e'|^(-lam) over unit directions.

    phi(0) = 1; phi is singular at t = 1 when lam >= d-1.  Prefer
    ``angular_factor_w`` when 1 - t is known more accurately than t.
    """
    return angular_factor_w(1.0 - np.asarray(ts, dtype=float), d, lam)


def angular_average_kernel(r: float, rp: float, d: int, lam: float) -> float:
    """A(r, r'): average of |x - x'|^(-lam) over |x| = r, |x'| = rp."""
    hi = max(r, rp)
    lo = min(r, rp)
    if hi <= 0.0:
        raise ValueError("radii must be positive")
    return float(hi**-lam * angular_factor(np.array([lo / hi]), d, lam)[0])


def _graded_nodes(v_hi: float, m: float, n_panels: int = 8, n_gl: int = 12):
    """Nodes/weights for int_0^v_hi f(v) dv with an endpoint singularity at 0.

    Uses v = v_hi * sigma^m to soften a v^(alpha-1) singularity when
    m * alpha >= ~2, then dyadic panels toward sigma = 0.
    """
    x, w = _gl_rule(n_gl)
    nodes = []
    weights = []
    hi = 1.0
    for k in range(n_panels):
        lo = hi / 2.0 if k < n_panels - 1 else 0.0
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        sig = mid + half * x
        nodes.append(v_hi * sig**m)
        weights.append(half * w * v_hi * m * sig ** (m - 1.0))
        hi = lo
    return np.concatenate(nodes), np.concatenate(weights)


def _plain_nodes(v_lo: float, v_hi: float, n_panels: int = 4, n_gl: int = 12):
    x, w = _gl_rule(n_gl)
    edges = np.linspace(v_lo, v_hi, n_panels + 1)
    nodes = []
    weights = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _exp_int(c: float, a: float, b: float) -> np.ndarray:
    """int_a^b e^(c x) dx, vectorized over arrays a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (np.exp(c * b) - np.exp(c * a)) / c


def shell_pair_integral(
    xl_i: float, xr_i: float, xl_j: float, xr_j: float, d: int, lam: float
) -> float:
    """T_ij / S_{d-1}^2 for log-coordinate cells [xl_i, xr_i] <= [xl_j, xr_j].

    Cells must be identical or non-overlapping with j to the right.
    """
    c = 2.0 * d - lam
    if xl_i == xl_j and xr_i == xr_j:
        # same shell: 2 int_0^delta e^(-d v) phi(e^-v) int_{xl+v}^{xr} e^(c x) dx dv
        delta = xr_i - xl_i
        m = max(1.0, math.ceil(2.5 / (d - lam))) if d - lam < 2.5 else 1.0
        v, w = _graded_nodes(delta, m)
        inner = _exp_int(c, xl_i + v, xr_i)
        vals = 2.0 * np.exp(-d * v) * angular_factor_w(-np.expm1(-v), d, lam) * inner
        return float(np.dot(w, vals))
    if xl_j < xr_i - 1e-15 * max(1.0, abs(xr_i)):
        raise ValueError("shells must be ordered and non-overlapping")
    # disjoint: v = y - x in [xl_j - xr_i, xr_j - xl_i]
    v_lo = max(0.0, xl_j - xr_i)
    v_hi = xr_j - xl_i
    if v_lo <= 1e-12 * (xr_i - xl_i):
        m = max(1.0, math.ceil(2.5 / (d - lam + 1.0)))
        v, w = _graded_nodes(v_hi, m)
    else:
        v, w = _plain_nodes(v_lo, v_hi)
    x_lo = np.maximum(xl_i, xl_j - v)
    x_hi = np.minimum(xr_i, xr_j - v)
    inner = np.where(x_hi > x_lo, _exp_int(c, x_lo, np.maximum(x_hi, x_lo)), 0.0)
    vals = np.exp((d - lam) * v) * angular_factor_w(-np.expm1(-v), d, lam) * inner
    return float(np.dot(w, vals))


_TABLE_CACHE: dict[tuple, np.ndarray] = {}


def _is_log_uniform(edges: np.ndarray) -> tuple[bool, float]:
    if edges[0] <= 0.0:
        return False, 0.0
    x = np.log(edges)
    steps = np.diff(x)
    delta = float(steps.mean())
    return bool(np.all(np.abs(steps - delta) < 1e-9 * max(delta, 1e-30))), delta


def radial_pair_matrix(edges: np.ndarray, d: int, lam: float) -> np.ndarray:
    """Full matrix T_ij of shell-pair Riesz integrals for a log-uniform grid."""
    if not 0.0 < lam < d:
        raise ValueError(f"Riesz exponent must satisfy 0 < lam < d, got {lam}")
    edges = np.asarray(edges, dtype=float)
    uniform, delta = _is_log_uniform(edges)
    if not uniform:
        raise ValueError(
            "radial Riesz energies require a log-uniform grid "
            "(build one with log_radial_edges)"
        )
    n = edges.size - 1
    key = (d, round(lam, 12), n, round(delta, 12))
    g = _TABLE_CACHE.get(key)
    if g is None:
        # offset table on the reference cell [0, delta]
        g = np.empty(n)
        for k in range(n):
            g[k] = shell_pair_integral(
                0.0, delta, k * delta, (k + 1) * delta, d, lam
            )
        _TABLE_CACHE[key] = g
    s = sphere_area(d)
    left = edges[:-1]
    idx = np.arange(n)
    komat = np.abs(idx[:, None] - idx[None, :])
    # cells (i, j) are the reference pair (0, |i-j|) shifted by x_min(i,j),
    # and the integrand is homogeneous of log-degree 2d - lam in that shift
    minmat = np.minimum(left[:, None], left[None, :])
    T = (s * s) * minmat ** (2.0 * d - lam) * g[komat]
    return T
