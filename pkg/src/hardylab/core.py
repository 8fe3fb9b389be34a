"""Parameter validation, explicit constants and geometric primitives.

The admissible parameter range is 0 < s < d/2 with s <= 1; the borderline
case d = 2s is rejected unless explicitly enabled, because only the
two-dimensional trial-state pipeline and the coherent-state diagnostics
are meaningful there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .special import gamma, unit_ball_volume


class ParameterError(ValueError):
    """Raised when (d, s) violates the admissible range."""


@dataclass(frozen=True)
class Params:
    """Validated (d, s) pair with the derived exponents.

    q = 1 + 2s/d is the semiclassical integrability exponent and
    remainder_exponent = s(d-2s)/d^2 governs the relative error of the
    large-N law.  ``borderline`` marks the admitted d = 2s case.
    """

    d: int
    s: float
    q: float = field(init=False)
    remainder_exponent: float = field(init=False)
    borderline: bool = False

    def __post_init__(self):
        object.__setattr__(self, "q", 1.0 + 2.0 * self.s / self.d)
        object.__setattr__(
            self, "remainder_exponent", self.s * (self.d - 2.0 * self.s) / self.d**2
        )
        if self.d < 1 or self.d != int(self.d):
            raise ParameterError(f"d must be a positive integer, got {self.d!r}")
        if not (0.0 < self.s <= 1.0):
            if self.s > 1.0:
                raise ParameterError(f"s > 1 is out of range (got s={self.s})")
            raise ParameterError(f"s must be positive, got {self.s!r}")
        if self.borderline:
            if self.d != 2.0 * self.s:
                raise ParameterError(
                    "borderline flag only admits d = 2s "
                    f"(got d={self.d}, s={self.s})"
                )
        elif self.d == 2.0 * self.s:
            raise ParameterError(f"borderline d = 2s (d={self.d}, s={self.s})")
        elif self.s > self.d / 2.0:
            raise ParameterError(f"s >= d/2 (d={self.d}, s={self.s})")
        if self.d > 2.0 * self.s:
            assert self.remainder_exponent > 0.0
        # always true in the admitted range; kept as an explicit record
        assert 2.0 * self.s**2 - self.s * (self.d - 2.0) + self.d > 0.0


def validate_params(d: int, s: float, allow_borderline: bool = False) -> Params:
    """Construct Params, rejecting anything outside the admitted range."""
    if d == 2.0 * s and allow_borderline:
        return Params(d=int(d), s=float(s), borderline=True)
    return Params(d=int(d), s=float(s))


def c_tf(p: Params) -> float:
    """Semiclassical (Thomas-Fermi) constant (4 pi)^s / (1 + 2s/d) * Gamma(1 + d/2)^(2s/d)."""
    return (4.0 * math.pi) ** p.s / p.q * gamma(1.0 + p.d / 2.0) ** (2.0 * p.s / p.d)


@dataclass(frozen=True)
class PointConfig:
    """K pairwise-distinct points in R^d ("nuclei")."""

    points: np.ndarray  # shape (K, d)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("PointConfig needs a (K, d) array with K >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def K(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def require_distinct(self):
        if self.K >= 2:
            dmin = float(np.min(_accel.nn_dist_within(self.points)))
            if not dmin > 0.0:
                raise ValueError("coincident points are not admitted")


def delta_to_config(R: PointConfig, y: np.ndarray) -> np.ndarray:
    """delta_R(y) = min_k |y - R_k| for one point or a batch of points."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    out = _accel.min_dist_to_points(np.atleast_2d(y), R.points)
    return float(out[0]) if single else out


def delta_within_config(X: np.ndarray) -> np.ndarray:
    """delta_n(X) = min_{m != n} |X_n - X_m| for every point of X (needs >= 2 points)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 2:
        raise ValueError("nearest-neighbor distances need at least two points")
    return _accel.nn_dist_within(X)


def delta_k(R: PointConfig, k: int) -> float:
    """delta_k(R) = min_{l != k} |R_k - R_l| (undefined for K = 1)."""
    if R.K < 2:
        raise ValueError("delta_k is undefined for a single point")
    return float(delta_within_config(R.points)[k])


def voronoi_potentials(R: PointConfig, p: Params):
    """Screened potential V_R and constant U_R of the one-body bound.

    V_R(y) = sum_k |y - R_k|^(-2s) - delta_R(y)^(-2s) >= 0 (the subtracted
    term is one of the summands) and
    U_R = sum_{k<l} |R_k - R_l|^(-2s) + sum_k delta_k(R)^(-2s).
    """
    if R.K < 2:
        raise ValueError("voronoi_potentials needs K >= 2")
    R.require_distinct()
    lam = 2.0 * p.s
    pts = R.points

    def v_r(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        yy = np.atleast_2d(y)
        diff = yy[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        vals = np.sum(dist**-lam, axis=1) - dist.min(axis=1) ** -lam
        return float(vals[0]) if single else vals

    pair = _accel.pair_sum(pts, lam)
    u_r = pair + float(np.sum(delta_within_config(pts) ** -lam))
    return v_r, u_r


def omega_d(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    return unit_ball_volume(d)


__all__ = [
    "ParameterError",
    "Params",
    "PointConfig",
    "validate_params",
    "c_tf",
    "delta_to_config",
    "delta_within_config",
    "delta_k",
    "voronoi_potentials",
    "omega_d",
    "gamma",
]
