"""Probability measures on configuration space and their marginals.

Two families drive the randomized sweeps: products of isotropic Gaussian
mixtures (closed-form Riesz interactions through the confluent
hypergeometric function, so Monte Carlo results can be cross-checked
exactly) and determinantal measures of Slater states (built in the
manybody module).  ``MeasureSample`` is the common weighted-sample
container with the summed one-body marginal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import _accel
from .core import PointConfig
from .density import Density, cartesian_from_callable
from .special import gamma, sphere_area


@dataclass(frozen=True)
class GaussianMixture:
    """Isotropic Gaussian mixture probability density on R^d."""

    d: int
    weights: np.ndarray  # (ncomp,), sums to 1
    centers: np.ndarray  # (ncomp, d)
    sigmas: np.ndarray  # (ncomp,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        s = np.asarray(self.sigmas, dtype=float)
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0.0):
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        if np.any(s <= 0.0):
            raise ValueError("mixture widths must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "sigmas", s)

    @property
    def ncomp(self) -> int:
        return self.weights.size

    def pdf(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.zeros(y.shape[0])
        for w, c, s in zip(self.weights, self.centers, self.sigmas):
            r2 = np.sum((y - c) ** 2, axis=1)
            out += w * np.exp(-0.5 * r2 / s**2) / ((2.0 * np.pi) ** (self.d / 2) * s**self.d)
        return out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        comps = rng.choice(self.ncomp, size=n, p=self.weights)
        pts = rng.normal(size=(n, self.d))
        return self.centers[comps] + pts * self.sigmas[comps, None]

    # -- closed-form Riesz integrals -----------------------------------

    def riesz_point(self, c: np.ndarray, lam: float) -> float:
        """E |Y - c|^(-lam) for Y distributed by the mixture."""
        return float(
            sum(
                w * _gaussian_inverse_moment(self.d, lam, np.linalg.norm(m - c), s)
                for w, m, s in zip(self.weights, self.centers, self.sigmas)
            )
        )

    def riesz_self(self, lam: float) -> float:
        """D_lam of the mixture density (mass 1): 1/2 E |Y - Y'|^(-lam)."""
        total = 0.0
        for wa, ma, sa in zip(self.weights, self.centers, self.sigmas):
            for wb, mb, sb in zip(self.weights, self.centers, self.sigmas):
                sig = float(np.hypot(sa, sb))
                total += wa * wb * _gaussian_inverse_moment(
                    self.d, lam, float(np.linalg.norm(ma - mb)), sig
                )
        return 0.5 * total

    def lq_integral_mc(self, q: float, n: int, rng: np.random.Generator) -> float:
        """Plug-in Monte Carlo estimate of int rho^q = E_rho[rho^(q-1)]."""
        y = self.sample(n, rng)
        return float(np.mean(self.pdf(y) ** (q - 1.0)))

    def to_density(self, points_per_side: int = 48, pad_sigmas: float = 6.0) -> Density:
        lo = (self.centers - pad_sigmas * self.sigmas[:, None]).min(axis=0)
        hi = (self.centers + pad_sigmas * self.sigmas[:, None]).max(axis=0)
        span = float(np.max(hi - lo))
        mid = 0.5 * (lo + hi)
        lo = mid - 0.5 * span
        hi = mid + 0.5 * span
        return cartesian_from_callable(
            self.pdf, lo=lo, hi=hi, shape=(points_per_side,) * self.d, d=self.d
        )


def _gaussian_inverse_moment(d: int, lam: float, dist: float, sigma: float) -> float:
    """E |Z|^(-lam) for Z ~ N(mu, sigma^2 I_d) with |mu| = dist (lam < d)."""
    if not lam < d:
        raise ValueError("inverse moment needs lam < d")
    omega = (dist / sigma) ** 2
    pref = sigma**-lam * 2.0 ** (-0.5 * lam) * gamma(0.5 * (d - lam)) / gamma(0.5 * d)
    return float(pref * _sp.hyp1f1(0.5 * lam, 0.5 * d, -0.5 * omega))


def random_mixture(d: int, rng: np.random.Generator, max_comp: int = 3,
                   center_scale: float = 2.0) -> GaussianMixture:
    """Random mixture of <= max_comp isotropic Gaussians (sweep family)."""
    ncomp = int(rng.integers(1, max_comp + 1))
    raw = rng.random(ncomp) + 0.2
    weights = raw / raw.sum()
    centers = rng.normal(scale=center_scale, size=(ncomp, d))
    sigmas = np.exp(rng.uniform(np.log(0.4), np.log(2.0), size=ncomp))
    return GaussianMixture(d, weights, centers, sigmas)


@dataclass(frozen=True)
class MeasureSample:
    """Weighted Monte Carlo sample of a probability measure on R^(dM).

    ``marginal`` is the summed one-body marginal rho_mu (mass M).  For
    product measures the generating single-particle ``mixture`` is kept so
    closed-form values remain available next to the sampled ones.
    """

    M: int
    samples: np.ndarray  # (n, M, d)
    weights: np.ndarray  # (n,)
    marginal: Density
    mixture: GaussianMixture | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if s.ndim != 3 or s.shape[1] != self.M:
            raise ValueError("samples must have shape (n, M, d)")
        if w.shape != (s.shape[0],) or np.any(w < 0.0):
            raise ValueError("weights must be nonnegative, one per sample")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if abs(self.marginal.mass() - self.M) > 0.05 * self.M:
            raise ValueError("marginal mass must equal the particle count")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.samples.shape[2]

    def expect_pair_sum(self, lam: float) -> float:
        """E sum_{n<m} |Y_n - Y_m|^(-lam) over the sample."""
        vals = np.array([_accel.pair_sum(cfg, lam) for cfg in self.samples])
        return float(np.dot(self.weights, vals))

    def expect_attraction(self, R: PointConfig, Z: float, lam: float) -> float:
        """E sum_{m,k} Z |Y_m - R_k|^(-lam) over the sample."""
        n, M, d = self.samples.shape
        flat = self.samples.reshape(n * M, d)
        diff = flat[:, None, :] - R.points[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        per_particle = np.sum(dist**-lam, axis=1).reshape(n, M).sum(axis=1)
        return float(Z * np.dot(self.weights, per_particle))


def product_measure(
    mixture: GaussianMixture, M: int, n_samples: int, seed: int,
    grid_points: int = 32,
) -> MeasureSample:
    """I.i.d. product of ``M`` draws from the mixture; rho_mu = M * mixture."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = mixture.sample(n_samples * M, rng).reshape(n_samples, M, mixture.d)
    weights = np.full(n_samples, 1.0 / n_samples)
    marginal = mixture.to_density(points_per_side=grid_points).scale(float(M))
    return MeasureSample(M, samples, weights, marginal, mixture=mixture)


def integral_delta_power(
    mixture: GaussianMixture,
    R: PointConfig,
    lam: float,
    n_samples: int = 20_000,
    seed: int = 0,
) -> float:
    """int rho(y) delta_R(y)^(-lam) dy for a mixture rho of mass 1.

    Importance sampling with a half/half proposal of the mixture itself and
    singularity-matched balls |y - R_k|^(-lam) around each nucleus, so the
    integrand stays bounded and the estimator has finite variance.
    """
    d = mixture.d
    if not lam < d:
        raise ValueError("delta_R^(-lam) is integrable only for lam < d")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    K = R.K
    if K >= 2:
        a = 0.75 * float(np.min(_accel.nn_dist_within(R.points)))
    else:
        a = float(np.median(mixture.sigmas))
    s_area = sphere_area(d)
    ball_norm = (d - lam) / (s_area * a ** (d - lam))

    n_mix = n_samples // 2
    n_ball = n_samples - n_mix
    pts_mix = mixture.sample(n_mix, rng)
    ks = rng.integers(0, K, size=n_ball)
    dirs = rng.normal(size=(n_ball, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = a * rng.random(n_ball) ** (1.0 / (d - lam))
    pts_ball = R.points[ks] + dirs * radii[:, None]
    pts = np.vstack([pts_mix, pts_ball])

    delta = _accel.min_dist_to_points(pts, R.points)
    f = delta**-lam * mixture.pdf(pts)
    # proposal density at the sampled points
    diff = pts[:, None, :] - R.points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    ball_pdf = np.where(dist < a, ball_norm * dist**-lam, 0.0).sum(axis=1) / K
    q = 0.5 * mixture.pdf(pts) + 0.5 * ball_pdf
    return float(np.mean(f / q))
