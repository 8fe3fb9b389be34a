"""Mollified plane-wave Slater determinants in a box and their energies.

The orbitals are phi_p(x) = L^(-d/2) sqrt(1_Q * zeta)(x) e^(i p.x) with p
on the (2 pi / L) lattice inside a Fermi ball |p|^2 <= mu; zeta is a
tensor cos^2 bump of side ell << L, so the indicator convolution has a
closed form per axis and the orbitals are exactly orthonormal.  All
two-body quantities reduce through the one-body matrix gamma_u; since
rho_u rho_u' - |gamma_u|^2 = L^(-2d) b(x) b(x') (N^2 - |S(x-x')|^2) with
S the lattice phase sum, the pair interaction becomes a d-dimensional
integral in r = x - x' against the box autocorrelation weight, evaluated
in polar form with the phase sums as the hot kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _accel
from .core import Params
from .density import Density
from .special import bessel_j1_array, unit_ball_volume


# ----------------------------------------------------------------------
# mollifier: cos^2 bump and its closed-form convolution with the box
# ----------------------------------------------------------------------

def _bump_cdf(t: np.ndarray, ell: float) -> np.ndarray:
    """Antiderivative of the cos^2 bump (2/ell) cos^2(pi t / ell) from -ell/2."""
    t = np.clip(t, -0.5 * ell, 0.5 * ell)
    return t / ell + 0.5 + np.sin(2.0 * math.pi * t / ell) / (2.0 * math.pi)


def box_mollified_1d(x: np.ndarray, L: float, ell: float) -> np.ndarray:
    """chi(x) = (1_[-L/2, L/2] * zeta)(x): 1 inside, C^1 ramp of width ell."""
    x = np.asarray(x, dtype=float)
    upper = _bump_cdf(x + 0.5 * L, ell)
    lower = _bump_cdf(x - 0.5 * L, ell)
    return upper - lower


@lru_cache(maxsize=16)
def _edge_energy_coef() -> float:
    """e0 = int_0^1 (chi')^2/(4 chi) dtau for the unit-ell cos^2 ramp."""

    def f(tau):
        num = (1.0 - math.cos(2.0 * math.pi * tau)) ** 2
        den = 4.0 * (tau - math.sin(2.0 * math.pi * tau) / (2.0 * math.pi))
        return num / den if den > 0 else 0.0

    val, _ = integrate.quad(f, 0.0, 1.0, limit=200)
    return float(val)


@lru_cache(maxsize=32)
def _edge_lq_coef(q: float) -> float:
    """int_0^1 ramp(tau)^q dtau for the mollified edge profile."""
    val, _ = integrate.quad(
        lambda tau: (tau - math.sin(2.0 * math.pi * tau) / (2.0 * math.pi)) ** q,
        0.0, 1.0, limit=200,
    )
    return float(val)


# ----------------------------------------------------------------------
# momentum sets
# ----------------------------------------------------------------------

def build_momentum_set(d: int, L: float, mu: float, n_target: int | None = None):
    """Lattice momenta with |p|^2 < mu, plus shell points (|p|^2 = mu) in
    lexicographic order until ``n_target`` is reached.

    Returns (momenta, fermi_mu).  Without a target the strict interior is
    returned.  The sandwich {|p|^2 < mu} <= set <= {|p|^2 <= mu} always
    holds.
    """
    if mu <= 0.0 or L <= 0.0:
        raise ValueError("mu and L must be positive")
    step = 2.0 * math.pi / L
    zmax = int(math.floor(math.sqrt(mu) / step + 1e-9))
    axes = [np.arange(-zmax, zmax + 1)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    z = np.stack([m.ravel() for m in mesh], axis=-1)
    norm2 = (step**2) * np.sum(z * z, axis=1).astype(float)
    tol = 1e-9 * max(mu, step**2)
    inside = norm2 < mu - tol
    shell = np.abs(norm2 - mu) <= tol
    momenta_in = z[inside] * step
    if n_target is None:
        out = momenta_in
    else:
        n_in = int(inside.sum())
        if n_target < n_in:
            raise ValueError(
                f"requested N={n_target} below the {n_in} momenta strictly inside mu"
            )
        need = n_target - n_in
        shell_z = z[shell]
        order = np.lexsort(tuple(shell_z[:, a] for a in range(d - 1, -1, -1)))
        if need > shell_z.shape[0]:
            raise ValueError("not enough shell momenta to reach the requested N")
        out = np.vstack([momenta_in, shell_z[order[:need]] * step])
    if out.shape[0] < 1:
        raise ValueError("empty momentum set: mu too small")
    return out, mu


def momentum_set_for_count(d: int, L: float, N: int):
    """Choose the Fermi level so the set has exactly N momenta (shell filled
    in lexicographic order)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    step = 2.0 * math.pi / L
    zmax = 2
    while True:
        axes = [np.arange(-zmax, zmax + 1)] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        z = np.stack([m.ravel() for m in mesh], axis=-1)
        norm2 = np.sort(np.sum(z * z, axis=1))
        # the N smallest cube norms are trustworthy once they fit in the
        # inscribed sphere of the cube
        if norm2.size >= N and norm2[N - 1] <= zmax**2:
            mu_z = int(norm2[N - 1])
            break
        zmax *= 2
    return build_momentum_set(d, L, step**2 * mu_z, n_target=N)


@dataclass(frozen=True)
class SlaterState:
    """Mollified free-fermion determinant in the box Q_L."""

    d: int
    L: float
    fermi_mu: float
    momenta: np.ndarray  # (N, d)
    ell: float

    def __post_init__(self):
        mom = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        object.__setattr__(self, "momenta", mom)
        if mom.shape[1] != self.d or mom.shape[0] < 1:
            raise ValueError("momenta must be a nonempty (N, d) array")
        if not self.ell <= self.L / 16.0:
            raise ValueError("mollifier width must satisfy ell <= L/16")
        norm2 = np.sum(mom * mom, axis=1)
        tol = 1e-9 * max(self.fermi_mu, 1.0)
        if np.any(norm2 > self.fermi_mu + tol):
            raise ValueError("momenta outside the Fermi ball")

    @property
    def N(self) -> int:
        return self.momenta.shape[0]

    def mollified_box(self, x: np.ndarray) -> np.ndarray:
        """b(x) = prod_a chi(x_a): the smoothed box indicator."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.ones(x.shape[0])
        for a in range(self.d):
            out *= box_mollified_1d(x[:, a], self.L, self.ell)
        return out

    def rho(self, x: np.ndarray) -> np.ndarray:
        return (self.N / self.L**self.d) * self.mollified_box(x)

    def orbital_matrix(self, x: np.ndarray) -> np.ndarray:
        """Phi(x): (npts, N) complex matrix of orbital values."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        amp = np.sqrt(np.maximum(self.mollified_box(x), 0.0)) * self.L ** (
            -0.5 * self.d
        )
        phases = x @ self.momenta.T
        return amp[:, None] * np.exp(1j * phases)


def slater_state(d: int, L: float, mu: float | None = None,
                 N: int | None = None, ell: float | None = None) -> SlaterState:
    """Build a state from either the Fermi level or a requested count."""
    if ell is None:
        ell = L / 32.0
    if N is not None:
        momenta, fermi_mu = momentum_set_for_count(d, L, N)
    elif mu is not None:
        momenta, fermi_mu = build_momentum_set(d, L, mu)
    else:
        raise ValueError("need mu or N")
    return SlaterState(d=d, L=L, fermi_mu=fermi_mu, momenta=momenta, ell=ell)


# ----------------------------------------------------------------------
# overlaps
# ----------------------------------------------------------------------

def _overlap_factor_1d(q: float, L: float, ell: float) -> float:
    """(1/L) int chi(x) e^(i q x) dx (real by symmetry)."""
    if q == 0.0:
        return 1.0
    a = 0.5 * (L - ell)
    core = 2.0 * math.sin(q * a) / q
    nodes = max(64, int(8.0 * abs(q) * ell) + 16)
    x, w = np.polynomial.legendre.leggauss(min(nodes, 512))
    lo, hi = a, a + ell
    xv = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
    wv = 0.5 * (hi - lo) * w
    edge = 2.0 * float(np.sum(wv * box_mollified_1d(xv, L, ell) * np.cos(q * xv)))
    return (core + edge) / L


def orbital_overlap(state: SlaterState, p: np.ndarray, pp: np.ndarray) -> float:
    """<phi_p, phi_p'> by numerical quadrature (1 or 0 in the continuum)."""
    p = np.asarray(p, dtype=float)
    pp = np.asarray(pp, dtype=float)
    out = 1.0
    for a in range(state.d):
        out *= _overlap_factor_1d(float(pp[a] - p[a]), state.L, state.ell)
    return out


def gram_matrix(state: SlaterState) -> np.ndarray:
    """Full orbital Gram matrix assembled from the 1-D factor table."""
    mom = state.momenta
    step = 2.0 * math.pi / state.L
    zi = np.round(mom / step).astype(np.int64)
    gram = np.ones((state.N, state.N))
    for a in range(state.d):
        diffs = zi[None, :, a] - zi[:, None, a]
        uniq = np.unique(diffs)
        vals = np.array([_overlap_factor_1d(m * step, state.L, state.ell) for m in uniq])
        gram = gram * vals[np.searchsorted(uniq, diffs)]
    return gram


# ----------------------------------------------------------------------
# density and one-body density matrix
# ----------------------------------------------------------------------

class SlaterDensityMatrix:
    """Callable rho_u and gamma_u of a Slater state."""

    def __init__(self, state: SlaterState):
        self.state = state

    def rho(self, x: np.ndarray) -> np.ndarray:
        return self.state.rho(x)

    def gamma(self, x: np.ndarray, xp: np.ndarray) -> np.ndarray:
        st = self.state
        x = np.atleast_2d(np.asarray(x, dtype=float))
        xp = np.atleast_2d(np.asarray(xp, dtype=float))
        amp = np.sqrt(np.maximum(st.mollified_box(x), 0.0)) * np.sqrt(
            np.maximum(st.mollified_box(xp), 0.0)
        )
        phases = (x - xp) @ st.momenta.T
        ssum = np.exp(1j * phases).sum(axis=1)
        return st.L**-st.d * amp * ssum

    def density(self, cells_per_side: int = 64) -> Density:
        st = self.state
        half = 0.5 * (st.L + st.ell)
        return _cartesian_density(st, -half, half, cells_per_side)


def _cartesian_density(state: SlaterState, lo: float, hi: float, m: int) -> Density:
    from .density import cartesian_from_callable

    return cartesian_from_callable(
        state.rho, lo=[lo] * state.d, hi=[hi] * state.d,
        shape=(m,) * state.d, d=state.d,
    )


def slater_density_dm(state: SlaterState) -> tuple[Density, SlaterDensityMatrix]:
    dm = SlaterDensityMatrix(state)
    return dm.density(), dm


def slater_lq_integral(state: SlaterState, q: float) -> float:
    """int rho_u^q, exact up to 1-D edge quadratures."""
    inner = state.L - state.ell + 2.0 * state.ell * _edge_lq_coef(q)
    return (state.N / state.L**state.d) ** q * inner**state.d


# ----------------------------------------------------------------------
# kinetic energy
# ----------------------------------------------------------------------

def slater_kinetic(state: SlaterState, p: Params) -> float:
    """Total kinetic energy sum_p ||(-Delta)^{s/2} phi_p||^2.

    For s = 1 the decomposition |p|^2 + mollifier edge energy is exact; for
    s < 1 each orbital is integrated in Fourier space against the separable
    profile spectrum.
    """
    mom = state.momenta
    if p.s == 1.0:
        edge = 2.0 * _edge_energy_coef() / state.ell
        return float(np.sum(mom * mom) + state.N * p.d * edge / state.L)
    return _slater_kinetic_fractional(state, p.s)


@lru_cache(maxsize=8)
def _profile_spectrum(L: float, ell: float, n_q: int = 4096):
    """|h_hat(q)|^2 table for h = sqrt(chi), on a uniform q-grid."""
    hw = 0.5 * (L + ell)
    nx = 16384
    x = np.linspace(0.0, hw, nx)
    h = np.sqrt(np.maximum(box_mollified_1d(x, L, ell), 0.0))
    q = np.linspace(0.0, 400.0 * math.pi / L, n_q)
    # cosine transform (h is even): h_hat(q) = sqrt(2/pi) int_0^inf h cos(qx) dx
    dx = x[1] - x[0]
    weights = np.full(nx, dx)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    tab = math.sqrt(2.0 / math.pi) * (np.cos(np.outer(q, x)) @ (h * weights))
    return q, tab**2


def _slater_kinetic_fractional(state: SlaterState, s: float) -> float:
    qs, spec = _profile_spectrum(state.L, state.ell)
    # per axis: xi_a = p_a + u_a with u the profile broadening
    nu = 96
    qmax = 60.0 * math.pi / state.L
    u = np.linspace(-qmax, qmax, nu)
    wu = np.full(nu, u[1] - u[0])
    wu[0] *= 0.5
    wu[-1] *= 0.5
    su = np.interp(np.abs(u), qs, spec)
    wsu = wu * su / state.L  # each axis contributes |h_hat|^2 / L (normalized)
    norm = float(np.sum(wsu))
    wsu = wsu / norm  # enforce unit mass of the broadening profile
    total = 0.0
    mesh = np.meshgrid(*([u] * state.d), indexing="ij")
    wmesh = wsu
    for _ in range(state.d - 1):
        wmesh = np.multiply.outer(wmesh, wsu)
    for pvec in state.momenta:
        xi2 = sum((pvec[a] + mesh[a]) ** 2 for a in range(state.d))
        total += float(np.sum(wmesh * xi2**s))
    return total


# ----------------------------------------------------------------------
# interaction
# ----------------------------------------------------------------------

@lru_cache(maxsize=8)
def _autocorr_table(L: float, ell: float, n: int = 4097):
    """1-D autocorrelation c(t) = int chi(x) chi(x+t) dx on [0, L+ell]."""
    tmax = L + ell
    t = np.linspace(0.0, tmax, n)
    nx = 8192
    x = np.linspace(-0.5 * tmax, 0.5 * tmax, nx)
    chi = box_mollified_1d(x, L, ell)
    dx = x[1] - x[0]
    c = np.array(
        [float(np.dot(chi, box_mollified_1d(x + ti, L, ell))) * dx for ti in t]
    )
    return t, c


@dataclass(frozen=True)
class InteractionReport:
    """Pieces of the pair-interaction reduction of a Slater state.

    ``direct_omega`` and ``exchange_omega`` carry the pair-double-integral
    normalization (no 1/2), i.e. iint_Omega rho rho' K and iint_Omega
    |gamma|^2 K; the interaction itself is half their difference.
    """

    lower_bound: float  # over Omega = {x,x' in Q_(L-ell), sqrt(mu)|x-x'| > C}
    estimate: float  # full-weight quadrature of the exact reduction
    direct_omega: float  # iint_Omega rho rho' / |x-x'|^(2s)
    exchange_omega: float  # iint_Omega |gamma|^2 / |x-x'|^(2s)
    cutoff: float


def _direction_grid(d: int, n_theta: int):
    if d == 1:
        return np.array([[1.0]]), np.array([1.0])
    if d == 2:
        th = (np.arange(n_theta) + 0.5) * math.pi / n_theta
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        wts = np.full(n_theta, 1.0 / n_theta)
        return dirs, wts
    if d == 3:
        n_z = max(8, n_theta // 8)
        zc, zw = np.polynomial.legendre.leggauss(n_z)
        ph = (np.arange(n_theta) + 0.5) * 2.0 * math.pi / n_theta
        dirs = []
        wts = []
        for z, wz in zip(zc, zw):
            rho_ = math.sqrt(max(0.0, 1.0 - z * z))
            for f in ph:
                dirs.append([rho_ * math.cos(f), rho_ * math.sin(f), z])
                wts.append(wz / (2.0 * n_theta))
        return np.asarray(dirs), np.asarray(wts)
    raise ValueError("interaction supported for d <= 3")


def slater_interaction(
    state: SlaterState,
    p: Params,
    cutoff: float = 1.5,
    n_theta: int = 256,
    n_t: int = 1024,
) -> InteractionReport:
    """Pair interaction sum_{n<m} <|u|^2, |X_n - X_m|^(-2s)>.

    Exact reduction: 1/2 L^(-2d) int (N^2 - |S(r)|^2) C_b(r) |r|^(-2s) dr
    with C_b the box autocorrelation.  ``estimate`` integrates this full
    expression; ``lower_bound`` restricts to the translation-invariant
    region and sqrt(mu)|r| > cutoff where the weight is the smaller
    prod(L - ell - |r_a|)_+, so it never exceeds the true interaction
    (the integrand is pointwise nonnegative).
    """
    st = state
    d, L, ell = st.d, st.L, st.ell
    lam = 2.0 * p.s
    a_in = L - ell
    sq_mu = math.sqrt(st.fermi_mu)
    t_cut = cutoff / sq_mu
    t_corner = math.sqrt(d) * (L + ell)

    # radial grid: geometric inside the exchange hole, uniform beyond
    t_fine = math.pi / (8.0 * sq_mu)
    t_geo = np.geomspace(max(1e-7 * t_fine, 1e-12), t_fine, 96, endpoint=False)
    n_unif = max(n_t, int((t_corner - t_fine) / t_fine) + 8)
    t_unif = np.linspace(t_fine, t_corner, n_unif)
    t = np.concatenate([t_geo, t_unif])
    wt = np.gradient(t)

    # direction weights average over half the sphere; central symmetry of the
    # integrand makes that the full spherical average, times |S^(d-1)|
    dirs, wd = _direction_grid(d, n_theta)
    angular_total = unit_ball_volume(d) * d
    ct, cv = _autocorr_table(L, ell)

    pts = (t[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    w_full = np.ones(pts.shape[0])
    w_omega = np.ones(pts.shape[0])
    for a in range(d):
        absr = np.abs(pts[:, a])
        w_full *= np.interp(absr, ct, cv)
        w_omega *= np.maximum(a_in - absr, 0.0)
    radial = (t ** (d - 1 - lam) * wt)[:, None] * wd[None, :]
    radial = radial.reshape(-1)
    mask_omega = (np.repeat(t, dirs.shape[0]) > t_cut) & (w_omega > 0.0)
    live = (w_full > 0.0) | mask_omega

    ssq = np.zeros(pts.shape[0])
    ssq[live] = _accel.lattice_sum_sq(st.momenta, pts[live])
    n2 = float(st.N) ** 2
    hole = np.maximum(n2 - ssq, 0.0)  # exact property, clamp roundoff

    pref = 0.5 * L ** (-2.0 * d) * angular_total
    estimate = pref * float(np.sum(radial * w_full * hole))
    direct = 2.0 * pref * n2 * float(
        np.sum(radial[mask_omega] * w_omega[mask_omega])
    )
    exchange = 2.0 * pref * float(
        np.sum(radial[mask_omega] * w_omega[mask_omega] * ssq[mask_omega])
    )
    lower = pref * float(
        np.sum(radial[mask_omega] * w_omega[mask_omega] * hole[mask_omega])
    )
    return InteractionReport(
        lower_bound=lower, estimate=estimate, direct_omega=direct,
        exchange_omega=exchange, cutoff=cutoff,
    )


def hardy_quotient(state: SlaterState, p: Params, **kw) -> dict:
    """kinetic / interaction lower bound: a valid upper bound for the sharp
    many-body constant at this N."""
    kin = slater_kinetic(state, p)
    inter = slater_interaction(state, p, **kw)
    if not inter.lower_bound > 0.0:
        raise ZeroDivisionError("interaction lower bound vanished (N = 1?)")
    return {
        "N": state.N,
        "kinetic": kin,
        "interaction_lower": inter.lower_bound,
        "interaction_estimate": inter.estimate,
        "direct_omega": inter.direct_omega,
        "exchange_omega": inter.exchange_omega,
        "quotient": kin / inter.lower_bound,
    }


# ----------------------------------------------------------------------
# Appendix-style diagnostics
# ----------------------------------------------------------------------

def i_epsilon(eps: float) -> tuple[float, bool]:
    """I(eps) = iint over the unit square pair of 1(|y-y'| >= eps)/|y-y'|^2.

    Returns (value, empty_flag); the inner radial integral is analytic, the
    angular one is adaptive.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if eps >= math.sqrt(2.0):
        return 0.0, True

    def inner(theta):
        c, s = math.cos(theta), math.sin(theta)
        t_hi = 1.0 / c
        if eps >= t_hi:
            return 0.0

        def F(tv):
            return math.log(tv) - (c + s) * tv + c * s * tv * tv / 2.0

        return F(t_hi) - F(eps)

    val, _ = integrate.quad(inner, 0.0, 0.25 * math.pi, limit=200)
    return 8.0 * val, False


def exchange_lattice_bound(state: SlaterState, n_radii: int = 48,
                           n_dirs: int = 32, c_min: float = 1.0) -> dict:
    """Sweep sup over c_min/sqrt(mu) <= |r| <= L/2 of |L^-2 S(r)| |r| / sqrt(mu)."""
    if state.d != 2:
        raise ValueError("the exchange lattice sweep is two-dimensional")
    sq_mu = math.sqrt(state.fermi_mu)
    radii = np.geomspace(c_min / sq_mu, state.L / 2.0, n_radii)
    th = (np.arange(n_dirs) + 0.5) * math.pi / n_dirs
    dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    ssq = _accel.lattice_sum_sq(state.momenta, pts)
    vals = np.sqrt(ssq) * np.repeat(radii, n_dirs) / (state.L**2 * sq_mu)
    return {
        "sup": float(vals.max()),
        "argmax_radius": float(np.repeat(radii, n_dirs)[int(np.argmax(vals))]),
        "n_points": pts.shape[0],
    }


def disk_kernel_prediction(state: SlaterState, r: np.ndarray) -> np.ndarray:
    """Continuum limit of L^-2 S(r) for d = 2: sqrt(mu) J_1(sqrt(mu)|r|)/(2 pi |r|)."""
    sq_mu = math.sqrt(state.fermi_mu)
    r = np.asarray(r, dtype=float)
    return sq_mu * bessel_j1_array(sq_mu * r) / (2.0 * math.pi * r)


# ----------------------------------------------------------------------
# determinantal sampling (projection kernel, sequential conditionals)
# ----------------------------------------------------------------------

def sample_slater_configurations(
    state: SlaterState, n_configs: int, seed: int = 0, max_tries: int = 600
) -> np.ndarray:
    """Exact samples of the N-point determinantal measure |u|^2.

    Sequential conditional sampling with the projection kernel: propose from
    rho_u / N, thin by the current conditional kernel, and re-orthonormalize
    the conditioning vectors after every accepted point.
    """
    st = state
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    N, d = st.N, st.d
    half = 0.5 * (st.L + st.ell)
    out = np.empty((n_configs, N, d))
    for cfg in range(n_configs):
        basis = np.zeros((N, N), dtype=complex)
        nb = 0
        for t in range(N):
            accepted = False
            for _ in range(max_tries):
                # uniform box proposal thinned by b(x) samples rho_u / N
                x = rng.uniform(-half, half, size=(1, d))
                b = float(st.mollified_box(x)[0])
                if b <= 0.0 or rng.random() >= b:
                    continue
                phi = st.orbital_matrix(x)[0]  # (N,) complex
                k_full = float(np.vdot(phi, phi).real)
                if k_full <= 0.0:
                    continue
                proj = basis[:nb] @ phi
                k_cond = k_full - float(np.vdot(proj, proj).real)
                if rng.random() < max(k_cond, 0.0) / k_full:
                    vec = np.conj(phi)
                    for j in range(nb):
                        vec = vec - basis[j] * np.vdot(basis[j], vec)
                    nrm = float(np.linalg.norm(vec))
                    if nrm < 1e-9:
                        continue  # degenerate Gram: resample
                    basis[nb] = vec / nrm
                    nb += 1
                    out[cfg, t] = x[0]
                    accepted = True
                    break
            if not accepted:
                raise RuntimeError("determinantal sampler exceeded max_tries")
    return out
