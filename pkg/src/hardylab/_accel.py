"""Backend selection for the hot numeric kernels.

Every kernel in this module exists twice: a loop version that numba can
compile with ``@njit``, and a vectorized pure-numpy version.  Which one a
caller gets is decided once, lazily, from the environment:

* ``HARDYLAB_NO_NUMBA=1`` forces the numpy path (useful for debugging and
  as a fallback on platforms where numba is unavailable);
* otherwise numba is imported on first use and the loop versions are
  JIT-compiled with ``cache=True``.

Importing this module never imports numba, so cheap commands (``hardylab
constants``) stay fast.  Both paths are deterministic for fixed inputs;
they may differ in the last bits because summation orders differ.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "HARDYLAB_NO_NUMBA"

_jit_cache: dict[str, object] = {}


def numba_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes")


def _get_njit():
    """Import numba lazily; return None when disabled or unavailable."""
    if numba_disabled():
        return None
    if "njit" in _jit_cache:
        return _jit_cache["njit"]
    try:
        from numba import njit
    except ImportError:
        njit = None
    _jit_cache["njit"] = njit
    return njit


def _select(name: str, loop_fn, numpy_fn):
    """Return the compiled loop kernel if numba is active, else the numpy one."""
    key = f"sel:{name}"
    if key in _jit_cache:
        return _jit_cache[key]
    njit = _get_njit()
    if njit is None:
        fn = numpy_fn
    else:
        fn = njit(cache=True)(loop_fn)
    _jit_cache[key] = fn
    return fn


def active_backend() -> str:
    return "numpy" if _get_njit() is None else "numba"


# ----------------------------------------------------------------------
# pairwise inverse-power sums  sum_{n<m} |X_n - X_m|^(-lam)
# ----------------------------------------------------------------------

def _pair_sum_loop(X, lam):
    n = X.shape[0]
    d = X.shape[1]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for a in range(d):
                diff = X[i, a] - X[j, a]
                r2 += diff * diff
            total += r2 ** (-0.5 * lam)
    return total


def _pair_sum_numpy(X, lam):
    n = X.shape[0]
    if n < 2:
        return 0.0
    diff = X[:, None, :] - X[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    iu = np.triu_indices(n, k=1)
    return float(np.sum(r2[iu] ** (-0.5 * lam)))


def pair_sum(X: np.ndarray, lam: float) -> float:
    """Sum of |X_i - X_j|^(-lam) over unordered pairs."""
    fn = _select("pair_sum", _pair_sum_loop, _pair_sum_numpy)
    return float(fn(np.ascontiguousarray(X, dtype=np.float64), float(lam)))


# ----------------------------------------------------------------------
# nearest-neighbor distances
# ----------------------------------------------------------------------

def _min_dist_to_points_loop(Y, R):
    m = Y.shape[0]
    k = R.shape[0]
    d = Y.shape[1]
    out = np.empty(m)
    for i in range(m):
        best = np.inf
        for j in range(k):
            r2 = 0.0
            for a in range(d):
                diff = Y[i, a] - R[j, a]
                r2 += diff * diff
            if r2 < best:
                best = r2
        out[i] = np.sqrt(best)
    return out


def _min_dist_to_points_numpy(Y, R):
    diff = Y[:, None, :] - R[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    return np.sqrt(r2.min(axis=1))


def min_dist_to_points(Y: np.ndarray, R: np.ndarray) -> np.ndarray:
    """delta_R evaluated at each row of Y: min_k |y - R_k|."""
    fn = _select("min_dist", _min_dist_to_points_loop, _min_dist_to_points_numpy)
    return np.asarray(
        fn(
            np.ascontiguousarray(Y, dtype=np.float64),
            np.ascontiguousarray(R, dtype=np.float64),
        )
    )


def _nn_dist_within_loop(X):
    n = X.shape[0]
    d = X.shape[1]
    out = np.full(n, np.inf)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r2 = 0.0
            for a in range(d):
                diff = X[i, a] - X[j, a]
                r2 += diff * diff
            if r2 < out[i]:
                out[i] = r2
    return np.sqrt(out)


def _nn_dist_within_numpy(X):
    n = X.shape[0]
    diff = X[:, None, :] - X[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, np.inf)
    return np.sqrt(r2.min(axis=1))


def nn_dist_within(X: np.ndarray) -> np.ndarray:
    """delta_n for each point of one configuration: min over other points."""
    fn = _select("nn_dist", _nn_dist_within_loop, _nn_dist_within_numpy)
    return np.asarray(fn(np.ascontiguousarray(X, dtype=np.float64)))


# ----------------------------------------------------------------------
# plane-wave lattice sums  S(r) = sum_p exp(i p.r)
# ----------------------------------------------------------------------

def _lattice_sum_sq_loop(momenta, points):
    npts = points.shape[0]
    nmom = momenta.shape[0]
    d = points.shape[1]
    out = np.empty(npts)
    for i in range(npts):
        re = 0.0
        im = 0.0
        for q in range(nmom):
            phase = 0.0
            for a in range(d):
                phase += momenta[q, a] * points[i, a]
            re += np.cos(phase)
            im += np.sin(phase)
        out[i] = re * re + im * im
    return out


def _lattice_sum_sq_numpy(momenta, points):
    npts = points.shape[0]
    out = np.empty(npts)
    block = max(1, int(4e6) // max(1, momenta.shape[0]))
    for start in range(0, npts, block):
        stop = min(start + block, npts)
        phase = points[start:stop] @ momenta.T
        re = np.cos(phase).sum(axis=1)
        im = np.sin(phase).sum(axis=1)
        out[start:stop] = re * re + im * im
    return out


def lattice_sum_sq(momenta: np.ndarray, points: np.ndarray) -> np.ndarray:
    """|sum_p e^{i p.r}|^2 for each row r of ``points``."""
    fn = _select("lattice_sq", _lattice_sum_sq_loop, _lattice_sum_sq_numpy)
    return np.asarray(
        fn(
            np.ascontiguousarray(momenta, dtype=np.float64),
            np.ascontiguousarray(points, dtype=np.float64),
        )
    )


# ----------------------------------------------------------------------
# coherent-state kernel assembly
# ----------------------------------------------------------------------

def _coherent_kernel_loop(gx, btab, wy):
    # gx: (ny, nx) mollifier values g(y_j - x_a); btab: (ny, nδ) ball factor
    # indexed by |a - b|; wy: y-quadrature weights.  Returns (nx, nx).
    ny = gx.shape[0]
    nx = gx.shape[1]
    out = np.zeros((nx, nx))
    for a in range(nx):
        for b in range(a, nx):
            acc = 0.0
            for j in range(ny):
                acc += wy[j] * gx[j, a] * gx[j, b] * btab[j, b - a]
            out[a, b] = acc
            out[b, a] = acc
    return out


def _coherent_kernel_numpy(gx, btab, wy):
    ny, nx = gx.shape
    out = np.zeros((nx, nx))
    wg = wy[:, None] * gx
    for delta in range(nx):
        a = np.arange(0, nx - delta)
        vals = np.einsum("ja,ja->a", wg[:, a], gx[:, a + delta] * btab[:, delta][:, None])
        out[a, a + delta] = vals
        out[a + delta, a] = vals
    return out


def coherent_kernel(gx: np.ndarray, btab: np.ndarray, wy: np.ndarray) -> np.ndarray:
    """Assemble the coherent-state kernel matrix on a 1-D grid."""
    fn = _select("coherent", _coherent_kernel_loop, _coherent_kernel_numpy)
    return np.asarray(
        fn(
            np.ascontiguousarray(gx, dtype=np.float64),
            np.ascontiguousarray(btab, dtype=np.float64),
            np.ascontiguousarray(wy, dtype=np.float64),
        )
    )
