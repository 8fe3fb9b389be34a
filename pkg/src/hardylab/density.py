"""Gridded nonnegative densities on radial or Cartesian grids.

A radial density is piecewise constant on spherical shells given by a
vector of radii edges; a Cartesian density is piecewise constant on the
cells of a box grid.  All integrals (mass, L^p) are exact for the
piecewise-constant representative, which keeps scaling identities exact:
``dilate`` moves the grid, so mass and L^p scalings hold to roundoff.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .special import unit_ball_volume


@dataclass(frozen=True)
class Density:
    layout: str  # "radial" | "cartesian"
    d: int
    values: np.ndarray  # (n,) shell values, or C-order flattened cell values
    edges: np.ndarray | None = None  # radial: (n+1,) increasing radii
    lo: np.ndarray | None = None  # cartesian: box corners
    hi: np.ndarray | None = None
    shape: tuple | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
            raise ValueError("density values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)
        if self.layout == "radial":
            edges = np.asarray(self.edges, dtype=float)
            if edges.ndim != 1 or edges.size != vals.size + 1:
                raise ValueError("radial layout needs n+1 edges for n values")
            if edges[0] < 0.0 or np.any(np.diff(edges) <= 0.0):
                raise ValueError("edges must be nonnegative and increasing")
            object.__setattr__(self, "edges", edges)
        elif self.layout == "cartesian":
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            shape = tuple(int(m) for m in self.shape)
            if lo.size != self.d or hi.size != self.d or len(shape) != self.d:
                raise ValueError("lo/hi/shape must have length d")
            if int(np.prod(shape)) != vals.size:
                raise ValueError("values size does not match shape")
            if np.any(hi <= lo):
                raise ValueError("box must have positive side lengths")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
            object.__setattr__(self, "shape", shape)
        else:
            raise ValueError(f"unknown layout {self.layout!r}")

    # -- geometry -------------------------------------------------------

    def cell_measures(self) -> np.ndarray:
        if self.layout == "radial":
            wd = unit_ball_volume(self.d)
            return wd * np.diff(self.edges**self.d)
        h = (self.hi - self.lo) / np.asarray(self.shape)
        return np.full(self.values.size, float(np.prod(h)))

    def centers(self) -> np.ndarray:
        """Radial: representative radius per shell (geometric mean when possible).
        Cartesian: (ncells, d) cell centers in C order."""
        if self.layout == "radial":
            e = self.edges
            inner = e[:-1]
            out = np.where(inner > 0.0, np.sqrt(inner * e[1:]), 0.5 * e[1:])
            return out
        h = (self.hi - self.lo) / np.asarray(self.shape)
        axes = [
            self.lo[a] + h[a] * (np.arange(self.shape[a]) + 0.5)
            for a in range(self.d)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    # -- integrals ------------------------------------------------------

    def mass(self) -> float:
        return float(np.dot(self.values, self.cell_measures()))

    def lp_integral(self, p: float) -> float:
        """integral of rho^p (exact for the piecewise-constant function)."""
        return float(np.dot(self.values**p, self.cell_measures()))

    def lp_norm(self, p: float) -> float:
        return self.lp_integral(p) ** (1.0 / p)

    # -- exact rescalings -----------------------------------------------

    def scale(self, c: float) -> "Density":
        return self._replace_values(c * self.values)

    def dilate(self, t: float) -> "Density":
        """rho_t(x) = t^d rho(t x): shrink the grid by t, lift values by t^d."""
        if t <= 0.0:
            raise ValueError("dilation factor must be positive")
        vals = self.values * t**self.d
        if self.layout == "radial":
            return Density("radial", self.d, vals, edges=self.edges / t)
        return Density(
            "cartesian", self.d, vals, lo=self.lo / t, hi=self.hi / t, shape=self.shape
        )

    def _replace_values(self, vals: np.ndarray) -> "Density":
        if self.layout == "radial":
            return Density("radial", self.d, vals, edges=self.edges)
        return Density(
            "cartesian", self.d, vals, lo=self.lo, hi=self.hi, shape=self.shape
        )

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.layout == "radial":
            return {
                "layout": "radial",
                "d": self.d,
                "edges": self.edges.tolist(),
                "values": self.values.tolist(),
            }
        return {
            "layout": "cartesian",
            "d": self.d,
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "shape": list(self.shape),
            "values": self.values.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Density":
        if obj["layout"] == "radial":
            return cls("radial", int(obj["d"]), obj["values"], edges=np.asarray(obj["edges"]))
        return cls(
            "cartesian",
            int(obj["d"]),
            obj["values"],
            lo=np.asarray(obj["lo"]),
            hi=np.asarray(obj["hi"]),
            shape=tuple(obj["shape"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Density":
        return cls.from_json_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["layout", "d", "param"])
        if self.layout == "radial":
            w.writerow(["radial", self.d, f"n={self.values.size}"])
            w.writerow(["r_lo", "r_hi", "value"])
            for lo, hi, v in zip(self.edges[:-1], self.edges[1:], self.values):
                w.writerow([f"{lo:.17g}", f"{hi:.17g}", f"{v:.17g}"])
        else:
            param = (
                "shape=" + "x".join(str(m) for m in self.shape)
                + ";lo=" + ",".join(f"{v:.17g}" for v in self.lo)
                + ";hi=" + ",".join(f"{v:.17g}" for v in self.hi)
            )
            w.writerow(["cartesian", self.d, param])
            w.writerow([f"x{a+1}" for a in range(self.d)] + ["value"])
            for center, v in zip(self.centers(), self.values):
                w.writerow([f"{c:.17g}" for c in center] + [f"{v:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Density":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["layout", "d", "param"]:
            raise ValueError("bad density CSV header")
        layout, d, param = rows[1][0], int(rows[1][1]), rows[1][2]
        data = rows[3:]
        if layout == "radial":
            lo = np.array([float(r[0]) for r in data])
            hi = np.array([float(r[1]) for r in data])
            vals = np.array([float(r[2]) for r in data])
            edges = np.append(lo, hi[-1])
            return cls("radial", d, vals, edges=edges)
        meta = dict(item.split("=", 1) for item in param.split(";"))
        shape = tuple(int(m) for m in meta["shape"].split("x"))
        boxlo = np.array([float(v) for v in meta["lo"].split(",")])
        boxhi = np.array([float(v) for v in meta["hi"].split(",")])
        vals = np.array([float(r[-1]) for r in data])
        return cls("cartesian", d, vals, lo=boxlo, hi=boxhi, shape=shape)


# ----------------------------------------------------------------------
# grid builders
# ----------------------------------------------------------------------

def log_radial_edges(n: int, r_min: float, r_max: float) -> np.ndarray:
    """n log-spaced shells spanning [r_min, r_max]."""
    if not (0.0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    return np.geomspace(r_min, r_max, n + 1)


def radial_from_callable(f, edges: np.ndarray, d: int) -> Density:
    """Sample a radial profile at shell representative radii."""
    edges = np.asarray(edges, dtype=float)
    e = edges[:-1]
    centers = np.where(e > 0.0, np.sqrt(e * edges[1:]), 0.5 * edges[1:])
    vals = np.asarray(f(centers), dtype=float)
    return Density("radial", d, np.maximum(vals, 0.0), edges=edges)


def cartesian_from_callable(f, lo, hi, shape, d: int) -> Density:
    """Sample a function of position at the cell centers of a box grid."""
    tmp = Density(
        "cartesian", d, np.zeros(int(np.prod(shape))), lo=np.asarray(lo, float),
        hi=np.asarray(hi, float), shape=tuple(shape),
    )
    vals = np.asarray(f(tmp.centers()), dtype=float)
    return tmp._replace_values(np.maximum(vals, 0.0))


def gaussian_radial(n: int, r_min: float, r_max: float, d: int, sigma: float = 1.0,
                    mass: float = 1.0) -> Density:
    """Normalized isotropic Gaussian of the given mass on a log-radial grid."""
    edges = log_radial_edges(n, r_min, r_max)
    norm = mass / ((2.0 * np.pi) ** (d / 2.0) * sigma**d)
    rho = radial_from_callable(
        lambda r: norm * np.exp(-0.5 * (r / sigma) ** 2), edges, d
    )
    return rho


def uniform_ball_radial(n: int, r_min: float, r_max: float, d: int,
                        radius: float = 1.0, mass: float = 1.0) -> Density:
    """Uniform density of the given mass on a centered ball.

    The cell crossing the ball edge carries the exact partial volume, so the
    gridded density is the L1 projection of the ball onto the grid.
    """
    edges = log_radial_edges(n, r_min, r_max)
    val = mass / (unit_ball_volume(d) * radius**d)
    clipped = np.minimum(edges, radius)
    frac = np.diff(clipped**d) / np.diff(edges**d)
    return Density("radial", d, val * frac, edges=edges)
