"""Source-motion models and configuration averaging.

A dynamics model describes how the scene configuration (azimuth phi,
inclination theta, and possibly the separation itself) moves during the
exposure, either as a periodic trajectory sampled uniformly in time or as a
normalised density over orientations.  Detection statistics for slow
detectors follow by averaging the static per-configuration probabilities
over the model, which for ergodic trajectories equals the density average
over the occupied configurations.

Every model reduces to a common quadrature form: a weighted set of nodes
(phi_j, theta_j, a_j, b_j, w_j) where the instantaneous reduced separation
is x_eff = a * x + b.  Orientation models have a = 1, b = 0; separation
oscillations put the motion in a and b.  Periodic trajectories use uniform
(trapezoid) nodes over one period, which converges spectrally for smooth
periodic integrands; orientation densities use Gauss-Legendre tensor grids.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .modes import (
    ModeIndex,
    ModeProbabilities,
    SourceGeometry,
    mode_indices,
    mode_probability_tables,
)

__all__ = [
    "CustomDensity",
    "DiracDensity",
    "DynamicsModel",
    "Nodes",
    "PeriodicTrajectory",
    "PhiRotation",
    "QuadratureConvergenceError",
    "QuadratureSpec",
    "SeparationOscillation",
    "Static",
    "ThetaRotation",
    "UniformSphere",
    "averaged_mode_probabilities",
    "distribution_average",
    "model_from_dict",
    "time_average",
]


class QuadratureConvergenceError(RuntimeError):
    """Successive quadrature refinements disagree beyond the tolerance."""

    def __init__(self, message: str, achieved: float, tolerance: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e}, tolerance {tolerance:.3e})")
        self.achieved = achieved
        self.tolerance = tolerance


@dataclass(frozen=True)
class QuadratureSpec:
    """Node budget and refinement tolerance for configuration averages.

    ``nodes`` is the starting node count (per axis for tensor grids).  The
    result is accepted once doubling the nodes moves it by less than ``tol``
    (absolute, checked component-wise); otherwise refinement continues up to
    ``max_doublings`` and then fails loudly.
    """

    nodes: int = 256
    tol: float = 1e-10
    max_doublings: int = 3

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("quadrature needs at least 16 nodes")
        if not self.tol > 0:
            raise ValueError("quadrature tolerance must be positive")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be non-negative")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class Nodes:
    """Weighted configuration nodes; x_eff = a * x + b per node."""

    phi: np.ndarray
    theta: np.ndarray
    a: np.ndarray
    b: np.ndarray
    weight: np.ndarray

    @property
    def scales_with_x(self) -> bool:
        """True when x_eff is proportional to x at every node."""
        return bool(np.all(self.b == 0.0))


def _as_nodes(phi, theta, a, b, weight) -> Nodes:
    phi, theta, a, b, weight = np.broadcast_arrays(
        np.asarray(phi, float),
        np.asarray(theta, float),
        np.asarray(a, float),
        np.asarray(b, float),
        np.asarray(weight, float),
    )
    return Nodes(phi=phi.ravel(), theta=theta.ravel(), a=a.ravel(), b=b.ravel(), weight=weight.ravel())


class DynamicsModel:
    """Base class; concrete models implement nodes() and sample()."""

    kind: str = "abstract"
    is_orientation: bool = True

    def nodes(self, n: int) -> Nodes:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int):
        """Draw configurations; returns arrays (phi, theta, a, b)."""
        raise NotImplementedError

    def max_scale(self) -> float:
        """Upper bound of the multiplicative part of x_eff / x (grid sizing)."""
        return 1.0

    def max_offset(self) -> float:
        """Upper bound of the additive part of x_eff (grid sizing)."""
        return 0.0

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{self.kind} model is not serialisable")


@dataclass(frozen=True)
class Static(DynamicsModel):
    """No motion; the scene stays at a fixed orientation."""

    phi: float = 0.0
    theta: float = math.pi / 2.0

    kind = "static"

    @classmethod
    def from_geometry(cls, g: SourceGeometry) -> "Static":
        return cls(phi=g.phi, theta=g.theta)

    def nodes(self, n: int) -> Nodes:
        one = np.ones(1)
        return _as_nodes(self.phi * one, self.theta * one, one, 0.0 * one, one)

    def sample(self, rng, size):
        return (
            np.full(size, self.phi),
            np.full(size, self.theta),
            np.ones(size),
            np.zeros(size),
        )

    def to_dict(self):
        return {"kind": "static", "phi": self.phi, "theta": self.theta}


@dataclass(frozen=True)
class PeriodicTrajectory:
    """A periodic map t -> value, bundling the callable with its period."""

    fn: Callable[[np.ndarray], np.ndarray]
    period: float = 1.0

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("trajectory period must be positive")

    def __call__(self, t):
        return self.fn(t)


def _time_nodes(n: int, period: float) -> np.ndarray:
    return period * np.arange(n) / n


@dataclass(frozen=True)
class PhiRotation(DynamicsModel):
    """Azimuth follows a periodic trajectory at fixed inclination theta."""

    theta: float = math.pi / 2.0
    trajectory: Optional[PeriodicTrajectory] = None
    kind_tag: str = field(default="phi-rotation")

    is_orientation = True

    @property
    def kind(self):  # type: ignore[override]
        return self.kind_tag

    @property
    def period(self) -> float:
        return 1.0 if self.trajectory is None else self.trajectory.period

    @classmethod
    def constant_rate(cls, theta: float = math.pi / 2.0, period: float = 1.0) -> "PhiRotation":
        traj = PeriodicTrajectory(lambda t: 2.0 * math.pi * np.asarray(t) / period, period)
        return cls(theta=theta, trajectory=traj, kind_tag="phi-rotation")

    @classmethod
    def oscillating(
        cls, theta: float = math.pi / 2.0, period: float = 1.0, amplitude: float = math.pi / 4.0
    ) -> "PhiRotation":
        traj = PeriodicTrajectory(
            lambda t: amplitude * np.sin(2.0 * math.pi * np.asarray(t) / period), period
        )
        return cls(theta=theta, trajectory=traj, kind_tag="phi-oscillation")

    def _phi_of_t(self, t):
        if self.trajectory is None:
            return 2.0 * math.pi * np.asarray(t) / self.period
        return self.trajectory(t)

    def nodes(self, n: int) -> Nodes:
        t = _time_nodes(n, self.period)
        phi = np.asarray(self._phi_of_t(t), dtype=float)
        return _as_nodes(phi, self.theta, 1.0, 0.0, np.full(n, 1.0 / n))

    def sample(self, rng, size):
        t = rng.uniform(0.0, self.period, size)
        phi = np.asarray(self._phi_of_t(t), dtype=float)
        return phi, np.full(size, self.theta), np.ones(size), np.zeros(size)

    def to_dict(self):
        if self.kind_tag not in ("phi-rotation", "phi-oscillation"):
            raise NotImplementedError("custom phi trajectories are not serialisable")
        return {"kind": self.kind_tag, "theta": self.theta, "period": self.period}


@dataclass(frozen=True)
class ThetaRotation(DynamicsModel):
    """Inclination sweeps 2 pi t / T at fixed azimuth (angles unbounded)."""

    phi: float = 0.0
    period: float = 1.0

    kind = "theta-rotation"

    def nodes(self, n: int) -> Nodes:
        t = _time_nodes(n, self.period)
        theta = 2.0 * math.pi * t / self.period
        return _as_nodes(self.phi, theta, 1.0, 0.0, np.full(n, 1.0 / n))

    def sample(self, rng, size):
        theta = 2.0 * math.pi * rng.uniform(0.0, 1.0, size)
        return np.full(size, self.phi), theta, np.ones(size), np.zeros(size)

    def to_dict(self):
        return {"kind": "theta-rotation", "phi": self.phi, "period": self.period}


@dataclass(frozen=True)
class UniformSphere(DynamicsModel):
    """Axis direction distributed uniformly over the sphere.

    The orientation density is p(phi, theta) = sin(theta) / (4 pi) on
    [0, 2 pi) x [0, pi].  Quadrature uses uniform azimuth nodes and
    Gauss-Legendre in cos(theta), which integrates the polynomial-in-cos
    integrands of the mode machinery essentially exactly.
    """

    kind = "uniform-sphere"

    def nodes(self, n: int) -> Nodes:
        phi = 2.0 * math.pi * np.arange(n) / n
        c, cw = np.polynomial.legendre.leggauss(n)
        theta = np.arccos(c)
        PHI, THETA = np.meshgrid(phi, theta, indexing="ij")
        W = np.outer(np.full(n, 1.0 / n), 0.5 * cw)
        return _as_nodes(PHI, THETA, 1.0, 0.0, W)

    def sample(self, rng, size):
        phi = 2.0 * math.pi * rng.uniform(0.0, 1.0, size)
        theta = np.arccos(1.0 - 2.0 * rng.uniform(0.0, 1.0, size))
        return phi, theta, np.ones(size), np.zeros(size)

    def to_dict(self):
        return {"kind": "uniform-sphere"}


class CustomDensity(DynamicsModel):
    """User-supplied orientation density p(phi, theta) on [0,2pi) x [0,pi].

    The density must integrate to one; construction checks this with a
    Gauss-Legendre grid.  Densities off by at most 1e-3 are rescaled with a
    warning, anything worse is rejected.  Densities are assumed bounded with
    at most finitely many discontinuities.
    """

    kind = "custom-density"
    is_orientation = True

    def __init__(self, density: Callable, check_nodes: int = 96, _table=None):
        self._density = density
        self._table = _table
        norm = self._integral(check_nodes)
        err = abs(norm - 1.0)
        if err > 1e-3:
            raise ValueError(f"density integrates to {norm:.6f}, expected 1 within 1e-3")
        if err > 1e-6:
            warnings.warn(
                f"density integrates to {norm:.8f}; rescaling to unit mass",
                stacklevel=2,
            )
        self._scale = 1.0 / norm

    @classmethod
    def from_table(cls, table) -> "CustomDensity":
        """Build from (phi, theta, weight) triplets on a regular grid."""
        rows = [list(map(float, row)) for row in table]
        return cls(_TableDensity(rows), _table=rows)

    def to_dict(self):
        if self._table is None:
            raise NotImplementedError("only table-backed densities are serialisable")
        return {"kind": "custom-density", "density-table": self._table}

    def density(self, phi, theta):
        return self._scale * np.asarray(self._density(phi, theta), dtype=float)

    def _integral(self, n: int) -> float:
        g, gw = np.polynomial.legendre.leggauss(n)
        phi = math.pi * (g + 1.0)          # [0, 2 pi]
        wphi = math.pi * gw
        theta = 0.5 * math.pi * (g + 1.0)  # [0, pi]
        wth = 0.5 * math.pi * gw
        PHI, THETA = np.meshgrid(phi, theta, indexing="ij")
        vals = np.asarray(self._density(PHI, THETA), dtype=float)
        return float(np.einsum("i,j,ij->", wphi, wth, vals))

    def nodes(self, n: int) -> Nodes:
        g, gw = np.polynomial.legendre.leggauss(n)
        phi = math.pi * (g + 1.0)
        wphi = math.pi * gw
        theta = 0.5 * math.pi * (g + 1.0)
        wth = 0.5 * math.pi * gw
        PHI, THETA = np.meshgrid(phi, theta, indexing="ij")
        W = np.outer(wphi, wth) * self.density(PHI, THETA)
        return _as_nodes(PHI, THETA, 1.0, 0.0, W)

    def sample(self, rng, size):
        # rejection sampling against a tabulated envelope
        grid_phi = np.linspace(0.0, 2.0 * math.pi, 181)
        grid_th = np.linspace(0.0, math.pi, 181)
        PHI, THETA = np.meshgrid(grid_phi, grid_th, indexing="ij")
        bound = 1.05 * float(np.max(self.density(PHI, THETA)))
        if not bound > 0:
            raise ValueError("density appears to vanish everywhere on the envelope grid")
        phi = np.empty(size)
        theta = np.empty(size)
        filled = 0
        for _ in range(10_000):
            todo = size - filled
            if todo == 0:
                break
            draw = max(todo * 2, 64)
            cand_phi = 2.0 * math.pi * rng.uniform(0.0, 1.0, draw)
            cand_th = math.pi * rng.uniform(0.0, 1.0, draw)
            accept = rng.uniform(0.0, bound, draw) < self.density(cand_phi, cand_th)
            take = min(int(np.sum(accept)), todo)
            phi[filled : filled + take] = cand_phi[accept][:take]
            theta[filled : filled + take] = cand_th[accept][:take]
            filled += take
        if filled < size:
            raise RuntimeError("rejection sampling failed to fill the request")
        return phi, theta, np.ones(size), np.zeros(size)


@dataclass(frozen=True)
class SeparationOscillation(DynamicsModel):
    """The separation itself oscillates at fixed orientation.

    Two variants:

    * proportional, amplitude scaling with the mean separation:
      x(t) = x * (1 + a1 * cos(2 pi t / T)) with 0 < a1 < 1;
    * fixed amplitude: x(t) = x + a2 * cos(2 pi t / T) with a2 > 0.

    The fixed-amplitude variant permits a2 > x, where the sources swap sides
    during the cycle; that regime is legitimate and flagged, not an error.
    """

    phi: float = 0.0
    theta: float = math.pi / 2.0
    period: float = 1.0
    a1: Optional[float] = None
    a2: Optional[float] = None

    is_orientation = False

    def __post_init__(self):
        if (self.a1 is None) == (self.a2 is None):
            raise ValueError("exactly one of a1 (proportional) or a2 (fixed) must be set")
        if self.a1 is not None and not 0.0 < self.a1 < 1.0:
            raise ValueError("proportional amplitude a1 must lie in (0, 1)")
        if self.a2 is not None and not self.a2 > 0.0:
            raise ValueError("fixed amplitude a2 must be positive")

    @property
    def kind(self):  # type: ignore[override]
        return "oscillation-proportional" if self.a1 is not None else "oscillation-fixed"

    @classmethod
    def proportional(cls, a1: float, phi: float = 0.0, theta: float = math.pi / 2.0, period: float = 1.0):
        return cls(phi=phi, theta=theta, period=period, a1=a1)

    @classmethod
    def fixed_amplitude(cls, a2: float, phi: float = 0.0, theta: float = math.pi / 2.0, period: float = 1.0):
        return cls(phi=phi, theta=theta, period=period, a2=a2)

    def interchanges(self, x: float) -> bool:
        """True when the sources swap sides during the cycle (a2 > x)."""
        return self.a2 is not None and self.a2 > x

    def max_scale(self) -> float:
        return 1.0 + self.a1 if self.a1 is not None else 1.0

    def max_offset(self) -> float:
        return self.a2 if self.a2 is not None else 0.0

    def nodes(self, n: int) -> Nodes:
        t = _time_nodes(n, self.period)
        c = np.cos(2.0 * math.pi * t / self.period)
        if self.a1 is not None:
            a = 1.0 + self.a1 * c
            b = np.zeros(n)
        else:
            a = np.ones(n)
            b = self.a2 * c
        return _as_nodes(self.phi, self.theta, a, b, np.full(n, 1.0 / n))

    def sample(self, rng, size):
        t = rng.uniform(0.0, self.period, size)
        c = np.cos(2.0 * math.pi * t / self.period)
        if self.a1 is not None:
            return np.full(size, self.phi), np.full(size, self.theta), 1.0 + self.a1 * c, np.zeros(size)
        return np.full(size, self.phi), np.full(size, self.theta), np.ones(size), self.a2 * c

    def to_dict(self):
        out = {"kind": self.kind, "phi": self.phi, "theta": self.theta, "period": self.period}
        if self.a1 is not None:
            out["a1"] = self.a1
        else:
            out["a2"] = self.a2
        return out


# ---------------------------------------------------------------------------
# averaging operations
# ---------------------------------------------------------------------------


def _refine(evaluate, quad: QuadratureSpec, what: str):
    """Run evaluate(n) under node doubling until stable within quad.tol."""
    n = quad.nodes
    coarse = np.asarray(evaluate(n), dtype=float)
    for _ in range(quad.max_doublings + 1):
        fine = np.asarray(evaluate(2 * n), dtype=float)
        err = float(np.max(np.abs(fine - coarse)))
        if err <= quad.tol:
            return fine, err
        coarse = fine
        n *= 2
    raise QuadratureConvergenceError(f"{what} did not converge", err, quad.tol)


def _vectorised(fn, args):
    """Apply fn over parallel argument arrays, vectorised when possible."""
    try:
        out = np.asarray(fn(*args), dtype=float)
        if out.shape == args[0].shape:
            return out
    except Exception:
        pass
    return np.array([float(fn(*scalar)) for scalar in zip(*args)])


def time_average(trajectory, integrand, quad: Optional[QuadratureSpec] = None, period: Optional[float] = None):
    """Average integrand(config) over one period of a periodic trajectory.

    ``trajectory`` maps t to a configuration (any value the integrand
    accepts); its period is read from a ``period`` attribute unless passed
    explicitly.  Uses the uniform (trapezoid) rule over one period with node
    doubling; spectrally accurate for smooth periodic integrands.
    """
    quad = quad or DEFAULT_QUADRATURE
    T = period if period is not None else getattr(trajectory, "period", None)
    if T is None:
        raise ValueError("trajectory period unknown; pass period=")
    if not T > 0:
        raise ValueError("trajectory period must be positive")

    def evaluate(n):
        t = _time_nodes(n, T)
        cfg = trajectory(t)
        try:
            vals = np.asarray(integrand(cfg), dtype=float)
            if vals.shape != t.shape:
                raise ValueError
        except Exception:
            vals = np.array([float(integrand(trajectory(ti))) for ti in t])
        return np.mean(vals)

    value, _err = _refine(evaluate, quad, "time average")
    return float(value)


@dataclass(frozen=True)
class DiracDensity:
    """Point mass at a single orientation (useful as a degenerate density)."""

    phi: float
    theta: float


def distribution_average(density, integrand, quad: Optional[QuadratureSpec] = None):
    """Average integrand(phi, theta) over an orientation density.

    ``density`` may be a DiracDensity (the integrand is evaluated at the
    point), a CustomDensity, or a plain callable p(phi, theta) normalised on
    [0, 2 pi) x [0, pi].  Tensor Gauss-Legendre quadrature with doubling.
    """
    quad = quad or DEFAULT_QUADRATURE
    if isinstance(density, DiracDensity):
        return float(integrand(density.phi, density.theta))
    dens = density.density if isinstance(density, CustomDensity) else density

    def evaluate(n):
        g, gw = np.polynomial.legendre.leggauss(n)
        phi = math.pi * (g + 1.0)
        wphi = math.pi * gw
        theta = 0.5 * math.pi * (g + 1.0)
        wth = 0.5 * math.pi * gw
        PHI, THETA = np.meshgrid(phi, theta, indexing="ij")
        p = np.asarray(dens(PHI, THETA), dtype=float)
        f = _vectorised(integrand, (PHI.ravel(), THETA.ravel())).reshape(PHI.shape)
        return float(np.einsum("i,j,ij->", wphi, wth, p * f))

    value, _err = _refine(evaluate, quad, "distribution average")
    return float(value)


def _averaged_tables(model: DynamicsModel, g: SourceGeometry, modes, n: int):
    """Weighted-average p and dp/dx per mode on the model's n-point node set."""
    nd = model.nodes(n)
    x_eff = nd.a * g.x + nd.b
    P, DP = mode_probability_tables(modes, nd.phi, nd.theta, x_eff, g.v, g.xi, dxeff=nd.a)
    p = nd.weight @ P
    dp = nd.weight @ DP
    return p, dp


def averaged_mode_probabilities(
    model: DynamicsModel,
    g: SourceGeometry,
    cutoff: int = 1,
    quad: Optional[QuadratureSpec] = None,
    cutoff_kind: str = "per-index",
) -> ModeProbabilities:
    """Detection probabilities averaged over the motion model.

    For a Static model this reduces exactly to static_mode_probabilities;
    for trajectories it is the uniform time average over one period, and for
    densities the orientation average.
    """
    quad = quad or DEFAULT_QUADRATURE
    modes = mode_indices(cutoff, cutoff_kind)

    def evaluate(n):
        p, _dp = _averaged_tables(model, g, modes, n)
        return p

    p, _err = _refine(evaluate, quad, "averaged mode probabilities")
    values = {mi: float(p[i]) for i, mi in enumerate(modes)}
    overflow = 1.0 - sum(values.values())
    return ModeProbabilities(cutoff=cutoff, cutoff_kind=cutoff_kind, values=values, overflow=overflow)


def model_from_dict(spec: dict) -> DynamicsModel:
    """Rebuild a dynamics model from its serialised dictionary form."""
    if "kind" not in spec:
        raise ValueError("dynamics model dictionary needs a 'kind' key")
    kind = spec["kind"]
    get = spec.get
    if kind == "static":
        return Static(phi=get("phi", 0.0), theta=get("theta", math.pi / 2.0))
    if kind == "phi-rotation":
        return PhiRotation.constant_rate(theta=get("theta", math.pi / 2.0), period=get("period", 1.0))
    if kind == "phi-oscillation":
        return PhiRotation.oscillating(theta=get("theta", math.pi / 2.0), period=get("period", 1.0))
    if kind == "theta-rotation":
        return ThetaRotation(phi=get("phi", 0.0), period=get("period", 1.0))
    if kind == "uniform-sphere":
        return UniformSphere()
    if kind == "oscillation-proportional":
        if "a1" not in spec:
            raise ValueError("oscillation-proportional needs key 'a1'")
        return SeparationOscillation.proportional(
            spec["a1"], phi=get("phi", 0.0), theta=get("theta", math.pi / 2.0), period=get("period", 1.0)
        )
    if kind == "oscillation-fixed":
        if "a2" not in spec:
            raise ValueError("oscillation-fixed needs key 'a2'")
        return SeparationOscillation.fixed_amplitude(
            spec["a2"], phi=get("phi", 0.0), theta=get("theta", math.pi / 2.0), period=get("period", 1.0)
        )
    if kind == "custom-density":
        table = spec.get("density-table")
        if table is None:
            raise ValueError("custom-density needs key 'density-table'")
        return CustomDensity.from_table(table)
    raise ValueError(f"unknown dynamics model kind: {kind!r}")


class _TableDensity:
    """Bilinear interpolant from (phi, theta, weight) triplets on a grid.

    A class rather than a closure so table-backed models survive pickling
    (the parallel sweep path rebuilds models in worker processes).
    """

    def __init__(self, table):
        arr = np.asarray(table, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("density-table must be a list of (phi, theta, weight) triplets")
        self.phis = np.unique(arr[:, 0])
        self.thetas = np.unique(arr[:, 1])
        if self.phis.size < 2 or self.thetas.size < 2:
            raise ValueError("density-table needs at least two distinct phi and theta values")
        if self.phis.size * self.thetas.size != arr.shape[0]:
            raise ValueError("density-table triplets must form a regular phi x theta grid")
        vals = np.full((self.phis.size, self.thetas.size), np.nan)
        ip = np.searchsorted(self.phis, arr[:, 0])
        it = np.searchsorted(self.thetas, arr[:, 1])
        vals[ip, it] = arr[:, 2]
        if np.any(np.isnan(vals)):
            raise ValueError("density-table grid has missing entries")
        if np.any(vals < 0):
            raise ValueError("density-table weights must be non-negative")
        self.vals = vals

    def __call__(self, phi, theta):
        phis, thetas, vals = self.phis, self.thetas, self.vals
        phi = np.asarray(phi, float)
        theta = np.asarray(theta, float)
        i = np.clip(np.searchsorted(phis, phi) - 1, 0, phis.size - 2)
        j = np.clip(np.searchsorted(thetas, theta) - 1, 0, thetas.size - 2)
        fp = np.clip((phi - phis[i]) / (phis[i + 1] - phis[i]), 0.0, 1.0)
        ft = np.clip((theta - thetas[j]) / (thetas[j + 1] - thetas[j]), 0.0, 1.0)
        inside = (
            (phi >= phis[0]) & (phi <= phis[-1]) & (theta >= thetas[0]) & (theta <= thetas[-1])
        )
        out = (
            vals[i, j] * (1 - fp) * (1 - ft)
            + vals[i + 1, j] * fp * (1 - ft)
            + vals[i, j + 1] * (1 - fp) * ft
            + vals[i + 1, j + 1] * fp * ft
        )
        return np.where(inside, out, 0.0)
