"""Ideal direct imaging baseline.

A diffraction-limited camera records the time-averaged image-plane
intensity: each source contributes a Gaussian spot

    G(r) = (2 / pi w^2) exp(-2 |r|^2 / w^2)

centred on its (projected, possibly moving) position.  The Fisher
information about the separation is the classical information of that
intensity profile, computed by Gauss-Legendre quadrature over the image
plane.  Direct imaging loses the linear-in-x information available to mode
sorting: for all motion models here its small-x information scales as x^2
(or worse is dwarfed by the mode sorter's constant), which is the
comparison the `compare-direct` command quantifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import DynamicsModel, QuadratureSpec, Static, _refine
from .fisher import NumericalHealthError
from .modes import SourceGeometry

__all__ = [
    "ImagingGrid",
    "di_asymptotics",
    "di_density",
    "di_fisher_information",
]

# Motion averages of image-plane Gaussians are smooth, so modest node
# budgets converge; the imaging default is looser than the mode-space one.
DI_QUADRATURE = QuadratureSpec(nodes=32, tol=1e-7, max_doublings=2)


@dataclass(frozen=True)
class ImagingGrid:
    """Tensor Gauss-Legendre grid over the square [-L, L]^2.

    ``half_width`` is L in units of w; None sizes it automatically from the
    scene (largest projected source excursion plus six beam widths, beyond
    which the spots are numerically zero).
    """

    half_width: Optional[float] = None
    nodes: int = 200

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("imaging grid needs at least 16 nodes per axis")
        if self.half_width is not None and not self.half_width > 0:
            raise ValueError("grid half width must be positive")

    def resolve_half_width(self, model: DynamicsModel, g: SourceGeometry) -> float:
        if self.half_width is not None:
            return self.half_width
        reach = model.max_scale() * g.x + model.max_offset() + abs(g.xi)
        return reach + 6.0

    def points(self, model: DynamicsModel, g: SourceGeometry, nodes: Optional[int] = None):
        """(X, Y, weights) flattened over the grid, in physical units."""
        n = nodes or self.nodes
        L = self.resolve_half_width(model, g) * g.w
        t, wt = np.polynomial.legendre.leggauss(n)
        axis = L * t
        waxis = L * wt
        X, Y = np.meshgrid(axis, axis, indexing="ij")
        W = np.outer(waxis, waxis)
        return X.ravel(), Y.ravel(), W.ravel()


def _scene_nodes(model: DynamicsModel, g: SourceGeometry, n: int):
    """Projected source positions and their x-derivatives at motion nodes."""
    nd = model.nodes(n)
    x_eff = nd.a * g.x + nd.b
    s = np.sin(nd.theta)
    ux, uy = np.cos(nd.phi), np.sin(nd.phi)
    rho1 = (x_eff + g.xi) * s
    rho2 = (x_eff - g.xi) * s
    pos1 = (g.w * rho1 * ux, g.w * rho1 * uy)
    pos2 = (-g.w * rho2 * ux, -g.w * rho2 * uy)
    return nd.weight, pos1, pos2, (ux, uy), nd.a * s


def _intensity_and_slope(model, g, n, X, Y, want_slope=True):
    """Averaged intensity I(r) and, optionally, dI/dx on flat point arrays."""
    weight, (x1, y1), (x2, y2), (ux, uy), das = _scene_nodes(model, g, n)
    w2 = g.w * g.w
    norm = 2.0 / (math.pi * w2)
    I = np.zeros(X.shape)
    dI = np.zeros(X.shape) if want_slope else None
    chunk = max(1, 2_000_000 // max(X.size, 1))
    for j0 in range(0, weight.size, chunk):
        sl = slice(j0, j0 + chunk)
        d1x = X[:, None] - x1[None, sl]
        d1y = Y[:, None] - y1[None, sl]
        d2x = X[:, None] - x2[None, sl]
        d2y = Y[:, None] - y2[None, sl]
        g1 = norm * np.exp(-2.0 * (d1x * d1x + d1y * d1y) / w2)
        g2 = norm * np.exp(-2.0 * (d2x * d2x + d2y * d2y) / w2)
        I += (g.v * g1 + (1.0 - g.v) * g2) @ weight[sl]
        if want_slope:
            along1 = d1x * ux[None, sl] + d1y * uy[None, sl]
            along2 = d2x * ux[None, sl] + d2y * uy[None, sl]
            slope = (4.0 / g.w) * (g.v * g1 * along1 - (1.0 - g.v) * g2 * along2)
            dI += slope @ (weight[sl] * das[sl])
    return I, dI


def di_density(
    model: Optional[DynamicsModel],
    g: SourceGeometry,
    points,
    quad: Optional[QuadratureSpec] = None,
) -> np.ndarray:
    """Averaged image-plane intensity at the given points.

    ``points`` is array-like with trailing axis (x, y) in physical units;
    the result integrates to one over the plane.  model=None means static.
    """
    quad = quad or DI_QUADRATURE
    model = model or Static.from_geometry(g)
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError("points must have a trailing axis of length 2")
    flat = pts.reshape(-1, 2)

    def evaluate(n):
        I, _ = _intensity_and_slope(model, g, n, flat[:, 0], flat[:, 1], want_slope=False)
        return I

    I, _err = _refine(evaluate, quad, "image intensity")
    return I.reshape(pts.shape[:-1])


def di_fisher_information(
    model: Optional[DynamicsModel],
    g: SourceGeometry,
    grid: Optional[ImagingGrid] = None,
    quad: Optional[QuadratureSpec] = None,
    check_grid: bool = False,
) -> float:
    """Fisher information about d carried by the averaged image.

    Motion nodes refine under ``quad``; the image-plane grid is fixed by
    ``grid`` unless ``check_grid`` is set, which recomputes on a doubled
    grid and insists the result moved by less than a part in 1e4.
    """
    quad = quad or DI_QUADRATURE
    grid = grid or ImagingGrid()
    model = model or Static.from_geometry(g)

    def fi_for(grid_nodes):
        X, Y, W = grid.points(model, g, grid_nodes)

        def evaluate(n):
            I, dI = _intensity_and_slope(model, g, n, X, Y)
            peak = float(np.max(I))
            live = I > 1e-300 * peak
            integrand = np.zeros_like(I)
            integrand[live] = dI[live] ** 2 / I[live]
            return np.array([float(W @ integrand)])

        val, _err = _refine(evaluate, quad, "imaging information")
        return float(val[0]) / (4.0 * g.w * g.w)

    fi = fi_for(grid.nodes)
    if check_grid:
        fine = fi_for(2 * grid.nodes)
        scale = max(abs(fine), 1e-30)
        if abs(fine - fi) / scale > 1e-4:
            raise NumericalHealthError(
                f"imaging grid not converged: {fi:.8g} vs {fine:.8g} at doubled resolution"
            )
        fi = fine
    return fi


def di_asymptotics(scenario: str, x: float, **params) -> float:
    """Small-separation w^2 F for direct imaging of the standard scenarios.

    Leading behaviour in the reduced separation x (mean separation for the
    oscillations).  For a static unequal pair the information saturates at
    a constant set by the brightness asymmetry; everything else vanishes
    like x^2.  kappa shifts the axis point as in the mode-space formulas.
    """
    theta = params.pop("theta", math.pi / 2.0)
    v = params.pop("v", 0.5)
    kappa = params.pop("kappa", 0.0)
    s2 = math.sin(theta) ** 2
    lever = 1.0 - kappa + 2.0 * kappa * v
    if scenario == "static":
        # an offset axis point only translates a static pattern, so kappa
        # drops out here
        _reject_extra(params, scenario)
        if v != 0.5:
            return (2.0 * v - 1.0) ** 2 * s2
        return 8.0 * x * x * s2 * s2
    if scenario == "phi-rotation":
        _reject_extra(params, scenario)
        return 4.0 * x * x * s2 * s2 * lever
    if scenario == "theta-rotation":
        _reject_extra(params, scenario)
        return 2.0 * x * x * lever
    if scenario == "uniform-sphere":
        _reject_extra(params, scenario)
        return 16.0 * x * x / 9.0
    if scenario == "oscillation-proportional":
        a1 = params.pop("a1")
        _reject_extra(params, scenario)
        return 2.0 * (2.0 + a1 * a1) ** 2 * x * x
    if scenario == "oscillation-fixed":
        a2 = params.pop("a2")
        _reject_extra(params, scenario)
        return 8.0 * (1.0 - 4.0 * a2 * a2) * x * x
    raise ValueError(f"unknown scenario: {scenario!r}")


def _reject_extra(params: dict, scenario: str):
    if params:
        raise ValueError(f"unexpected parameters for {scenario!r}: {sorted(params)}")
