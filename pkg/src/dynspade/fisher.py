"""Fisher information and precision bounds for the separation estimate.

The mode-sorting measurement assigns each photon to a Hermite-Gauss mode
(n, m) up to a cutoff, or to an unresolved overflow bucket.  The classical
Fisher information about the separation d carried by the time-averaged
detection probabilities p_nm is

    F_d = (1 / 4 w^2) * sum_nm (dp_nm / dx)^2 / p_nm,      x = d / (2 w).

The dimensionless product w^2 F_d is the quantity to compare across
scenarios; it approaches 1 for a static pair measured along its axis and is
bounded by 1 for every motion model considered here.

By default the sum runs over the measured modes only.  ``overflow``
selects how the unresolved bucket enters: "exclude" ignores it (the natural
truncated-measurement information), "include" treats it as one extra
detector category, and "condition" gives the information per photon of the
conditional distribution given that the photon landed in a measured mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .dynamics import (
    DEFAULT_QUADRATURE,
    DynamicsModel,
    QuadratureSpec,
    SeparationOscillation,
    Static,
    _refine,
)
from .modes import (
    ModeIndex,
    SourceGeometry,
    mode_indices,
    mode_probability_tables,
    reduced_mode_tables,
)

__all__ = [
    "FisherResult",
    "NumericalHealthError",
    "StarPair",
    "asymptotic_fi",
    "c_coefficients",
    "cramer_rao_bound",
    "derivative_consistency",
    "fi_curve",
    "fisher_information",
    "proposition1_check",
    "small_separation_limit",
    "small_x_coefficient",
    "star_parameters",
]

_OVERFLOW_MODES = ("exclude", "include", "condition")


class NumericalHealthError(RuntimeError):
    """Analytic and finite-difference derivatives disagree."""


@dataclass(frozen=True)
class FisherResult:
    """Fisher information about d, per mode and total.

    ``per_mode`` maps (n, m) to its absolute contribution in the same units
    as ``total`` (1/d^2 units, so w^2 * total is dimensionless when w carries
    the length unit).  ``overflow_term`` is the extra (possibly negative)
    piece from the chosen overflow treatment; per-mode contributions plus
    the overflow term add up to the total.
    """

    per_mode: dict
    total: float
    cutoff: int
    cutoff_kind: str
    method: str
    overflow: str = "exclude"
    overflow_term: float = 0.0
    parameter: str = "d"
    w: float = 1.0

    def scaled(self) -> float:
        """The dimensionless information w^2 * F."""
        return self.w * self.w * self.total


def _probability_vectors(model: DynamicsModel, g: SourceGeometry, modes, n: int):
    """Averaged (p, dp/dx) per mode on an n-point node set."""
    nd = model.nodes(n)
    x_eff = nd.a * g.x + nd.b
    P, DP = mode_probability_tables(modes, nd.phi, nd.theta, x_eff, g.v, g.xi, dxeff=nd.a)
    return nd.weight @ P, nd.weight @ DP


def _contributions_direct(model, g, modes, n):
    p, dp = _probability_vectors(model, g, modes, n)
    safe = p > 0.0
    contrib = np.where(safe, dp * dp / np.where(safe, p, 1.0), 0.0)
    return contrib, p, dp


def _contributions_reduced(model, g, modes, n):
    """Factored path for xi == 0 and purely multiplicative motion.

    With both sources at radius x_eff = a * x the mode probabilities factor
    as p_nm = x^(2k) R_nm(x) with k = n + m, which keeps the k >= 1
    information terms finite all the way to x = 0.
    """
    nd = model.nodes(n)
    sigma = nd.a * np.sin(nd.theta)
    R_base, RP_base = reduced_mode_tables(modes, nd.phi, sigma, g.x)
    R = nd.weight @ R_base
    RP = nd.weight @ RP_base
    k = np.array([mi.n + mi.m for mi in modes], dtype=float)
    x = g.x
    xk = x ** (2.0 * k)
    p = xk * R
    dp = np.where(k > 0, 2.0 * k * x ** np.maximum(2.0 * k - 1.0, 0.0) * R, 0.0) + xk * RP
    safe = R > 0.0
    Rs = np.where(safe, R, 1.0)
    inner = 2.0 * k * R + x * RP
    with np.errstate(divide="ignore", invalid="ignore"):
        body = np.where(k > 0, x ** (2.0 * k - 2.0), 1.0) * inner * inner / Rs
        k0 = RP * RP / Rs
    contrib = np.where(safe, np.where(k > 0, body, k0), 0.0)
    return contrib, p, dp


def fisher_information(
    g: SourceGeometry,
    model: Optional[DynamicsModel] = None,
    cutoff: int = 1,
    quad: Optional[QuadratureSpec] = None,
    cutoff_kind: str = "per-index",
    method: str = "analytic",
    overflow: str = "exclude",
) -> FisherResult:
    """Fisher information about d for a geometry under a motion model.

    ``model=None`` means a static scene at the geometry's own orientation.
    ``method="fd"`` replaces the analytic probability derivatives with a
    central finite difference in x (step max(1e-5, 1e-4 x)); it exists to
    cross-check the analytic path and for exploratory use.
    """
    if overflow not in _OVERFLOW_MODES:
        raise ValueError(f"overflow must be one of {_OVERFLOW_MODES}")
    if method not in ("analytic", "fd"):
        raise ValueError("method must be 'analytic' or 'fd'")
    quad = quad or DEFAULT_QUADRATURE
    model = model or Static.from_geometry(g)
    modes = mode_indices(cutoff, cutoff_kind)
    reduced_ok = g.xi == 0.0 and model.nodes(16).scales_with_x

    def evaluate(n):
        if method == "fd":
            h = max(1e-5, 1e-4 * g.x)
            lo = g.with_separation(2.0 * g.w * (g.x - h)) if g.x - h >= 0 else None
            hi = g.with_separation(2.0 * g.w * (g.x + h))
            p, _ = _probability_vectors(model, g, modes, n)
            p_hi, _ = _probability_vectors(model, hi, modes, n)
            if lo is None:
                dp = (p_hi - p) / h
            else:
                p_lo, _ = _probability_vectors(model, lo, modes, n)
                dp = (p_hi - p_lo) / (2.0 * h)
            safe = p > 0.0
            contrib = np.where(safe, dp * dp / np.where(safe, p, 1.0), 0.0)
        elif reduced_ok:
            contrib, p, dp = _contributions_reduced(model, g, modes, n)
        else:
            contrib, p, dp = _contributions_direct(model, g, modes, n)
        s = float(np.sum(p))
        sp = float(np.sum(dp))
        if overflow == "include":
            p_over = 1.0 - s
            extra = sp * sp / p_over if p_over > 1e-12 else 0.0
        elif overflow == "condition":
            extra = -sp * sp / s if s > 0 else 0.0
        else:
            extra = 0.0
        return np.append(contrib, extra)

    vec, _err = _refine(evaluate, quad, "Fisher information")
    scale = 1.0 / (4.0 * g.w * g.w)
    per_mode = {mi: float(vec[i]) * scale for i, mi in enumerate(modes)}
    overflow_term = float(vec[-1]) * scale
    total = sum(per_mode.values()) + overflow_term
    return FisherResult(
        per_mode=per_mode,
        total=total,
        cutoff=cutoff,
        cutoff_kind=cutoff_kind,
        method=method,
        overflow=overflow,
        overflow_term=overflow_term,
        w=g.w,
    )


def fi_curve(
    model: Optional[DynamicsModel],
    xs: Sequence[float],
    cutoff: int = 1,
    v: float = 0.5,
    xi: float = 0.0,
    w: float = 1.0,
    quad: Optional[QuadratureSpec] = None,
    cutoff_kind: str = "per-index",
    overflow: str = "exclude",
) -> np.ndarray:
    """Dimensionless information w^2 F at each reduced separation in xs.

    The geometry orientation is irrelevant for orientation-averaging models;
    for model=None (static) the default phi=0, theta=pi/2 applies, so pass a
    Static model explicitly for other pointings.
    """
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        g = SourceGeometry(d=2.0 * w * float(x), w=w, v=v, xi=xi)
        res = fisher_information(
            g, model, cutoff=cutoff, quad=quad, cutoff_kind=cutoff_kind, overflow=overflow
        )
        out[i] = res.scaled()
    return out


def cramer_rao_bound(fi: float, n_photons: float) -> float:
    """Lower bound on the standard deviation of an unbiased estimate of d."""
    if n_photons <= 0:
        raise ValueError("photon number must be positive")
    if fi <= 0.0:
        return math.inf
    return 1.0 / math.sqrt(n_photons * fi)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def small_separation_limit(kappa: float = 0.0, v: float = 0.5, c: float = 1.0) -> float:
    """x -> 0 limit of w^2 F for unequal brightness and a shifted axis point.

    kappa = 2 xi w / d measures how far the rotation (or reference) point
    sits from the midpoint, in units of the half separation; v is the
    brightness share of the source at radius (x + xi) sin(theta).  c is the
    motion coefficient <(a sin theta)^2> of the model, 1 for a static pair
    measured edge-on.
    """
    if not abs(kappa) < 1.0:
        raise ValueError("kappa must satisfy |kappa| < 1 (axis point between the sources)")
    if not 0.0 < v < 1.0:
        raise ValueError("relative brightness v must lie in (0, 1)")
    if c < 0.0:
        raise ValueError("motion coefficient c cannot be negative")
    num = 1.0 - kappa + 2.0 * kappa * v
    den = (kappa - 1.0) ** 2 + 4.0 * kappa * v
    return c * num * num / den


def small_x_coefficient(model: DynamicsModel, quad: Optional[QuadratureSpec] = None) -> float:
    """The coefficient <(a sin theta)^2> entering the x -> 0 information.

    Only meaningful for models whose node separations scale with x (all
    orientation models and the proportional oscillation).
    """
    quad = quad or DEFAULT_QUADRATURE

    def evaluate(n):
        nd = model.nodes(n)
        if not nd.scales_with_x:
            raise ValueError("model separation does not scale with x; no single x->0 coefficient")
        s = nd.a * np.sin(nd.theta)
        return float(nd.weight @ (s * s))

    value, _err = _refine(evaluate, quad, "small-x coefficient")
    return float(value)


def c_coefficients(
    model: DynamicsModel, n: int, m: int, quad: Optional[QuadratureSpec] = None
) -> float:
    """Per-mode motion coefficient <(a sin theta)^(2n+2m) cos^2n phi sin^2m phi>.

    These weights carry all of the motion model that survives the x -> 0
    limit: mode (n, m) keeps information proportional to its coefficient.
    The two first-order ones add up to small_x_coefficient(model), which is
    the c passed to small_separation_limit.
    """
    if n < 0 or m < 0:
        raise ValueError("mode indices must be nonnegative")
    quad = quad or DEFAULT_QUADRATURE

    def evaluate(nodes):
        nd = model.nodes(nodes)
        if not nd.scales_with_x:
            raise ValueError("model separation does not scale with x; no single x->0 coefficient")
        radial = (nd.a * np.sin(nd.theta)) ** (2 * (n + m))
        angular = np.cos(nd.phi) ** (2 * n) * np.sin(nd.phi) ** (2 * m)
        return float(nd.weight @ (radial * angular))

    value, _err = _refine(evaluate, quad, "per-mode motion coefficient")
    return float(value)


@dataclass(frozen=True)
class StarPair:
    """A binary with luminosity ~ mass**exponent, orbiting the barycenter.

    The brighter star sits closer to the center of mass, so the rotation
    axis is offset from the midpoint of the pair: kappa and v below feed
    straight into small_separation_limit.
    """

    m1: float
    m2: float
    exponent: float = 4.0

    def __post_init__(self):
        if self.m1 <= 0 or self.m2 <= 0:
            raise ValueError("masses must be positive")

    @property
    def kappa(self) -> float:
        return (self.m2 - self.m1) / (self.m1 + self.m2)

    @property
    def v(self) -> float:
        l1 = self.m1**self.exponent
        l2 = self.m2**self.exponent
        return l1 / (l1 + l2)


def star_parameters(m1: float, m2: float, exponent: float = 4.0):
    """(kappa, v) for a mass pair; see StarPair."""
    pair = StarPair(m1, m2, exponent)
    return pair.kappa, pair.v


def asymptotic_fi(scenario: str, x: float, **params) -> float:
    """Closed-form w^2 F for the standard motion scenarios.

    "phi-rotation" is exact at every x; the others are small-x expansions to
    second order in x (or in the mean separation for the oscillations).
    Scenarios and their keyword parameters:

    * "phi-rotation": theta (default pi/2); exact.
    * "theta-rotation": phi (default 0).
    * "uniform-sphere": none.
    * "oscillation-proportional": a1; x is the mean reduced separation.
    * "oscillation-scaled": a1; fixed-amplitude motion with a2 = a1 * x.
    * "oscillation-fixed": a2; valid only away from the crossover band
      1/2 < x/a2 < 2, where neither expansion holds and a ValueError is
      raised.
    """
    if scenario == "phi-rotation":
        theta = params.pop("theta", math.pi / 2.0)
        _reject_extra(params, scenario)
        s2 = math.sin(theta) ** 2
        u = x * x * s2
        return 0.125 * s2 * math.exp(-u) * (u**3 + 4.0 * u**2 - 4.0 * u + 8.0)
    if scenario == "theta-rotation":
        phi = params.pop("phi", 0.0)
        _reject_extra(params, scenario)
        return 0.5 - x * x * (3.0 * math.cos(4.0 * phi) + 11.0) / 16.0
    if scenario == "uniform-sphere":
        _reject_extra(params, scenario)
        return 2.0 / 3.0 - 8.0 * x * x / 9.0
    if scenario == "oscillation-proportional":
        a1 = _require(params, "a1", scenario)
        _reject_extra(params, scenario)
        return 1.0 + a1**2 / 2.0 + (-7.0 * a1**4 - 64.0 * a1**2 - 16.0) * x * x / 8.0
    if scenario == "oscillation-scaled":
        a1 = _require(params, "a1", scenario)
        _reject_extra(params, scenario)
        den = a1**2 + 2.0
        return 2.0 / den + (-19.0 * a1**4 - 32.0 * a1**2 - 16.0) * x * x / (2.0 * den * den)
    if scenario == "oscillation-fixed":
        a2 = _require(params, "a2", scenario)
        _reject_extra(params, scenario)
        if a2 <= 0:
            raise ValueError("a2 must be positive")
        ratio = x / a2
        if 0.5 < ratio < 2.0:
            raise ValueError(
                f"x/a2 = {ratio:.3f} falls in the crossover band (1/2, 2) where "
                "neither fixed-amplitude expansion is trustworthy"
            )
        if ratio >= 2.0:
            return 1.0 - 2.0 * x * x + a2 * a2 * (x * x - 0.5 / (x * x) - 2.0)
        return (2.0 / a2**2 - 9.5 + 85.0 * a2**2 / 8.0) * x * x
    raise ValueError(f"unknown scenario: {scenario!r}")


def _require(params: dict, key: str, scenario: str):
    if key not in params:
        raise ValueError(f"scenario {scenario!r} needs parameter {key!r}")
    return params.pop(key)


def _reject_extra(params: dict, scenario: str):
    if params:
        raise ValueError(f"unexpected parameters for {scenario!r}: {sorted(params)}")


# ---------------------------------------------------------------------------
# consistency checks
# ---------------------------------------------------------------------------


class Proposition1Check(NamedTuple):
    averaged: float
    mean_static: float
    difference: float


def proposition1_check(
    model: DynamicsModel,
    g: SourceGeometry,
    cutoff: int = 1,
    quad: Optional[QuadratureSpec] = None,
    cutoff_kind: str = "per-index",
) -> Proposition1Check:
    """Compare averaged-probability information with the mean static one.

    For orientation motion at constant inclination the two agree exactly
    (the mode probabilities factor into an orientation part and a radial
    part); for general orientation models they agree in the x -> 0 limit.
    Oscillating separations change the radial part itself, so the identity
    does not apply and the model is rejected.
    """
    if not model.is_orientation:
        raise ValueError("the identity applies to orientation models only")
    quad = quad or DEFAULT_QUADRATURE
    averaged = fisher_information(g, model, cutoff=cutoff, quad=quad, cutoff_kind=cutoff_kind)
    modes = mode_indices(cutoff, cutoff_kind)

    def evaluate(n):
        nd = model.nodes(n)
        P, DP = mode_probability_tables(
            modes, nd.phi, nd.theta, nd.a * g.x + nd.b, g.v, g.xi, dxeff=nd.a
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(P > 0.0, DP * DP / np.where(P > 0.0, P, 1.0), 0.0)
        return float(nd.weight @ terms.sum(axis=-1))

    rhs_x, _err = _refine(evaluate, quad, "mean static information")
    mean_static = float(rhs_x) / (4.0 * g.w * g.w)
    return Proposition1Check(averaged.total, mean_static, abs(averaged.total - mean_static))


def derivative_consistency(
    g: SourceGeometry,
    model: Optional[DynamicsModel] = None,
    cutoff: int = 1,
    quad: Optional[QuadratureSpec] = None,
    tol: float = 1e-4,
) -> float:
    """Relative gap between analytic and finite-difference information.

    Raises NumericalHealthError when the gap exceeds tol; returns the gap
    otherwise.  Used by the command-line health check.
    """
    analytic = fisher_information(g, model, cutoff=cutoff, quad=quad, method="analytic")
    fd = fisher_information(g, model, cutoff=cutoff, quad=quad, method="fd")
    scale = max(abs(analytic.total), 1e-30)
    gap = abs(analytic.total - fd.total) / scale
    if not math.isfinite(gap) or gap > tol:
        raise NumericalHealthError(
            f"analytic and finite-difference information differ by {gap:.2e} "
            f"(analytic {analytic.total:.10g}, fd {fd.total:.10g})"
        )
    return gap
