"""Hermite-Gauss mode machinery for a Gaussian imaging system.

Conventions used throughout the package:

* The point-spread function is the fundamental Gaussian
  ``u00(r) = sqrt(2/(pi w^2)) exp(-r^2/w^2)`` with width parameter ``w``.
* Higher modes ``u_nm`` are Hermite-Gauss functions of the same width,
  orthonormal on the image plane.
* Two point sources sit at ``r1 = (d + 2 xi w)/2 * sin(theta) * u(phi)`` and
  ``r2 = -(d - 2 xi w)/2 * sin(theta) * u(phi)`` where ``u(phi)`` is the unit
  vector at azimuth ``phi``, ``d`` is the source separation, ``theta`` the
  inclination of the source axis to the optical axis and ``xi`` the offset of
  the demultiplexer centre from the midpoint, in units of ``w``.
* A photon from a source displaced by ``rho = |r|/w`` at azimuth ``phi``
  lands in mode ``(n, m)`` with amplitude
  ``beta = rho^(n+m) / sqrt(n! m!) * cos(phi)^n sin(phi)^m * exp(-rho^2/2)``.

The reduced separation ``x = d / (2 w)`` is the natural dimensionless
variable; most quantities are expressed in it.

Mode-overlap amplitudes are kept in factored form (prefactor times an
explicit power of rho) so that downstream Fisher-information ratios can
cancel the rho powers analytically instead of relying on floating-point
cancellation near rho = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModeIndex",
    "ModeProbabilities",
    "SourceGeometry",
    "hermite",
    "hg_mode_amplitude",
    "mode_indices",
    "overlap_beta",
    "overlap_beta_factored",
    "source_positions",
    "static_mode_probabilities",
]


def hermite(n: int, z):
    """Physicists' Hermite polynomial H_n(z) by the three-term recurrence.

    Stable for the mode orders used here (n up to a few hundred) and avoids
    any special-function dependency.  ``z`` may be a scalar or ndarray.
    """
    if n < 0:
        raise ValueError("Hermite order must be non-negative")
    z = np.asarray(z, dtype=float)
    h_prev = np.ones_like(z)
    if n == 0:
        return h_prev
    h = 2.0 * z
    for k in range(1, n):
        h, h_prev = 2.0 * z * h - 2.0 * k * h_prev, h
    return h


def _factorial(n: int) -> float:
    return float(math.factorial(n))


class ModeIndex(NamedTuple):
    """Transverse Hermite-Gauss mode label (n, m)."""

    n: int
    m: int


def mode_indices(cutoff: int, cutoff_kind: str = "per-index") -> list[ModeIndex]:
    """Enumerate the mode set retained by a finite demultiplexer.

    ``per-index`` keeps n <= cutoff and m <= cutoff (the default reading);
    ``total-order`` keeps n + m <= cutoff.
    """
    if cutoff < 1:
        raise ValueError("mode cutoff must be at least 1")
    if cutoff_kind == "per-index":
        return [ModeIndex(n, m) for n in range(cutoff + 1) for m in range(cutoff + 1)]
    if cutoff_kind == "total-order":
        return [
            ModeIndex(n, m)
            for n in range(cutoff + 1)
            for m in range(cutoff + 1 - n)
        ]
    raise ValueError(f"unknown cutoff kind: {cutoff_kind!r}")


def hg_mode_amplitude(n: int, m: int, point, w: float = 1.0):
    """Amplitude of the Hermite-Gauss mode u_nm at an image-plane point.

    Parameters
    ----------
    n, m : int
        Mode orders along x and y.
    point : array_like
        Image-plane coordinates (..., 2), same length units as ``w``.
    w : float
        Width of the fundamental Gaussian.

    Returns
    -------
    float or ndarray
        u_nm evaluated at the point(s); the mode set is orthonormal,
        ``integral |u_nm|^2 = 1``.
    """
    if w <= 0:
        raise ValueError("width w must be positive")
    pt = np.asarray(point, dtype=float)
    px, py = pt[..., 0], pt[..., 1]
    norm = math.sqrt((math.pi / 2.0) * w * w * 2.0 ** (n + m) * _factorial(n) * _factorial(m))
    gauss = np.exp(-(px * px + py * py) / (w * w))
    val = hermite(n, math.sqrt(2.0) * px / w) * hermite(m, math.sqrt(2.0) * py / w) * gauss / norm
    return float(val) if np.ndim(val) == 0 else val


def overlap_beta_factored(n: int, m: int, rho: float, phi: float, sign: int = 1):
    """Overlap of u_nm with the PSF displaced by rho (units of w) at azimuth phi.

    Returns the pair ``(coefficient, power)`` with
    ``beta = coefficient * rho**power``.  The coefficient carries the
    Gaussian envelope and the angular factor, the power is n + m; keeping
    them apart lets Fisher ratios cancel rho powers exactly at rho -> 0.
    ``sign=-1`` evaluates the mirrored source at azimuth phi + pi.
    """
    if n < 0 or m < 0:
        raise ValueError("mode orders must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    power = n + m
    coef = (
        float(sign) ** power
        * math.cos(phi) ** n
        * math.sin(phi) ** m
        / math.sqrt(_factorial(n) * _factorial(m))
        * math.exp(-0.5 * rho * rho)
    )
    return coef, power


def overlap_beta(n: int, m: int, rho: float, phi: float, sign: int = 1) -> float:
    """Overlap amplitude beta as a plain number (see overlap_beta_factored)."""
    coef, power = overlap_beta_factored(n, m, rho, phi, sign)
    return coef * rho**power


@dataclass(frozen=True)
class SourceGeometry:
    """Static two-source scene in front of a Gaussian imaging system.

    Attributes
    ----------
    d : float
        Source separation (length units of ``w``); ``d >= 0``.
    w : float
        PSF width.
    phi, theta : float
        Azimuth of the projected source axis and its inclination to the
        optical axis, radians.
    v : float
        Relative brightness of the first source, 0 < v < 1.
    xi : float
        Offset of the demultiplexer axis from the midpoint toward the second
        source, in units of ``w``; requires ``|2 xi w| < d`` when d > 0.
    """

    d: float
    w: float = 1.0
    phi: float = 0.0
    theta: float = math.pi / 2.0
    v: float = 0.5
    xi: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.d, self.w, self.phi, self.theta, self.v, self.xi))):
            raise ValueError("geometry parameters must be finite")
        if self.d < 0:
            raise ValueError("separation d must be non-negative")
        if self.w <= 0:
            raise ValueError("width w must be positive")
        if not 0.0 < self.v < 1.0:
            raise ValueError("brightness v must lie strictly between 0 and 1")
        if self.d == 0.0:
            if self.xi != 0.0:
                raise ValueError("axis offset xi must vanish when d = 0")
        elif abs(2.0 * self.xi * self.w) >= self.d:
            raise ValueError("axis offset must satisfy |2 xi w| < d")

    @property
    def x(self) -> float:
        """Reduced separation d / (2 w)."""
        return self.d / (2.0 * self.w)

    @property
    def kappa(self) -> float:
        """Relative axis offset 2 xi w / d (0 for the on-axis case)."""
        if self.d == 0.0:
            return 0.0
        return 2.0 * self.xi * self.w / self.d

    def with_separation(self, d: float) -> "SourceGeometry":
        import dataclasses

        return dataclasses.replace(self, d=d)


def source_positions(g: SourceGeometry):
    """Image-plane positions of the two sources, in length units of w.

    Returns a pair of length-2 arrays (r1, r2).  The first source sits at
    radius (d + 2 xi w)/2 * sin(theta) along azimuth phi, the second
    opposite at radius (d - 2 xi w)/2 * sin(theta).
    """
    s = math.sin(g.theta)
    u = np.array([math.cos(g.phi), math.sin(g.phi)])
    r1 = 0.5 * (g.d + 2.0 * g.xi * g.w) * s * u
    r2 = -0.5 * (g.d - 2.0 * g.xi * g.w) * s * u
    return r1, r2


@dataclass(frozen=True)
class ModeProbabilities:
    """Per-mode detection probabilities for a finite mode cutoff.

    ``values`` maps (n, m) to the probability of detecting a photon in that
    mode; ``overflow`` is the probability mass of every mode outside the
    cutoff, so values plus overflow sum to one by construction.
    """

    cutoff: int
    cutoff_kind: str
    values: dict
    overflow: float

    def __getitem__(self, key) -> float:
        return self.values[ModeIndex(*key)]

    def total(self) -> float:
        return sum(self.values.values()) + self.overflow


# ---------------------------------------------------------------------------
# vectorised kernels shared with the dynamics and estimation layers
# ---------------------------------------------------------------------------


def _trig_tables(modes, phi):
    """Angular factors cos^2n(phi) sin^2m(phi) / (n! m!) per mode.

    Returns an array of shape (len(phi), len(modes)).  Powers are built by
    cumulative multiplication so exact zeros stay exact.
    """
    phi = np.asarray(phi, dtype=float)
    nmax = max(mi.n for mi in modes)
    mmax = max(mi.m for mi in modes)
    c2 = np.cos(phi) ** 2
    s2 = np.sin(phi) ** 2
    cpow = np.empty((nmax + 1,) + phi.shape)
    spow = np.empty((mmax + 1,) + phi.shape)
    cpow[0] = 1.0
    spow[0] = 1.0
    for k in range(1, nmax + 1):
        cpow[k] = cpow[k - 1] * c2
    for k in range(1, mmax + 1):
        spow[k] = spow[k - 1] * s2
    out = np.empty(phi.shape + (len(modes),))
    for i, (n, m) in enumerate(modes):
        out[..., i] = cpow[n] * spow[m] / (_factorial(n) * _factorial(m))
    return out


def _radial_powers(rsq, kmax):
    """(rho^2)^k for k = 0..kmax, stacked along the first axis."""
    out = np.empty((kmax + 1,) + rsq.shape)
    out[0] = 1.0
    for k in range(1, kmax + 1):
        out[k] = out[k - 1] * rsq
    return out


def mode_probability_tables(modes, phi, theta, x_eff, v, xi, dxeff=None):
    """Per-configuration mode probabilities p(nm | q) and optionally d p / dx.

    Parameters
    ----------
    modes : sequence of ModeIndex
    phi, theta, x_eff : ndarray
        Instantaneous azimuth, inclination and reduced separation per
        configuration (broadcast to a common shape).
    v, xi : float
        Brightness of the first source and axis offset in units of w.
    dxeff : ndarray, optional
        d x_eff / d x per configuration.  When given, the derivative table
        with respect to the reduced separation parameter x is returned too.

    Returns
    -------
    P : ndarray, shape (*cfg, len(modes))
    DP : ndarray, same shape (only when ``dxeff`` is given)
    """
    phi, theta, x_eff = np.broadcast_arrays(
        np.asarray(phi, float), np.asarray(theta, float), np.asarray(x_eff, float)
    )
    s = np.sin(theta)
    rho1 = (x_eff + xi) * s
    rho2 = (x_eff - xi) * s
    r1sq = rho1 * rho1
    r2sq = rho2 * rho2
    e1 = np.exp(-r1sq)
    e2 = np.exp(-r2sq)
    kmax = max(mi.n + mi.m for mi in modes)
    p1 = _radial_powers(r1sq, kmax)
    p2 = _radial_powers(r2sq, kmax)
    trig = _trig_tables(modes, phi)

    P = np.empty(phi.shape + (len(modes),))
    for i, (n, m) in enumerate(modes):
        k = n + m
        P[..., i] = trig[..., i] * (v * p1[k] * e1 + (1.0 - v) * p2[k] * e2)
    if dxeff is None:
        return P

    dxeff = np.broadcast_to(np.asarray(dxeff, float), phi.shape)
    drho = dxeff * s  # d rho_i / d x for both sources
    DP = np.empty_like(P)
    for i, (n, m) in enumerate(modes):
        k = n + m
        if k == 0:
            d1 = -2.0 * rho1 * e1
            d2 = -2.0 * rho2 * e2
        else:
            d1 = 2.0 * rho1 * p1[k - 1] * (k - r1sq) * e1
            d2 = 2.0 * rho2 * p2[k - 1] * (k - r2sq) * e2
        DP[..., i] = trig[..., i] * drho * (v * d1 + (1.0 - v) * d2)
    return P, DP


def reduced_mode_tables(modes, phi, sigma, x):
    """Factored per-configuration tables for the on-axis case (xi = 0).

    When every configuration's reduced separation scales linearly with the
    parameter, rho = x * sigma, the probability factors as
    ``p_nm = x^(2k) * R_nm`` with k = n + m and

        R_nm = T_nm(phi) * sigma^(2k) * exp(-x^2 sigma^2).

    Returns (R, RP) where RP = dR/dx, both of shape (*cfg, len(modes)).
    The x powers are never formed here, so the x -> 0 limit stays exact.
    """
    phi, sigma = np.broadcast_arrays(np.asarray(phi, float), np.asarray(sigma, float))
    ssq = sigma * sigma
    env = np.exp(-(x * x) * ssq)
    kmax = max(mi.n + mi.m for mi in modes)
    spow = _radial_powers(ssq, kmax)
    trig = _trig_tables(modes, phi)
    R = np.empty(phi.shape + (len(modes),))
    RP = np.empty_like(R)
    for i, (n, m) in enumerate(modes):
        k = n + m
        base = trig[..., i] * spow[k] * env
        R[..., i] = base
        RP[..., i] = base * (-2.0 * x) * ssq
    return R, RP


def static_mode_probabilities(
    g: SourceGeometry, cutoff: int = 1, cutoff_kind: str = "per-index"
) -> ModeProbabilities:
    """Mode detection probabilities for a static scene.

    p(nm) = v * beta(+)^2 + (1 - v) * beta(-)^2 with the overlaps evaluated
    at the two source radii.  For xi = 0 the two terms coincide, so the
    probabilities do not depend on the brightness v.
    """
    modes = mode_indices(cutoff, cutoff_kind)
    P = mode_probability_tables(
        modes,
        np.array([g.phi]),
        np.array([g.theta]),
        np.array([g.x]),
        g.v,
        g.xi,
    )
    values = {mi: float(P[0, i]) for i, mi in enumerate(modes)}
    overflow = 1.0 - sum(values.values())
    return ModeProbabilities(cutoff=cutoff, cutoff_kind=cutoff_kind, values=values, overflow=overflow)
