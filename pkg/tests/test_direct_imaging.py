import math

import numpy as np
import pytest

from dynspade import (
    ImagingGrid,
    NumericalHealthError,
    PhiRotation,
    QuadratureSpec,
    SeparationOscillation,
    SourceGeometry,
    ThetaRotation,
    UniformSphere,
    di_asymptotics,
    di_density,
    di_fisher_information,
    fisher_information,
)

SPHERE_QUAD = QuadratureSpec(nodes=16, tol=1e-7, max_doublings=3)
G05 = SourceGeometry(d=0.1)  # x = 0.05


def test_density_two_spot_closed_form():
    # balanced static pair at x = 0.5: origin value is (2/pi) e^{-1/2}
    g = SourceGeometry(d=1.0)
    val = float(di_density(None, g, [0.0, 0.0]))
    assert val == pytest.approx((2.0 / math.pi) * math.exp(-0.5), rel=1e-13)
    assert val == pytest.approx(0.38612941052021565, rel=1e-13)


def test_density_normalised_and_positive():
    g = SourceGeometry(d=0.8, v=0.7)
    t, wt = np.polynomial.legendre.leggauss(160)
    axis = 7.0 * t
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    dens = di_density(PhiRotation.constant_rate(), g, pts)
    assert np.all(dens >= 0.0)
    W = np.outer(7.0 * wt, 7.0 * wt)
    assert float(np.sum(W * dens)) == pytest.approx(1.0, abs=1e-10)


def test_density_point_shape_validation():
    with pytest.raises(ValueError):
        di_density(None, SourceGeometry(d=1.0), [[0.0, 0.0, 0.0]])


@pytest.mark.parametrize(
    "model,frozen",
    [
        (None, 0.019610308754717434),
        (PhiRotation.constant_rate(), 0.009901230384802718),
        (ThetaRotation(), 0.004950554518579983),
        (SeparationOscillation.proportional(0.25), 0.020842047195773407),
        (SeparationOscillation.fixed_amplitude(0.1), 0.018861054229041614),
    ],
)
def test_imaging_information_frozen(model, frozen):
    assert di_fisher_information(model, G05) == pytest.approx(frozen, rel=1e-8)


def test_imaging_information_sphere_frozen():
    got = di_fisher_information(UniformSphere(), G05, quad=SPHERE_QUAD)
    assert got == pytest.approx(0.004415032068848152, rel=1e-6)


def test_imaging_asymptotics_track_numerics():
    x = 0.05
    assert di_fisher_information(None, G05) == pytest.approx(
        di_asymptotics("static", x), rel=0.05
    )
    assert di_fisher_information(ThetaRotation(), G05) == pytest.approx(
        di_asymptotics("theta-rotation", x), rel=0.05
    )


def test_static_unequal_brightness_floor():
    # asymmetric pair: information saturates at (2v-1)^2 as the pair closes
    g = SourceGeometry(d=2e-3, v=0.7)
    assert di_fisher_information(None, g) == pytest.approx(0.16, rel=1e-3)
    assert di_asymptotics("static", 1e-3, v=0.7) == pytest.approx(0.16)


def test_rotation_asymptote_brightness_independent():
    base = di_asymptotics("phi-rotation", 0.05)
    for v in (0.3, 0.5, 0.7):
        got = di_fisher_information(PhiRotation.constant_rate(), SourceGeometry(d=0.1, v=v))
        assert got == pytest.approx(base, rel=0.05)


def test_brightness_mirror_symmetry():
    fa = di_fisher_information(None, SourceGeometry(d=0.6, v=0.3))
    fb = di_fisher_information(None, SourceGeometry(d=0.6, v=0.7))
    assert fa == pytest.approx(fb, rel=1e-10)


def test_static_offset_axis_is_pure_translation():
    # moving the axis point only translates a static image; d-information is unchanged
    fa = di_fisher_information(None, SourceGeometry(d=0.6))
    fb = di_fisher_information(None, SourceGeometry(d=0.6, xi=0.05))
    assert fb == pytest.approx(fa, rel=1e-7)


def test_mode_sorter_dominates_imaging():
    for x in (0.1, 0.3):
        g = SourceGeometry(d=2 * x)
        spade = fisher_information(g, PhiRotation.constant_rate()).scaled()
        imaging = di_fisher_information(PhiRotation.constant_rate(), g) * g.w**2
        assert spade > imaging


def test_grid_validation():
    with pytest.raises(ValueError):
        ImagingGrid(nodes=8)
    with pytest.raises(ValueError):
        ImagingGrid(half_width=-1.0)


def test_grid_auto_extent_covers_motion():
    g = SourceGeometry(d=0.4)
    osc = SeparationOscillation.fixed_amplitude(0.3)
    grid = ImagingGrid()
    assert grid.resolve_half_width(osc, g) == pytest.approx(0.2 + 0.3 + 6.0)


def test_coarse_grid_flagged():
    g = SourceGeometry(d=1.0)
    with pytest.raises(NumericalHealthError):
        di_fisher_information(None, g, grid=ImagingGrid(nodes=16), check_grid=True)


def test_check_grid_passes_at_default_resolution():
    g = SourceGeometry(d=0.4)
    a = di_fisher_information(None, g, grid=ImagingGrid(nodes=120), check_grid=True)
    b = di_fisher_information(None, g)
    assert a == pytest.approx(b, rel=1e-6)


def test_imaging_asymptotics_unknown_scenario():
    with pytest.raises(ValueError):
        di_asymptotics("brownian", 0.1)
    with pytest.raises(ValueError):
        di_asymptotics("static", 0.1, bogus=1.0)
