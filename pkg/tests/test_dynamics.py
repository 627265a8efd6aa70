import math

import numpy as np
import pytest
from scipy import special

from dynspade import (
    CustomDensity,
    DiracDensity,
    PeriodicTrajectory,
    PhiRotation,
    QuadratureConvergenceError,
    QuadratureSpec,
    SeparationOscillation,
    SourceGeometry,
    Static,
    ThetaRotation,
    UniformSphere,
    averaged_mode_probabilities,
    distribution_average,
    model_from_dict,
    static_mode_probabilities,
    time_average,
)

SPHERE_QUAD = QuadratureSpec(nodes=32, tol=1e-10, max_doublings=3)


def test_time_average_bessel():
    # <cos(z sin phi)> over a turn is J0(z); independent special-function oracle
    traj = PeriodicTrajectory(lambda t: 2.0 * math.pi * np.asarray(t), period=1.0)
    z = math.pi / 4.0
    got = time_average(traj, lambda phi: np.cos(z * np.sin(phi)))
    assert got == pytest.approx(float(special.j0(z)), abs=1e-14)
    assert got == pytest.approx(0.851631913704808, abs=1e-14)


def test_time_average_zero_mean_harmonic():
    traj = PeriodicTrajectory(lambda t: np.asarray(t), period=1.0)
    assert time_average(traj, lambda t: np.cos(2.0 * math.pi * t)) == pytest.approx(0.0, abs=1e-15)


def test_time_average_needs_period():
    with pytest.raises(ValueError):
        time_average(lambda t: t, lambda c: c)


def test_time_average_reports_nonconvergence():
    # a kinked integrand cannot reach 1e-15 with refinement disabled
    traj = PeriodicTrajectory(lambda t: np.asarray(t), period=1.0)
    quad = QuadratureSpec(nodes=16, tol=1e-15, max_doublings=0)
    with pytest.raises(QuadratureConvergenceError) as err:
        time_average(traj, lambda t: np.abs(np.cos(2.0 * math.pi * t)) ** 0.3, quad=quad)
    assert err.value.achieved > err.value.tolerance


def test_distribution_average_dirac():
    val = distribution_average(DiracDensity(phi=0.4, theta=1.0), lambda p, t: p * t)
    assert val == pytest.approx(0.4)


def test_distribution_average_uniform_sphere_density():
    dens = lambda phi, theta: np.sin(theta) / (4.0 * math.pi)
    got = distribution_average(dens, lambda phi, theta: np.sin(theta) ** 2,
                               quad=QuadratureSpec(nodes=48))
    assert got == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_rotating_probabilities_match_closed_form():
    # angle-averaging sends cos^2 and sin^2 weights both to 1/2
    g = SourceGeometry(d=1.0)  # x = 0.5
    p = averaged_mode_probabilities(PhiRotation.constant_rate(), g, cutoff=1)
    want = (0.5**2 / 2.0) * math.exp(-0.25)
    assert p[(1, 0)] == pytest.approx(want, rel=1e-13)
    assert p[(0, 1)] == pytest.approx(want, rel=1e-13)
    assert p[(1, 0)] == pytest.approx(0.09735009788392561, rel=1e-13)


def test_static_model_agrees_with_static_probabilities():
    g = SourceGeometry(d=0.9, phi=0.5, theta=1.2)
    via_model = averaged_mode_probabilities(Static.from_geometry(g), g, cutoff=2)
    direct = static_mode_probabilities(g, cutoff=2)
    for key in direct.values:
        assert via_model.values[key] == pytest.approx(direct.values[key], rel=1e-13)


def test_rotation_phase_shift_invariance():
    # starting angle of an ergodic sweep cannot matter
    g = SourceGeometry(d=0.7)
    base = averaged_mode_probabilities(PhiRotation.constant_rate(), g, cutoff=1)
    shifted_traj = PeriodicTrajectory(lambda t: 2.0 * math.pi * np.asarray(t) + 0.7, period=1.0)
    shifted = averaged_mode_probabilities(PhiRotation(trajectory=shifted_traj), g, cutoff=1)
    for key in base.values:
        assert shifted.values[key] == pytest.approx(base.values[key], abs=1e-14)


def test_phi_oscillation_frozen_values():
    g = SourceGeometry(d=1.0)
    p = averaged_mode_probabilities(PhiRotation.oscillating(), g, cutoff=1)
    assert p[(1, 0)] == pytest.approx(0.14329946244029512, rel=1e-12)
    assert p[(0, 1)] == pytest.approx(0.051400733327556056, rel=1e-12)
    assert p[(1, 0)] + p[(0, 1)] == pytest.approx(
        0.25 / 2.0 * math.exp(-0.25) * 2.0, rel=1e-12
    )  # the pair sum is rotation-invariant at theta = pi/2


def test_sphere_probabilities_match_custom_density():
    g = SourceGeometry(d=0.8)
    sphere = averaged_mode_probabilities(UniformSphere(), g, cutoff=1, quad=SPHERE_QUAD)
    dens = CustomDensity(lambda phi, theta: np.sin(theta) / (4.0 * math.pi))
    custom = averaged_mode_probabilities(dens, g, cutoff=1, quad=QuadratureSpec(nodes=48))
    for key in sphere.values:
        assert custom.values[key] == pytest.approx(sphere.values[key], abs=1e-9)


def test_custom_density_normalisation_paths():
    ok = lambda phi, theta: np.sin(theta) / (4.0 * math.pi)
    CustomDensity(ok)

    slightly_off = lambda phi, theta: 1.0005 * np.sin(theta) / (4.0 * math.pi)
    with pytest.warns(UserWarning, match="rescaling"):
        d = CustomDensity(slightly_off)
    # rescaled back to unit mass
    got = distribution_average(d, lambda phi, theta: np.ones_like(phi),
                               quad=QuadratureSpec(nodes=48))
    assert got == pytest.approx(1.0, abs=1e-9)

    way_off = lambda phi, theta: 1.1 * np.sin(theta) / (4.0 * math.pi)
    with pytest.raises(ValueError):
        CustomDensity(way_off)


def test_sphere_sampling_statistics():
    rng = np.random.default_rng(42)
    phi, theta, a, b = UniformSphere().sample(rng, 20000)
    assert np.all(a == 1.0) and np.all(b == 0.0)
    # <P2(cos theta)> = 0 on the sphere; sigma of the mean ~ 1/sqrt(5 N)
    p2 = 0.5 * (3.0 * np.cos(theta) ** 2 - 1.0)
    assert abs(np.mean(p2)) < 5.0 / math.sqrt(5.0 * 20000)
    assert abs(np.mean(np.cos(2 * phi))) < 5.0 / math.sqrt(2.0 * 20000)


def test_custom_density_sampling_agrees_with_weights():
    dens = CustomDensity(lambda phi, theta: np.sin(theta) / (4.0 * math.pi))
    rng = np.random.default_rng(7)
    phi, theta, _, _ = dens.sample(rng, 20000)
    assert abs(np.mean(np.cos(theta))) < 5.0 / math.sqrt(3.0 * 20000)
    assert phi.min() >= 0.0 and phi.max() <= 2.0 * math.pi


class TestOscillation:
    def test_exactly_one_amplitude(self):
        with pytest.raises(ValueError):
            SeparationOscillation(a1=0.2, a2=0.1)
        with pytest.raises(ValueError):
            SeparationOscillation()

    @pytest.mark.parametrize("a1", [0.0, 1.0, -0.2, 1.5])
    def test_proportional_amplitude_range(self, a1):
        with pytest.raises(ValueError):
            SeparationOscillation.proportional(a1)

    def test_fixed_amplitude_positive(self):
        with pytest.raises(ValueError):
            SeparationOscillation.fixed_amplitude(0.0)

    def test_interchange_flag(self):
        osc = SeparationOscillation.fixed_amplitude(0.25)
        assert osc.interchanges(0.2)
        assert not osc.interchanges(0.3)
        assert not SeparationOscillation.proportional(0.5).interchanges(0.1)

    def test_kind_names(self):
        assert SeparationOscillation.proportional(0.3).kind == "oscillation-proportional"
        assert SeparationOscillation.fixed_amplitude(0.1).kind == "oscillation-fixed"

    def test_node_separations(self):
        prop = SeparationOscillation.proportional(0.25)
        nd = prop.nodes(64)
        assert nd.a.max() == pytest.approx(1.25)
        assert nd.a.min() == pytest.approx(0.75)
        assert nd.scales_with_x

        fixed = SeparationOscillation.fixed_amplitude(0.1)
        nd = fixed.nodes(64)
        assert not nd.scales_with_x
        assert nd.b.max() == pytest.approx(0.1)


def test_node_weights_are_normalised():
    models = [
        Static(),
        PhiRotation.constant_rate(),
        PhiRotation.oscillating(),
        ThetaRotation(),
        UniformSphere(),
        SeparationOscillation.proportional(0.25),
        SeparationOscillation.fixed_amplitude(0.1),
    ]
    for model in models:
        nd = model.nodes(64)
        assert np.sum(nd.weight) == pytest.approx(1.0, abs=1e-12), model.kind


@pytest.mark.parametrize(
    "model",
    [
        Static(phi=0.3, theta=1.1),
        PhiRotation.constant_rate(theta=1.0, period=2.0),
        PhiRotation.oscillating(theta=0.9),
        ThetaRotation(phi=0.2),
        UniformSphere(),
        SeparationOscillation.proportional(0.25, phi=0.1),
        SeparationOscillation.fixed_amplitude(0.15, period=3.0),
    ],
)
def test_model_serialisation_round_trip(model):
    clone = model_from_dict(model.to_dict())
    assert clone.kind == model.kind
    a = model.nodes(32)
    b = clone.nodes(32)
    np.testing.assert_allclose(a.phi, b.phi, atol=1e-15)
    np.testing.assert_allclose(a.theta, b.theta, atol=1e-15)
    np.testing.assert_allclose(a.a, b.a, atol=1e-15)
    np.testing.assert_allclose(a.b, b.b, atol=1e-15)


def test_model_from_dict_rejects_unknown():
    with pytest.raises(ValueError):
        model_from_dict({"kind": "brownian"})
    with pytest.raises(ValueError):
        model_from_dict({"theta": 1.0})
    with pytest.raises(ValueError):
        model_from_dict({"kind": "oscillation-proportional"})  # a1 missing


def test_table_density_round_trip():
    import warnings

    phis = np.linspace(0.0, 2.0 * math.pi, 41)
    thetas = np.linspace(0.0, math.pi, 41)
    table = [
        [float(p), float(t), float(np.sin(t) / (4.0 * math.pi))]
        for p in phis
        for t in thetas
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # coarse table is a percent-level off unit mass
        model = CustomDensity.from_table(table)
        clone = model_from_dict(model.to_dict())
    g = SourceGeometry(d=0.8)
    # tabulated densities have kinks, so refinement stalls near 1e-7
    quad = QuadratureSpec(nodes=32, tol=1e-6)
    pa = averaged_mode_probabilities(model, g, cutoff=1, quad=quad)
    pb = averaged_mode_probabilities(clone, g, cutoff=1, quad=quad)
    for key in pa.values:
        assert pa.values[key] == pytest.approx(pb.values[key], rel=1e-13)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=8)
    with pytest.raises(ValueError):
        QuadratureSpec(tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_doublings=-1)


def test_averaged_probabilities_total_mass():
    g = SourceGeometry(d=1.2)
    for model in (PhiRotation.constant_rate(), ThetaRotation(),
                  SeparationOscillation.fixed_amplitude(0.3)):
        p = averaged_mode_probabilities(model, g, cutoff=20, cutoff_kind="total-order")
        assert p.total() == pytest.approx(1.0, abs=1e-12)
        assert p.overflow >= -1e-12
