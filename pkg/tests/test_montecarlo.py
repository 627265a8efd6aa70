import math

import numpy as np
import pytest

from dynspade import (
    EstimateReport,
    ExperimentConfig,
    PhiRotation,
    PhotonCounts,
    SourceGeometry,
    Static,
    cramer_rao_bound,
    crb_consistency,
    fisher_information,
    mle_estimate,
    rotating_basis_reduction,
    sample_counts,
)

ROTATING = PhiRotation.constant_rate()


def test_sample_counts_conserves_photons():
    g = SourceGeometry(d=1.0)
    counts = sample_counts(ROTATING, g, 5000, np.random.default_rng(3))
    assert counts.total == 5000
    assert counts.detected + counts.overflow == 5000
    assert all(c >= 0 for c in counts.counts.values())


def test_sample_counts_deterministic():
    g = SourceGeometry(d=1.0)
    a = sample_counts(ROTATING, g, 2000, np.random.default_rng([7, 0]))
    b = sample_counts(ROTATING, g, 2000, np.random.default_rng([7, 0]))
    c = sample_counts(ROTATING, g, 2000, np.random.default_rng([7, 1]))
    assert a.counts == b.counts and a.overflow == b.overflow
    assert a.counts != c.counts


def test_sampled_frequencies_match_averaged_probabilities():
    # rotating pair at x = 0.5: the one-photon rate into each first-order
    # mode is (x^2/2) exp(-x^2), identical for the two by symmetry
    g = SourceGeometry(d=1.0)
    n = 100_000
    p = 0.09735009788392561
    counts = sample_counts(ROTATING, g, n, np.random.default_rng(12345))
    sigma = math.sqrt(p * (1.0 - p) / n)
    for mode in ((1, 0), (0, 1)):
        assert abs(counts.counts[mode] / n - p) < 5.0 * sigma
    p00 = math.exp(-0.25)
    sigma00 = math.sqrt(p00 * (1.0 - p00) / n)
    assert abs(counts.counts[(0, 0)] / n - p00) < 5.0 * sigma00


def test_mle_recovers_separation_within_bound():
    g = SourceGeometry(d=0.4)
    n = 100_000
    counts = sample_counts(ROTATING, g, n, np.random.default_rng([21, 0]))
    d_hat, hit = mle_estimate(counts, ROTATING, g)
    crb = cramer_rao_bound(fisher_information(g, ROTATING, overflow="include").total, n)
    assert not hit
    assert abs(d_hat - g.d) < 5.0 * crb


def test_mle_flags_boundary_collapse():
    # all photons in the fundamental looks like zero separation
    g = SourceGeometry(d=0.4)
    counts = PhotonCounts(counts={(0, 0): 1000, (1, 0): 0, (0, 1): 0, (1, 1): 0}, overflow=0)
    d_hat, hit = mle_estimate(counts, ROTATING, g)
    assert hit
    assert d_hat < 1e-3


def test_overflow_conventions_order_the_bound():
    g = SourceGeometry(d=1.2)
    include = crb_consistency(ROTATING, g, n_photons=1000, runs=5, seed=1)
    assert include.crb <= include.crb_truncated


def test_report_fields_and_flags():
    g = SourceGeometry(d=0.4)
    report = crb_consistency(ROTATING, g, n_photons=20_000, runs=20, seed=5)
    assert isinstance(report, EstimateReport)
    assert report.scenario == "phi-rotation"
    assert report.d_true == 0.4
    assert report.runs == 20 and report.n_photons == 20_000
    assert "few-runs" in report.flags
    assert report.efficiency == pytest.approx((report.crb / report.d_hat_std) ** 2)
    assert abs(report.d_hat_mean - 0.4) < 5.0 * report.crb


def test_report_json_round_trip_and_determinism():
    g = SourceGeometry(d=0.4)
    a = crb_consistency(ROTATING, g, n_photons=5000, runs=8, seed=2)
    b = crb_consistency(ROTATING, g, n_photons=5000, runs=8, seed=2)
    assert a.to_json() == b.to_json()
    payload = a.to_dict()
    assert payload["N"] == 5000 and payload["R"] == 8 and payload["seed"] == 2
    assert isinstance(payload["flags"], list)


def test_fit_model_may_differ_from_sampling_model():
    # data from a static pair at unknown azimuth, fit with the spinning-basis
    # reduction: estimates stay centred on the true separation
    g = SourceGeometry(d=0.4, phi=0.3)
    report = crb_consistency(
        rotating_basis_reduction(g),
        g,
        n_photons=20_000,
        runs=10,
        seed=4,
        sampling_model=Static.from_geometry(g),
    )
    assert report.scenario == "static"
    assert abs(report.d_hat_mean - 0.4) < 0.05


def test_discard_convention_conditions_on_detection():
    g = SourceGeometry(d=0.4)
    cfg = ExperimentConfig(overflow="discard")
    report = crb_consistency(ROTATING, g, n_photons=20_000, runs=10, seed=9, config=cfg)
    assert report.crb >= crb_consistency(
        ROTATING, g, n_photons=20_000, runs=5, seed=9
    ).crb


def test_rotating_basis_reduction_matches_geometry():
    g = SourceGeometry(d=0.5, theta=1.1)
    model = rotating_basis_reduction(g)
    assert model.kind == "phi-rotation"
    assert model.theta == pytest.approx(1.1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(overflow="truncate"),
        dict(x_bounds=(1.0, 0.5)),
        dict(x_bounds=(-0.1, 1.0)),
        dict(grid_points=4),
        dict(xtol=0.0),
        dict(likelihood_nodes=4),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_degenerate_experiment_sizes_rejected():
    g = SourceGeometry(d=0.4)
    with pytest.raises(ValueError, match="runs"):
        crb_consistency(None, g, n_photons=1000, runs=0)
    with pytest.raises(ValueError, match="nonnegative"):
        sample_counts(None, g, -5, np.random.default_rng(0))
