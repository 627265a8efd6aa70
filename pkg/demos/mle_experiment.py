"""Simulated photon-counting runs against the Cramer-Rao bound.

Draws multinomial counts from the averaged mode probabilities of a
rotating pair, fits the separation by maximum likelihood on each run,
and compares the spread of the estimates with the bound.  Everything is
seeded, so the numbers printed here regenerate exactly.

The second half repeats the experiment with data from a *static* scene
at an azimuth the fit never learns: spinning the analysis basis during
the exposure makes the likelihood independent of that azimuth, and the
one-parameter fit still works, at a small information cost.
"""

import math

import numpy as np

from dynspade import (
    ExperimentConfig,
    PeriodicTrajectory,
    PhiRotation,
    SourceGeometry,
    crb_consistency,
    rotating_basis_reduction,
)


def main() -> None:
    g = SourceGeometry(d=0.4)  # x = 0.2
    n, runs = 100_000, 200

    report = crb_consistency(
        PhiRotation.constant_rate(), g,
        n_photons=n, runs=runs, seed=3,
        config=ExperimentConfig(overflow="discard"),
    )
    print(f"rotating pair, d = {g.d}, {runs} runs x {n:.0e} photons (overflow discarded)")
    print(f"  mean estimate : {report.d_hat_mean:.6f}")
    print(f"  spread        : {report.d_hat_std:.6f}")
    print(f"  bound         : {report.crb:.6f}")
    print(f"  efficiency    : {report.efficiency:.3f}")
    if report.flags:
        print(f"  flags         : {', '.join(report.flags)}")

    # unknown-azimuth experiment: sample a static scene swept by the basis
    unknown_phi = 0.3
    sampler = PhiRotation(
        trajectory=PeriodicTrajectory(
            lambda t: 2.0 * math.pi * np.asarray(t) - unknown_phi, period=1.0
        )
    )
    fit_model = rotating_basis_reduction(g)
    report2 = crb_consistency(
        fit_model, g, n_photons=n, runs=100, seed=1, sampling_model=sampler
    )
    static_aware = 1.0 / math.sqrt(n * 0.9356627125691164)
    print(f"\nstatic scene at undisclosed azimuth, spinning analysis basis")
    print(f"  mean estimate : {report2.d_hat_mean:.6f}  (true {g.d})")
    print(f"  spread        : {report2.d_hat_std:.6f}")
    print(f"  azimuth-aware bound for comparison: {static_aware:.6f}")
    print("\nThe spinning basis turned a two-parameter problem into a clean")
    print("one-parameter fit; the spread lands within ~10% of what a fit")
    print("that knew the azimuth could reach.")


if __name__ == "__main__":
    main()
