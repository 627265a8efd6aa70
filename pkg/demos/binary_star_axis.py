"""Unequal binary: the rotation axis sits off-centre and it costs information.

A spectroscopic binary rotates about its centre of mass, but the natural
reference point of the measurement is the centre of light.  For unequal
masses the two differ, the brighter star traces the smaller circle, and
the small-separation information drops below the balanced-pair value.
With luminosity scaling as mass^4 near a solar mass, both the offset and
the brightness split follow from the mass ratio alone.
"""

import numpy as np

from dynspade import (
    PhiRotation,
    SourceGeometry,
    fisher_information,
    small_separation_limit,
    star_parameters,
)

print("Mass ratio sweep, luminosity ~ mass^4 (x -> 0 information, M = 1):\n")
print(f"{'m1/m2':>7s} {'kappa':>9s} {'v':>8s} {'limit':>9s}")
for ratio in np.linspace(1.0, 2.0, 11):
    kappa, v = star_parameters(ratio, 1.0)
    lim = small_separation_limit(kappa, v)
    print(f"{ratio:7.2f} {kappa:9.4f} {v:8.4f} {lim:9.5f}")

# cross-check one point against the full numerical average
ratio = 1.2
kappa, v = star_parameters(ratio, 1.0)
x = 1e-3
g = SourceGeometry(d=2.0 * x, v=v, xi=kappa * x)
numeric = fisher_information(g, PhiRotation.constant_rate()).scaled()
print(f"\nAt m1/m2 = {ratio}: formula {small_separation_limit(kappa, v):.6f}, "
      f"numeric average at x = {x:g} gives {numeric:.6f}.")
print("A 20% mass imbalance costs under 1% of the information; the penalty")
print("grows quadratically in kappa, so it only bites for strongly unequal")
print("pairs.  Even then the mode sorter keeps a finite x -> 0 limit where")
print("direct imaging has none.")
