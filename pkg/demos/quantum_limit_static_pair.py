"""Static pair: mode sorting holds the quantum limit where imaging fades."""

import numpy as np

from dynspade import SourceGeometry, fisher_information

print("Two equally bright points, fixed on the diagonal (phi = pi/4).")
print("w^2 F per photon; the quantum limit is exactly 1.\n")

print(f"{'x = d/2w':>10s} {'M = 1':>12s} {'M = 5':>12s}")
for x in np.geomspace(1e-3, 2.0, 12):
    g = SourceGeometry(d=2.0 * x, phi=np.pi / 4)
    f1 = fisher_information(g).scaled()
    f5 = fisher_information(g, cutoff=5).scaled()
    print(f"{x:10.4f} {f1:12.6f} {f5:12.6f}")

print()
print("A single layer of modes (M = 1) already saturates the limit for")
print("x << 1 and only lets go slowly; raising the cutoff recovers the")
print("rest.  Nothing diverges as the separation closes: that is the")
print("whole point of sorting in the Hermite-Gauss basis.")

print()
print("The orientation of a static pair matters at finite separation:")
print(f"\n{'phi/pi':>8s} {'w^2 F at x=0.8':>16s}")
for frac in (0.0, 0.125, 0.25, 0.375, 0.5):
    g = SourceGeometry(d=1.6, phi=frac * np.pi)
    print(f"{frac:8.3f} {fisher_information(g).scaled():16.6f}")
