"""Separation that breathes during the exposure, three ways.

* proportional: d(t) = d (1 + A1 sin wt), excursion scales with d
* scaled:       harmonic with amplitude fixed at A1 * the current mean x
* fixed:        harmonic with amplitude a2 in beam-width units, whatever d is

The first two keep a finite information limit as x -> 0.  The fixed
variant is the interesting one: once the amplitude exceeds the mean
separation the sources swap sides during the cycle and the average
behaves qualitatively differently on the two sides of that crossover.
"""

import numpy as np

from dynspade import SeparationOscillation, SourceGeometry, asymptotic_fi, fisher_information

A1 = 0.25
A2 = 0.1

print(f"w^2 F (M = 1), proportional A1 = {A1}, fixed a2 = {A2}:\n")
print(f"{'x':>7s} {'proportional':>13s} {'scaled':>10s} {'fixed':>10s}  note")
for x in (0.02, 0.05, 0.08, 0.1, 0.15, 0.25, 0.4):
    g = SourceGeometry(d=2.0 * x)
    fp = fisher_information(g, SeparationOscillation.proportional(A1)).scaled()
    fs = fisher_information(g, SeparationOscillation.fixed_amplitude(A1 * x)).scaled()
    fixed = SeparationOscillation.fixed_amplitude(A2)
    ff = fisher_information(g, fixed).scaled()
    note = "sources interchange" if fixed.interchanges(x) else ""
    print(f"{x:7.3f} {fp:13.6f} {fs:10.6f} {ff:10.6f}  {note}")

print("\nSmall-x limits from the series expansions:")
print(f"  proportional : {asymptotic_fi('oscillation-proportional', 1e-3, a1=A1):.6f}"
      f"  (1 + A1^2/2 = {1 + A1**2 / 2:.6f})")
print(f"  scaled       : {asymptotic_fi('oscillation-scaled', 1e-3, a1=A1):.6f}"
      f"  (2/(A1^2+2) = {2 / (A1**2 + 2):.6f})")

# the fixed-amplitude variant vanishes ~ x^2 below the crossover instead
x_small = 0.02
got = fisher_information(SourceGeometry(d=2 * x_small),
                         SeparationOscillation.fixed_amplitude(A2)).scaled()
series = asymptotic_fi("oscillation-fixed", x_small, a2=A2)
print(f"  fixed, x = {x_small}: numeric {got:.6f}, leading series {series:.6f}")
print("\nStrong interchange wipes out the x -> 0 plateau: averaging over a")
print("cycle that crosses zero symmetrises the scene and the derivative of")
print("the averaged probabilities with respect to d vanishes at d = 0.")
