"""How much does sorting buy over a perfect camera?"""

from dynspade import (
    ImagingGrid,
    PhiRotation,
    SourceGeometry,
    UniformSphere,
    QuadratureSpec,
    di_fisher_information,
    fisher_information,
)

GRID = ImagingGrid(nodes=120)
SPHERE_QUAD = QuadratureSpec(nodes=24, tol=1e-7)

print("Ideal noise-free imaging (infinite resolution, unit efficiency)")
print("against a first-layer mode sorter, same photons.\n")

for label, model, fi_kwargs, di_kwargs in [
    ("rotating pair", PhiRotation.constant_rate(), {}, {}),
    ("isotropic axis", UniformSphere(), {"quad": SPHERE_QUAD}, {"quad": SPHERE_QUAD}),
]:
    print(f"{label}:")
    print(f"{'x':>7s} {'sorter':>10s} {'imaging':>10s} {'ratio':>8s}")
    for x in (0.05, 0.1, 0.2, 0.4):
        g = SourceGeometry(d=2.0 * x)
        spade = fisher_information(g, model, **fi_kwargs).scaled()
        imaging = di_fisher_information(model, g, grid=GRID, **di_kwargs)
        print(f"{x:7.2f} {spade:10.6f} {imaging:10.6f} {spade / imaging:8.1f}")
    print()

print("Imaging information falls off as x^2 while the sorter's stays flat,")
print("so the ratio diverges exactly where resolving the pair is hardest.")
print("In Cramer-Rao terms a ratio of 100 means ten times fewer photons")
print("for the same error bar.")
