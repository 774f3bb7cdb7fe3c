"""Contact distributions: how far is an uncovered point from the material?

The spherical contact distribution is the law of the pore radius; the
linear one probes a single direction and exposes anisotropy.  A process
with all fibers parallel to e3 is invisible to rays along e3.
"""

import numpy as np

from cylproc import (
    DeterministicBase,
    Direction,
    Disc,
    FixedAxes,
    Isotropic,
    ProcessSpec,
    Window,
    est_linear_cdf,
    est_spherical_cdf,
    linear_cdf,
    spherical_cdf,
)

iso = ProcessSpec(d=3, k=1, intensity=0.1, alpha=Isotropic(), base=DeterministicBase(Disc(1.0)))
aligned = ProcessSpec(d=3, k=1, intensity=0.1,
                      alpha=FixedAxes([(Direction([0, 0, 1.0]), 1.0)]),
                      base=DeterministicBase(Disc(1.0)))
window = Window((0, 0, 0), (20, 20, 20))

print("spherical contact distribution (isotropic fibers):")
for r in (0.25, 0.5, 1.0):
    print(f"  H_ball({r}) = {spherical_cdf(iso, r):.6f}")
reports = est_spherical_cdf(iso, window, [0.25, 0.5, 1.0], n_points=20_000, n_reps=15, seed=3)
for rep in reports:
    print(f"  MC {rep.name}: {rep.estimate:.5f} +- {rep.std_error:.5f} (z = {rep.z_score:+.2f})")

print("\nlinear contact distribution and anisotropy (all axes parallel to e3):")
for eta in (Direction([0, 0, 1.0]), Direction([1.0, 0, 0]), Direction([1.0, 0, 1.0])):
    val = linear_cdf(aligned, eta, 1.0)
    print(f"  eta = {np.round(eta.vec, 3)}: H_eta(1) = {val:.6f}")
print("  (rays along the common axis never meet a new fiber: H = 0)")

rep = est_linear_cdf(aligned, window, Direction([1.0, 0, 0]), [1.0], n_rays=20_000, n_reps=15, seed=4)[0]
print(f"  MC perpendicular probe: {rep.estimate:.5f} +- {rep.std_error:.5f} (z = {rep.z_score:+.2f})")

print("\nthe spherical form in the plane does not depend on the band width:")
from cylproc import Segment

for a in (0.1, 5.0):
    bands = ProcessSpec(d=2, k=1, intensity=0.2, alpha=Isotropic(), base=DeterministicBase(Segment(a)))
    print(f"  half-width a = {a}: H_ball(1) = {spherical_cdf(bands, 1.0):.6f}")
