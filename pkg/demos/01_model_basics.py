"""Tour of the scene model: PSF, overlap, and the two-photon densities.

Run:  python demos/01_model_basics.py
"""

import numpy as np

from homsr import (
    SourceModel,
    SourceScene,
    overlap_delta,
    pc_density,
    pd_density,
    psf_amplitude,
    single_photon_density,
    total_coincidence_prob,
)

# The imaging system responds to a point source with a Gaussian amplitude
# whose intensity has standard deviation sigma (= 1 here, the natural unit).
print("PSF amplitude at the origin:", psf_amplitude(0.0))
print("intensity integrates to", np.trapezoid(psf_amplitude(np.linspace(-10, 10, 2001)) ** 2,
                                          np.linspace(-10, 10, 2001)))

# Two sources eps apart, centered at x0.  The overlap of their amplitudes
# decays as exp(-eps^2/8) and controls everything below the Rayleigh limit.
print("\n eps    overlap delta")
for eps in (0.0, 0.5, 1.0, 2.0, 4.0):
    print(f"{eps:5.2f}   {overlap_delta(SourceScene(0.0, eps)):.6f}")

# One photon from the pair lands with density q(x): a two-bump mixture that
# looks single-peaked for eps below ~2 sigma -- the visual Rayleigh problem.
scene = SourceScene(0.0, 1.0, visibility=0.92)
x = np.linspace(-3, 3, 7)
print("\nq(x) at eps=1:", np.round(single_photon_density(x, scene), 4))

# Behind the 50:50 beamsplitter each photon pair either splits (one photon
# per output port, a cross-coincidence) or bunches (a double event).  The
# split probability grows with separation and shrinks with visibility.
print("\n eps    P_coincidence (thermal pair)   P_coincidence (distinct emitters)")
for eps in (0.0, 0.5, 1.0, 2.0):
    for v in (0.92,):
        s = SourceScene(0.0, eps, visibility=v)
        tp = total_coincidence_prob(s, SourceModel.THERMAL_PAIR)
        de = total_coincidence_prob(s, SourceModel.DISTINCT_EMITTERS)
        print(f"{eps:5.2f}   {tp:28.6f}   {de:33.6f}")

# The spatially resolved densities carry more than the split/bunch ratio:
# coincidences from imperfect visibility sit on the diagonal x1 = x2, while
# coincidences from genuine separation avoid it.
s = SourceScene(0.0, 1.0, visibility=0.92)
pts = [(-0.5, 0.5), (0.5, 0.5), (1.0, -1.0)]
print("\n(x1, x2)        pc          pd")
for x1, x2 in pts:
    print(f"({x1:+.1f},{x2:+.1f})   {pc_density(x1, x2, s):.6f}   {pd_density(x1, x2, s):.6f}")
