# Two TE evanescent waves crossed at 90 degrees.
#
# Both fields lie in the surface plane and are orthogonal, so the total
# intensity is flat while the polarization cycles through sigma+, linear,
# sigma-, ... A sigma- standing wave results, with alternating lines of
# circular polarization.
import math

import numpy as np

from ewmirror import optics as op
from ewmirror.optics import InterfaceGeometry

geom = InterfaceGeometry.near_critical()
angle = math.pi / 2
d = op.sigma_line_spacing(geom, angle)
print(f"sigma+/sigma- line spacing {d * 1e9:.2f} nm, lambda0 / 2 sqrt(2) = {780 / (2 * math.sqrt(2)):.2f} nm")

# a coarse ASCII map of s3 over two periods
y = np.linspace(-2 * d, 2 * d, 17)
x = np.linspace(-2 * d, 2 * d, 33)
fmap = op.field_map(geom, angle, x, y)
s3 = fmap["s3"].reshape(len(x), len(y))
print(f"intensity spread across map: {np.ptp(fmap['I']) / fmap['I'].mean():.1e}")
chars = " .:-=+*#"
for j in range(len(y))[::-1]:
    print("".join(chars[int((s3[i, j] + 1) / 2 * (len(chars) - 1) + 0.5)] for i in range(len(x))))

# the same with one beam TM polarized, counter-propagating: uniform intensity again
pts = np.column_stack([np.zeros(5), np.linspace(0, d, 5)])
for pols in [("TE", "TE"), ("TE", "TM")]:
    states = op.te_crossing_pattern(geom, math.pi, pts, pols)
    print(pols, "intensity", np.round([s.intensity for s in states], 4))

# trapper fringes from a weak reflection, e.g. R = 4 %
print(f"\nfringe visibility at R = 0.04: {op.fringe_visibility(0.04):.4f}")
