# Circular polarization from a single elliptically polarized beam.
#
# A TE beam gives an evanescent field along y; a TM beam gives an ellipse
# in the x-z plane with its long axis along the surface normal. The right
# mix of the two makes the evanescent wave circular, with its rotation
# axis tilted sideways by chi, the same angle as the Poynting vector.
import math

import numpy as np

from ewmirror import optics as op
from ewmirror.optics import EllipseSpec, InterfaceGeometry

geom = InterfaceGeometry.near_critical(n=1.51, offset=0.01, lambda0=780e-9)
print(f"critical angle      {math.degrees(geom.critical_angle):.4f} deg")
print(f"angle of incidence  {math.degrees(geom.theta_i):.4f} deg")
print(f"kappa / k_L         {op.decay_constant(geom) / geom.k0:.5f}")
print(f"Poynting tilt chi   {math.degrees(op.poynting_tilt(geom)):.4f} deg")

t_s, t_p = op.transmission_coefficients(geom)
print(f"|t_s| = {abs(t_s):.4f}, |t_p| = {abs(t_p):.4f}")

# pure TE and TM inputs for comparison
for label, spec in [("TE", EllipseSpec(0.0, 0.0)), ("TM", EllipseSpec(0.0, math.pi / 2))]:
    f = op.evanescent_field(geom, op.incident_field(geom, spec))
    print(f"{label} input -> |E| components {np.round(np.abs(f.vector), 4)}, circularity {f.degree_of_circularity:.4f}")

# the prescription: ellipticity 1/n, orientation -atan(q / cos theta)
spec = op.required_input_polarization(geom)
print(f"\nrequired ellipticity {spec.ellipticity:.5f} (1/n = {1 / geom.n:.5f})")
print(f"required orientation {math.degrees(spec.orientation):.4f} deg")
f = op.evanescent_field(geom, op.incident_field(geom, spec))
print(f"evanescent spin vector {np.round(f.spin, 6)}")
print(f"degree of circularity  {f.degree_of_circularity:.15f}")

# the tilt shrinks to zero at the critical angle
print("\n offset(rad)  kappa/k_L  chi(deg)  phi(deg)")
for offset in (1e-4, 1e-3, 0.01, 0.05, 0.2):
    g = InterfaceGeometry.near_critical(1.51, offset)
    s = op.required_input_polarization(g)
    print(f" {offset:10.4f}  {g.q:9.5f}  {math.degrees(op.poynting_tilt(g)):8.4f}  {math.degrees(s.orientation):8.4f}")
