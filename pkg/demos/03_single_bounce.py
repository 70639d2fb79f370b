# One bounce on the evanescent-wave mirror.
#
# An atom falls 6 mm, meets U(z) = U0 exp(-2 kappa z) and turns around.
# Along the way it scatters photons; each one may Raman-pump it into the
# trapping state. The Raman exposure integral of R dt grows linearly with
# the velocity change, which is what makes a closed-form sampler possible.
from ewmirror import mirror as md
from ewmirror import montecarlo as mc
from ewmirror.core import KinematicState, builtin_rb87, impact_energy, impact_momentum, in_recoil_units

rb = builtin_rb87()
p_i = impact_momentum(rb, 6e-3)
kelvin, hertz = impact_energy(rb, 6e-3)
print(f"impact momentum {in_recoil_units(p_i, rb, 780e-9):.2f} hbar k_L, energy {kelvin * 1e3:.3f} mK = {hertz / 1e6:.2f} MHz")

mirror = mc.reference_mirror(rb)
energy = rb.mass * 9.81 * 6e-3
print(f"turning point {md.turning_point(mirror, energy) * 1e9:.1f} nm above the surface")
print(f"photons per full bounce {md.bounce_scattered_photons(mirror, p_i):.3f}")
print(f"Raman exposure per bounce {md.bounce_raman_exposure(mirror, p_i):.3f}")
print(f"turning-point wavelength scale {md.turning_point_wavelength_scale(mirror, p_i) * 1e9:.1f} nm")

edge = md.entry_edge(mirror)
entry = mc.free_fall_to_mirror(KinematicState(6e-3, 0.0), edge)
out = md.integrate_bounce(mirror, entry, options=md.BounceOptions(record=True))
t, z, v, x = out.path.T
print(f"\nelastic bounce: {len(t)} steps, exit speed {out.final.v:.6f} m/s vs entry {-entry.v:.6f} m/s")
print(f"integral of U dt {out.potential_integral:.6e} J s, m v_i / kappa = {rb.mass * -entry.v / mirror.kappa:.6e}")

# the same atom, but interrupted at exposure 1 (the turning point when R0 is tuned)
tuned = mc.with_params(mirror, {"ratio": md.optimal_ratio(rb, rb.mass * -entry.v, mirror.kappa)})
for target in (0.25, 0.5, 1.0, 1.5):
    o = md.integrate_bounce(tuned, entry, exposure_target=target)
    print(f"pumped at exposure {target:4.2f}: z_p = {o.z_p * 1e9:7.2f} nm, v_p = {o.v_p * 100:+7.3f} cm/s")

# with gravity inside the mirror, nothing visible changes over ~100 microseconds
og = md.integrate_bounce(mirror, entry, options=md.BounceOptions(gravity=True))
print(f"\nwith gravity: exit speed {og.final.v:.6f} m/s, bounce time {(og.t_exit - entry.t) * 1e6:.2f} us")
