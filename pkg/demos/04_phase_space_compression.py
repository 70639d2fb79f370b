# Phase-space compression by inelastic bouncing.
#
# A 10 uK cloud released from 6 mm arrives with a velocity spread that is
# small compared with its impact speed. Pump events cluster near the
# turning point where v ~ 0, so the pumped atoms pile up in a thin slab of
# phase space. The peak density grows by about three orders of magnitude.
import numpy as np

from ewmirror import montecarlo as mc
from ewmirror.core import builtin_rb87

rb = builtin_rb87()
mirror = mc.reference_mirror(rb)
mol = mc.MolassesConfig(n_atoms=1_000_000, master_seed=0)
hist, rep = mc.run_ensemble(mol, mirror, threads=0)

print(f"initial peak density  {rep.peak_initial:.3e}")
print(f"final peak density    {rep.peak_final:.4f}")
print(f"compression factor    {rep.compression_factor:.0f}")
print(f"FWHM along z at v=0   {rep.width_z_at_v0 * 1e9:.1f} nm, peak at z = {rep.z_at_peak * 1e9:.1f} nm")
print(f"pumped {rep.pumped_fraction:.3f}, reflected {rep.unpumped_fraction:.3f}, overrun {rep.overrun_fraction:.3f}")
print(f"photons per atom      {rep.mean_photons:.2f}")

# a text rendering of the central part of rho(z, v)
dens = hist.density()
z_idx = np.arange(0, 120, 6)
v_idx = np.arange(16, 49, 2)
print("\n z(nm)  " + "".join(f"{v * 100:6.1f}" for v in hist.v_centers[v_idx]) + "   (v in cm/s)")
for i in z_idx:
    print(f"{hist.z_centers[i] * 1e9:6.0f}  " + "".join(f"{dens[i, j]:6.3f}" for j in v_idx))

# scanning the detuning at fixed U0: the peak is largest near 100 Gamma
print("\ndelta1/Gamma  peak   pumped")
small = mc.MolassesConfig(n_atoms=200_000, master_seed=0)
for dg in (50, 75, 100, 125, 150, 200):
    _, r = mc.run_ensemble(small, mc.with_params(mirror, {"delta1": dg * rb.gamma}))
    print(f"{dg:12.0f}  {r.peak_final:.4f} {r.pumped_fraction:.3f}")
