# How long do trapped atoms survive in the bouncer light?
#
# Without dark states the bouncer can only be detuned by ~0.6 GHz, and
# atoms already in F=2 scatter it at several thousand photons per second.
# Tuning to D1 with sigma+ light makes |F=2, m=2> dark; what remains is
# far off-resonant D2 light, polarization impurity and the wings of the
# lattice ground state reaching into sigma- light.
import math

import numpy as np

from ewmirror import budget as bd

inp = bd.reference_input()
b = bd.assemble_budget(inp)
print(f"cross-talk without dark state (0.6 GHz)  {b.crosstalk_no_darkstate:8.1f} /s")
print(f"dark state, off-resonant D2              {b.d2_offresonant:8.2f} /s")
print(f"dark state, 1e-3 sigma- impurity         {b.d1_impurity:8.2f} /s")
print(f"lattice trap frequency                   {b.trap_frequency / (2 * math.pi) / 1e3:8.1f} kHz")
print(f"oscillator wings                         {b.ho_wing:8.2f} /s")
print(f"total with dark state                    {b.total_dark:8.2f} /s")

print("\n delta1(GHz)   D2    impurity   HO    total")
scan = bd.detuning_scan(inp, 2 * math.pi * 1e9 * np.array([50, 100, 200, 300, 400, 500]))
for row in zip(scan["delta1_Hz"], scan["d2"], scan["impurity"], scan["ho"], scan["total"]):
    print(f"{row[0] / 1e9:10.0f} {row[1]:7.2f} {row[2]:8.2f} {row[3]:7.2f} {row[4]:7.2f}")

print(f"\nD2 overtakes the oscillator wings above {bd.d2_crossover(inp) / (2 * math.pi * 1e9):.0f} GHz")
