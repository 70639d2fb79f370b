"""Photon-scattering budget for atoms held in the trapping state.

All channels use the far-detuned two-level estimate rate = Gamma U / (hbar delta).
The F=1 bouncer light shift at the trap location, ``u1_ref``, is held fixed
when the detuning is scanned, so the bouncer intensity grows with delta1.

Two scalars are calibrated once against reference aggregate rates and
frozen here; the underlying Clebsch-Gordan bookkeeping is not modelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .core import AtomSpecies, builtin_rb87, h, hbar

# sigma- impurity channel, fixed so that eps = 1e-3 at 100 GHz gives 10.6 /s
IMPURITY_CG_FACTOR = 2.316
# sigma- standing-wave depth relative to u1_ref * delta1 / delta2; gives 2pi x 480 kHz at 100 GHz
LATTICE_STRENGTH = 0.7057


@dataclass(frozen=True)
class BudgetInput:
    species: AtomSpecies
    delta1: float = 2 * math.pi * 100e9
    u1_ref: float = h * 12e6
    impurity_eps: float = 1e-3
    line_strength_d2_over_d1: float = 2.0
    # detuning a scheme without dark states is forced into
    crosstalk_delta1: float = 2 * math.pi * 0.6e9

    def __post_init__(self):
        if not self.delta1 > 0:
            raise ValueError("delta1 must be positive")
        if not self.u1_ref > 0:
            raise ValueError("u1_ref must be positive")
        if not 0 <= self.impurity_eps < 1:
            raise ValueError("impurity_eps must lie in [0, 1)")
        if not self.line_strength_d2_over_d1 >= 0:
            raise ValueError("line strength ratio must be >= 0")
        if not self.crosstalk_delta1 > 0:
            raise ValueError("crosstalk_delta1 must be positive")


@dataclass
class ScatteringBudget:
    crosstalk_no_darkstate: float
    d2_offresonant: float
    d1_impurity: float
    ho_wing: float
    trap_frequency: float
    total_dark: float

    def as_dict(self):
        return dict(self.__dict__)


def crosstalk_rate(inp: BudgetInput) -> float:
    """Bouncer scattering by an F=2 atom when the bouncer is F-selective only by detuning."""
    sp = inp.species
    delta2 = inp.delta1 + sp.delta_ghf
    u2 = inp.u1_ref * inp.delta1 / delta2
    return sp.gamma * u2 / (hbar * delta2)


def dark_d2_rate(inp: BudgetInput) -> float:
    """Residual off-resonant D2 scattering of the |F=2, m=2> dark state."""
    sp = inp.species
    if not inp.delta1 < sp.delta_fs:
        raise ValueError("delta1 must stay below the fine-structure splitting")
    delta_d2 = sp.delta_fs - inp.delta1
    u_d2 = inp.u1_ref * inp.delta1 / delta_d2 * inp.line_strength_d2_over_d1
    return sp.gamma * u_d2 / (hbar * delta_d2)


def impurity_rate(inp: BudgetInput) -> float:
    """D1 scattering caused by a sigma- admixture of relative intensity ``impurity_eps``."""
    return inp.impurity_eps * IMPURITY_CG_FACTOR * inp.species.gamma * inp.u1_ref / (hbar * inp.delta1)


def lattice_trap_frequency(inp: BudgetInput) -> float:
    """Harmonic frequency at a node of the sigma- standing wave of two TE beams crossed at 90 deg.

    The lattice period is lambda_D1 / sqrt(2).
    """
    sp = inp.species
    k_eff = 2 * math.pi * math.sqrt(2) / sp.lambda_d1
    u_trap = LATTICE_STRENGTH * inp.u1_ref * inp.delta1 / (inp.delta1 + sp.delta_ghf)
    return k_eff * math.sqrt(2 * u_trap / sp.mass)


def ho_wing_rate(omega: float, inp: BudgetInput) -> float:
    """Scattering from the wavefunction wings reaching into sigma- light: omega Gamma / 4(delta1 + delta_GHF)."""
    if not omega >= 0:
        raise ValueError("omega must be >= 0")
    sp = inp.species
    return omega * sp.gamma / (4 * (inp.delta1 + sp.delta_ghf))


def assemble_budget(inp: BudgetInput, lattice: bool = True) -> ScatteringBudget:
    """All channels at ``inp.delta1``; cross-talk is evaluated at ``inp.crosstalk_delta1``.

    ``lattice=False`` drops the harmonic-oscillator wing (single-beam scheme).
    """
    crosstalk = crosstalk_rate(replace(inp, delta1=inp.crosstalk_delta1))
    d2 = dark_d2_rate(inp)
    imp = impurity_rate(inp)
    omega = lattice_trap_frequency(inp)
    ho = ho_wing_rate(omega, inp) if lattice else 0.0
    return ScatteringBudget(crosstalk, d2, imp, ho, omega, d2 + imp + ho)


def detuning_scan(inp: BudgetInput, delta1_values) -> dict:
    """Columns delta1_Hz, crosstalk, d2, impurity, ho, total over a detuning scan.

    Here ``crosstalk`` is evaluated at each scanned detuning.
    """
    rows = {k: [] for k in ("delta1_Hz", "crosstalk", "d2", "impurity", "ho", "total")}
    for d in np.asarray(delta1_values, float):
        x = replace(inp, delta1=float(d))
        d2, imp = dark_d2_rate(x), impurity_rate(x)
        ho = ho_wing_rate(lattice_trap_frequency(x), x)
        rows["delta1_Hz"].append(d / (2 * math.pi))
        rows["crosstalk"].append(crosstalk_rate(x))
        rows["d2"].append(d2)
        rows["impurity"].append(imp)
        rows["ho"].append(ho)
        rows["total"].append(d2 + imp + ho)
    return {k: np.array(v) for k, v in rows.items()}


def d2_crossover(inp: BudgetInput, lo: float = 2 * math.pi * 50e9, hi: float = 2 * math.pi * 500e9) -> float:
    """Detuning (rad/s) above which off-resonant D2 scattering exceeds the oscillator-wing rate."""
    def diff(d):
        x = replace(inp, delta1=d)
        return dark_d2_rate(x) - ho_wing_rate(lattice_trap_frequency(x), x)
    return brentq(diff, lo, hi, xtol=1.0)


def reference_input(species: AtomSpecies | None = None, **kwargs) -> BudgetInput:
    return BudgetInput(species or builtin_rb87(), **kwargs)
