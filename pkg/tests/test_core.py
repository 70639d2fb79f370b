import math

import pytest
from hypothesis import given, strategies as st

from ewmirror.core import (AtomSpecies, KinematicState, builtin_rb87, h, hbar, impact_energy,
                           impact_momentum, in_recoil_units, lamb_dicke)

heights = st.floats(1e-6, 1.0)


def test_rb87_constants(rb87):
    assert rb87.delta_ghf == pytest.approx(2 * math.pi * 6.8e9)
    assert rb87.delta_fs == pytest.approx(2 * math.pi * 7.2e12)
    assert rb87.lambda_d1 == 795e-9
    assert rb87.lambda_d2 == 780e-9
    assert rb87.gamma_d1 == rb87.gamma_d2 == pytest.approx(2 * math.pi * 6.07e6)
    assert rb87.mass == 1.4432e-25


@pytest.mark.parametrize("field,value", [("mass", 0.0), ("gamma_d1", -1.0), ("lambda_d1", 700e-9),
                                         ("delta_ghf", 2 * math.pi * 8e12)])
def test_species_invariants(rb87, field, value):
    kwargs = dict(rb87.__dict__)
    kwargs[field] = value
    with pytest.raises(ValueError):
        AtomSpecies(**kwargs)


def test_kinematic_state_rejects_nan():
    with pytest.raises(ValueError):
        KinematicState(float("nan"), 0.0)


def test_impact_momentum_6mm(rb87):
    p = impact_momentum(rb87, 6e-3)
    # 58.2895 from a 40-digit evaluation
    assert in_recoil_units(p, rb87, 780e-9) == pytest.approx(58.28948525733721, rel=1e-12)
    assert impact_momentum(rb87, 0.0) == 0.0
    assert impact_momentum(rb87, 24e-3) == pytest.approx(2 * p, rel=1e-15)


def test_impact_energy_6mm(rb87):
    kelvin, hertz = impact_energy(rb87, 6e-3)
    assert kelvin == pytest.approx(0.6153e-3, rel=1e-3)
    assert hertz == pytest.approx(12.82e6, rel=1e-3)
    assert impact_energy(rb87, 0.0) == (0.0, 0.0)


def test_negative_height_rejected(rb87):
    with pytest.raises(ValueError):
        impact_momentum(rb87, -1e-3)
    with pytest.raises(ValueError):
        impact_energy(rb87, -1e-3)


def test_lamb_dicke(rb87):
    w_r = rb87.recoil_frequency(780e-9)
    assert w_r / (2 * math.pi) == pytest.approx(3773.204191348832, rel=1e-12)
    assert lamb_dicke(rb87, 780e-9, w_r) == pytest.approx(1.0, rel=1e-15)
    assert lamb_dicke(rb87, 780e-9, 4 * w_r) == pytest.approx(0.5, rel=1e-15)
    # 40-digit reference value
    assert lamb_dicke(rb87, 780e-9, 2 * math.pi * 480e3) == pytest.approx(0.0886613899355862, rel=1e-12)
    with pytest.raises(ValueError):
        lamb_dicke(rb87, 780e-9, 0.0)


@given(heights)
def test_momentum_sqrt_scaling(height):
    sp = builtin_rb87()
    assert impact_momentum(sp, 4 * height) == pytest.approx(2 * impact_momentum(sp, height), rel=1e-15)


@given(heights)
def test_energy_momentum_relation(height):
    sp = builtin_rb87()
    energy = impact_energy(sp, height)[1] * h
    assert energy / impact_momentum(sp, height) ** 2 == pytest.approx(1 / (2 * sp.mass), rel=1e-12)


@given(st.floats(1e2, 1e9))
def test_lamb_dicke_scaling(omega):
    sp = builtin_rb87()
    const = math.sqrt(hbar * (2 * math.pi / 780e-9) ** 2 / (2 * sp.mass))
    assert lamb_dicke(sp, 780e-9, omega) * math.sqrt(omega) == pytest.approx(const, rel=1e-13)
