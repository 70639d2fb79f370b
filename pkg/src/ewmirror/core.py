"""Physical constants, atomic species data and free-fall kinematics.

Everything is SI internally. Conversions to recoil units, mK or MHz only
happen in the small accessor helpers at the bottom of this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as csts

h = csts.h
hbar = csts.hbar
k_B = csts.k
c = csts.c
# fixed on purpose, see README
g = 9.81


@dataclass(frozen=True)
class AtomSpecies:
    """Atomic constants used by the mirror, optics and budget modules.

    Linewidths and splittings are angular frequencies (rad/s), wavelengths
    are vacuum wavelengths in metres.
    """

    name: str
    mass: float
    gamma_d1: float
    gamma_d2: float
    lambda_d1: float
    lambda_d2: float
    delta_ghf: float
    delta_fs: float

    def __post_init__(self):
        for field in ("mass", "gamma_d1", "gamma_d2", "lambda_d1",
                      "lambda_d2", "delta_ghf", "delta_fs"):
            value = getattr(self, field)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"AtomSpecies.{field} must be positive, got {value!r}")
        if not self.delta_fs > self.delta_ghf:
            raise ValueError("fine-structure splitting must exceed the ground hyperfine splitting")
        if not self.lambda_d1 > self.lambda_d2:
            raise ValueError("D1 must be the longer-wavelength line (lambda_d1 > lambda_d2)")

    @property
    def gamma(self) -> float:
        """Linewidth used in the far-detuned rate estimates (the D1 value)."""
        return self.gamma_d1

    def recoil_momentum(self, wavelength: float) -> float:
        return hbar * 2 * math.pi / wavelength

    def recoil_frequency(self, wavelength: float) -> float:
        """omega_R = hbar k^2 / 2m in rad/s."""
        k = 2 * math.pi / wavelength
        return hbar * k ** 2 / (2 * self.mass)


@dataclass(frozen=True)
class KinematicState:
    """Vertical position (above the surface), velocity (up positive) and time."""

    z: float
    v: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.z) and math.isfinite(self.v)):
            raise ValueError("KinematicState needs finite z and v")


def builtin_rb87() -> AtomSpecies:
    gamma = 2 * math.pi * 6.07e6
    return AtomSpecies(
        name="Rb87",
        mass=1.4432e-25,
        gamma_d1=gamma,
        gamma_d2=gamma,
        lambda_d1=795e-9,
        lambda_d2=780e-9,
        delta_ghf=2 * math.pi * 6.8e9,
        delta_fs=2 * math.pi * 7.2e12,
    )


def _check_height(drop_height):
    if not drop_height >= 0:
        raise ValueError(f"drop height must be >= 0, got {drop_height!r}")


def impact_velocity(drop_height: float) -> float:
    """Speed after falling from rest through ``drop_height``."""
    _check_height(drop_height)
    return math.sqrt(2 * g * drop_height)


def impact_momentum(species: AtomSpecies, drop_height: float) -> float:
    """Momentum (kg m/s) of an atom dropped from rest through ``drop_height``.

    Use :func:`in_recoil_units` to express it in units of hbar k_L.
    """
    return species.mass * impact_velocity(drop_height)


def in_recoil_units(momentum: float, species: AtomSpecies, wavelength: float) -> float:
    return momentum / species.recoil_momentum(wavelength)


def impact_energy(species: AtomSpecies, drop_height: float) -> tuple[float, float]:
    """Kinetic energy after the drop as ``(kelvin, hertz)`` equivalents."""
    _check_height(drop_height)
    energy = species.mass * g * drop_height
    return energy / k_B, energy / h


def lamb_dicke(species: AtomSpecies, wavelength: float, trap_freq: float) -> float:
    """k z0 = sqrt(omega_R / omega) for a trap of angular frequency ``trap_freq``."""
    if not trap_freq > 0:
        raise ValueError(f"trap frequency must be positive, got {trap_freq!r}")
    return math.sqrt(species.recoil_frequency(wavelength) / trap_freq)
