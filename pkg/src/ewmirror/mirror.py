"""Single-bounce dynamics on the evanescent-wave mirror.

The bouncing atom sees U(z) = U0 exp(-2 kappa z). It scatters photons at
Gamma'(z) and is Raman-pumped into the trapping state at R(z), both with
the same exponential profile. A bounce is interrupted when the Raman
exposure accumulated along the path reaches an exponentially distributed
threshold.

Two routes compute a bounce:

* :func:`integrate_bounce` integrates the trajectory numerically with an
  adaptive, composed velocity-Verlet scheme (optionally with gravity).
* :func:`sample_bounces` uses the closed-form gravity-free trajectory and
  is vectorized over an ensemble.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import AtomSpecies, KinematicState, g, hbar
from .optics import InterfaceGeometry, decay_constant

PUMPED, REFLECTED, OVERRUN = 0, 1, 2
STATUS_NAMES = {PUMPED: "pumped", REFLECTED: "reflected", OVERRUN: "overrun"}


class MirrorOverrun(ValueError):
    """Incident energy exceeds the mirror barrier; the atom reaches the surface."""


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MirrorConfig:
    """Evanescent-wave mirror.

    ``pump_rate0`` decouples the Raman rate at the surface from the mirror
    light (a separate pump laser). When ``None`` it is b * Gamma'_0.
    """

    species: AtomSpecies
    geom: InterfaceGeometry
    u0: float
    delta1: float
    branching_b: float = 0.5
    pump_rate0: Optional[float] = None

    def __post_init__(self):
        if not self.u0 > 0:
            raise ValueError("u0 must be positive")
        if not self.delta1 > 0:
            raise ValueError("delta1 must be positive (blue detuning)")
        if not 0 < self.branching_b <= 1:
            raise ValueError("branching ratio b must lie in (0, 1]")
        if self.pump_rate0 is not None and not self.pump_rate0 >= 0:
            raise ValueError("pump_rate0 must be >= 0")
        if not self.kappa > 0:
            raise ValueError("decay constant vanishes at the critical angle; no mirror")

    @property
    def kappa(self) -> float:
        return decay_constant(self.geom)

    @property
    def scatter_rate0(self) -> float:
        return self.u0 * self.species.gamma / (hbar * self.delta1)

    @property
    def raman_rate0(self) -> float:
        if self.pump_rate0 is not None:
            return self.pump_rate0
        return self.branching_b * self.scatter_rate0

    @property
    def mass(self) -> float:
        return self.species.mass


@dataclass
class BounceOutcome:
    status: int
    z_p: Optional[float]
    v_p: Optional[float]
    photons_scattered: float
    t_exit: float
    raman_exposure: float
    potential_integral: float
    final: Optional[KinematicState] = None
    path: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def pumped(self) -> bool:
        return self.status == PUMPED


@dataclass(frozen=True)
class BounceOptions:
    """Integrator controls. ``eta`` scales the step against the local time scale."""

    eta: float = 0.02
    max_exposure_step: float = 1e-3
    gravity: bool = False
    record: bool = False
    max_steps: int = 1_000_000
    min_step: float = 1e-18


def _profile(cfg, z):
    return np.exp(-2 * cfg.kappa * np.asarray(z, dtype=float))


def _check_z(z):
    if np.any(np.asarray(z) < 0):
        raise ValueError("z < 0 lies inside the dielectric")


def potential(cfg: MirrorConfig, z):
    _check_z(z)
    return cfg.u0 * _profile(cfg, z)


def scatter_rate(cfg: MirrorConfig, z):
    _check_z(z)
    return cfg.scatter_rate0 * _profile(cfg, z)


def raman_rate(cfg: MirrorConfig, z):
    _check_z(z)
    return cfg.raman_rate0 * _profile(cfg, z)


def turning_point(cfg: MirrorConfig, incident_energy: float) -> float:
    """Height where U(z) equals ``incident_energy``."""
    if not incident_energy > 0:
        raise ValueError("incident energy must be positive")
    if incident_energy > cfg.u0:
        raise MirrorOverrun(f"incident energy {incident_energy:.4g} J exceeds U0 = {cfg.u0:.4g} J")
    return math.log(cfg.u0 / incident_energy) / (2 * cfg.kappa)


def bounce_raman_exposure(cfg: MirrorConfig, p_i: float) -> float:
    """Raman exposure integral of R dt over a complete bounce with incident momentum p_i."""
    return cfg.raman_rate0 / cfg.u0 * _full_bounce_potential_integral(cfg, p_i)


def bounce_scattered_photons(cfg: MirrorConfig, p_i: float) -> float:
    """Expected photons scattered over a complete bounce, (Gamma/delta1) p_i / (hbar kappa)."""
    return cfg.scatter_rate0 / cfg.u0 * _full_bounce_potential_integral(cfg, p_i)


def _full_bounce_potential_integral(cfg, p_i):
    energy = p_i ** 2 / (2 * cfg.mass)
    if energy > cfg.u0:
        raise MirrorOverrun("incident energy exceeds U0")
    # integral of U dt over the bounce equals m v_i / kappa
    return p_i / cfg.kappa


def optimal_ratio(species: AtomSpecies, p_i: float, kappa: float) -> float:
    """U0 / R0 (J s) giving unit Raman exposure up to the turning point."""
    if not (p_i > 0 and kappa > 0):
        raise ValueError("p_i and kappa must be positive")
    return p_i / (2 * kappa)


def optimal_detuning(b: float, p_i: float, kappa: float, gamma: float) -> float:
    """Detuning (rad/s) for which a single mirror laser also pumps optimally."""
    if not (b > 0 and p_i > 0 and kappa > 0 and gamma > 0):
        raise ValueError("arguments must be positive")
    return gamma * b * p_i / (2 * hbar * kappa)


def turning_point_wavelength_scale(cfg: MirrorConfig, p_i: float) -> float:
    """Width kappa^-1 (hbar kappa / p_i)^(2/3) of the wavefunction near the turning point."""
    if not p_i > 0:
        raise ValueError("p_i must be positive")
    kappa = cfg.kappa
    return (hbar * kappa / p_i) ** (2 / 3) / kappa


def entry_edge(cfg: MirrorConfig, level: float = 1e-7) -> float:
    """Height where U has dropped to ``level`` * U0."""
    return math.log(1 / level) / (2 * cfg.kappa)


# -- numerical route --------------------------------------------------------

# sixth-order Yoshida composition of the velocity-Verlet step
_W1, _W2, _W3 = -1.17767998417887, 0.235573213359357, 0.784513610477560
_W0 = 1 - 2 * (_W1 + _W2 + _W3)
_COMPOSITION = (_W3, _W2, _W1, _W0, _W1, _W2, _W3)


class _Stepper:
    def __init__(self, cfg, gravity):
        self.two_kappa = 2 * cfg.kappa
        self.u0 = cfg.u0
        self.m = cfg.mass
        self.grav = g if gravity else 0.0

    def fields(self, z):
        u = self.u0 * math.exp(-self.two_kappa * z)
        return u, self.two_kappa * u / self.m - self.grav

    def step(self, z, v, acc, h, u=None, a=None):
        """Advance (z, v, integral of U dt) by one composed step of size h."""
        if u is None:
            u, a = self.fields(z)
        for w in _COMPOSITION:
            hw = w * h
            v += 0.5 * hw * a
            acc += 0.5 * hw * u
            z += hw * v
            u, a = self.fields(z)
            v += 0.5 * hw * a
            acc += 0.5 * hw * u
        return z, v, acc, u, a

    def energy(self, z, v):
        return 0.5 * self.m * v * v + self.u0 * math.exp(-self.two_kappa * z) + self.m * self.grav * z


def _draw_threshold(rng, exposure_target):
    if exposure_target is not None:
        return float(exposure_target)
    if rng is None:
        return math.inf
    return -math.log1p(-rng.random())


def integrate_bounce(cfg: MirrorConfig, entry: KinematicState, rng: Optional[np.random.Generator] = None,
                     options: BounceOptions = BounceOptions(), *,
                     exposure_target: Optional[float] = None) -> BounceOutcome:
    """Integrate one bounce from ``entry`` until the atom is pumped or leaves at the entry height.

    The pump threshold is ``exposure_target`` if given, else -ln(u) with u
    drawn from ``rng``; with neither the bounce is elastic.
    """
    if not entry.v < 0:
        raise ValueError("entry velocity must point towards the surface (v < 0)")
    if entry.z < 0:
        raise ValueError("entry lies inside the dielectric")
    stepper = _Stepper(cfg, options.gravity)
    e0 = stepper.energy(entry.z, entry.v)
    target = _draw_threshold(rng, exposure_target)
    ratio_r = cfg.raman_rate0 / cfg.u0
    ratio_s = cfg.scatter_rate0 / cfg.u0
    if e0 > cfg.u0:
        return BounceOutcome(OVERRUN, None, None, 0.0, entry.t, 0.0, 0.0, final=entry)

    z, v, acc, t = entry.z, entry.v, 0.0, entry.t
    u, a = stepper.fields(z)
    kappa = cfg.kappa
    omega_scale = 2 * kappa / math.sqrt(cfg.mass)
    rows = [(t, z, v, 0.0)] if options.record else None

    for _ in range(options.max_steps):
        rate = max(kappa * abs(v), omega_scale * math.sqrt(u))
        h = options.eta / rate
        if ratio_r > 0:
            h = min(h, options.max_exposure_step / (ratio_r * u))
        if h < options.min_step:
            raise IntegrationError(f"step size underflow (h = {h:.3g} s)")
        z1, v1, acc1, u1, a1 = stepper.step(z, v, acc, h, u, a)

        if ratio_r * acc1 >= target:
            s = brentq(lambda s: ratio_r * stepper.step(z, v, acc, s * h, u, a)[2] - target,
                       0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            zp, vp, accp, _, _ = stepper.step(z, v, acc, s * h, u, a)
            tp = t + s * h
            if rows is not None:
                rows.append((tp, zp, vp, ratio_r * accp))
            return BounceOutcome(PUMPED, zp, vp, ratio_s * accp, tp, ratio_r * accp, accp,
                                 final=KinematicState(zp, vp, tp), path=_path(rows))

        if v1 > 0 and z1 >= entry.z:
            s = brentq(lambda s: stepper.step(z, v, acc, s * h, u, a)[0] - entry.z,
                       0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            ze, ve, acce, _, _ = stepper.step(z, v, acc, s * h, u, a)
            te = t + s * h
            if rows is not None:
                rows.append((te, ze, ve, ratio_r * acce))
            return BounceOutcome(REFLECTED, None, None, ratio_s * acce, te, ratio_r * acce, acce,
                                 final=KinematicState(ze, ve, te), path=_path(rows))

        z, v, acc, u, a = z1, v1, acc1, u1, a1
        t += h
        if rows is not None:
            rows.append((t, z, v, ratio_r * acc))
    raise IntegrationError(f"no exit after {options.max_steps} steps")


def _path(rows):
    return None if rows is None else np.array(rows)


# -- closed-form route ------------------------------------------------------

def sample_bounces(cfg: MirrorConfig, z_entry, v_entry, exposure_target):
    """Vectorized exact bounce outcomes without gravity inside the mirror.

    With E = m v_inf^2 / 2, the velocity along the bounce obeys
    m dv/dt = 2 kappa U, so the Raman exposure accumulated since entry is
    (R0 / U0) m (v - v_entry) / (2 kappa), linear in v. Inverting it at the
    threshold gives v_p, and energy conservation gives z_p.

    Returns a dict of arrays: status, z_p, v_p (nan unless pumped),
    photons, exposure.
    """
    z_entry, v_entry, target = np.broadcast_arrays(
        np.asarray(z_entry, float), np.asarray(v_entry, float), np.asarray(exposure_target, float))
    if np.any(v_entry >= 0):
        raise ValueError("entry velocities must be negative")
    m, kappa, u0 = cfg.mass, cfg.kappa, cfg.u0
    energy = 0.5 * m * v_entry ** 2 + u0 * np.exp(-2 * kappa * z_entry)
    overrun = energy > u0
    # integral of U dt per unit velocity change
    per_dv = m / (2 * kappa)
    ratio_r = cfg.raman_rate0 / u0
    full = ratio_r * per_dv * 2 * np.abs(v_entry)
    pumped = ~overrun & (target < full)
    with np.errstate(divide="ignore", invalid="ignore"):
        v_p = np.where(pumped, v_entry + target / (ratio_r * per_dv), np.nan)
        kinetic = 0.5 * m * v_p ** 2
        z_p = np.where(pumped, np.log(u0 / (energy - kinetic)) / (2 * kappa), np.nan)
    exposure = np.where(pumped, target, np.where(overrun, 0.0, full))
    photons = np.where(overrun, 0.0, cfg.scatter_rate0 / u0 * per_dv *
                       np.where(pumped, v_p - v_entry, 2 * np.abs(v_entry)))
    status = np.where(overrun, OVERRUN, np.where(pumped, PUMPED, REFLECTED)).astype(np.int8)
    return {"status": status, "z_p": z_p, "v_p": v_p, "photons": photons, "exposure": exposure}


def closed_form_trajectory(cfg: MirrorConfig, energy: float):
    """Gravity-free trajectory z(t), v(t) with t = 0 at the turning point."""
    v_inf = math.sqrt(2 * energy / cfg.mass)
    z_t = turning_point(cfg, energy)
    kappa = cfg.kappa

    def z_of_t(t):
        x = kappa * v_inf * np.asarray(t, float)
        # log cosh without overflow
        return z_t + (np.abs(x) + np.log1p(np.exp(-2 * np.abs(x))) - math.log(2)) / kappa

    def v_of_t(t):
        return v_inf * np.tanh(kappa * v_inf * np.asarray(t, float))

    return z_of_t, v_of_t
