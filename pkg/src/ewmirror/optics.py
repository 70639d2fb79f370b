"""Evanescent-wave geometry and polarization at a dielectric/vacuum interface.

Frame: z is the surface normal pointing into the vacuum, x is the in-plane
propagation direction of a single incident beam, y completes a right-handed
set. Complex amplitudes use the exp(-i omega t) convention, so a field with
positive spin ``Im(E* x E)`` along an axis is sigma+ about that axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class InterfaceGeometry:
    """Total internal reflection from glass of index ``n`` into vacuum."""

    n: float
    theta_i: float
    lambda0: float

    def __post_init__(self):
        if not self.n > 1:
            raise ValueError(f"refractive index must exceed 1, got {self.n!r}")
        if not self.lambda0 > 0:
            raise ValueError("wavelength must be positive")
        if not self.theta_i < math.pi / 2:
            raise ValueError("angle of incidence must be below grazing (pi/2)")
        if self.theta_i < self.critical_angle:
            raise ValueError(
                f"evanescent regime requires theta_i >= critical angle "
                f"{self.critical_angle:.6f} rad, got {self.theta_i:.6f} rad")

    @classmethod
    def near_critical(cls, n=1.51, offset=0.01, lambda0=780e-9):
        return cls(n, math.asin(1 / n) + offset, lambda0)

    @classmethod
    def from_decay(cls, kappa_over_k, n=1.51, lambda0=780e-9):
        """Geometry whose decay constant is ``kappa_over_k`` times k_L."""
        return cls(n, math.asin(math.sqrt(1 + kappa_over_k ** 2) / n), lambda0)

    @property
    def critical_angle(self) -> float:
        return math.asin(1 / self.n)

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.lambda0

    @property
    def q(self) -> float:
        """sqrt(n^2 sin^2 theta_i - 1), i.e. kappa / k_L."""
        q2 = (self.n * math.sin(self.theta_i)) ** 2 - 1
        # rounding at exactly the critical angle
        return math.sqrt(q2) if q2 > 0 else 0.0

    @property
    def k_parallel(self) -> float:
        return self.n * self.k0 * math.sin(self.theta_i)


@dataclass(frozen=True)
class PolarizationState:
    """Complex field amplitude (e_x, e_y, e_z) in the surface frame."""

    e_x: complex
    e_y: complex
    e_z: complex

    @classmethod
    def from_vector(cls, vec) -> PolarizationState:
        vec = np.asarray(vec, dtype=complex)
        return cls(complex(vec[0]), complex(vec[1]), complex(vec[2]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.e_x, self.e_y, self.e_z], dtype=complex)

    @property
    def intensity(self) -> float:
        return abs(self.e_x) ** 2 + abs(self.e_y) ** 2 + abs(self.e_z) ** 2

    @property
    def spin(self) -> np.ndarray:
        """Normalized spin vector Im(E* x E) / |E|^2; unit length iff circular."""
        e = self.vector
        return np.imag(np.cross(e.conj(), e)) / self.intensity

    @property
    def degree_of_circularity(self) -> float:
        return float(np.linalg.norm(self.spin))

    def stokes(self, axis=(0.0, 0.0, 1.0)) -> tuple[float, float, float]:
        """Normalized (s1, s2, s3) of the field projected on the plane normal to ``axis``.

        The transverse basis (e1, e2, axis) is right-handed; for the default
        axis it is (x, y, z). s3 = +1 is sigma+ about ``axis``.
        """
        e1, e2 = _transverse_basis(np.asarray(axis, dtype=float))
        e = self.vector
        a, b = e @ e1, e @ e2
        s0 = abs(a) ** 2 + abs(b) ** 2
        if s0 == 0:
            return 0.0, 0.0, 0.0
        ab = a.conjugate() * b
        return ((abs(a) ** 2 - abs(b) ** 2) / s0, 2 * ab.real / s0, 2 * ab.imag / s0)


@dataclass(frozen=True)
class EllipseSpec:
    """Polarization ellipse of a transverse beam.

    ``orientation`` is the angle of the major axis measured from the s (TE)
    direction towards ``k x s``; ``handedness`` is the sign of the helicity
    about the propagation direction.
    """

    ellipticity: float
    orientation: float
    handedness: int = 1

    def __post_init__(self):
        if not 0 <= self.ellipticity <= 1:
            raise ValueError(f"ellipticity must lie in [0, 1], got {self.ellipticity!r}")
        if self.handedness not in (1, -1):
            raise ValueError("handedness must be +1 or -1")

    def jones(self) -> np.ndarray:
        """Unit Jones vector in the (s, k x s) basis."""
        beta = math.atan(self.ellipticity)
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        major, minor = math.cos(beta), 1j * self.handedness * math.sin(beta)
        return np.array([c * major - s * minor, s * major + c * minor])

    @classmethod
    def from_jones(cls, jones) -> EllipseSpec:
        a, b = complex(jones[0]), complex(jones[1])
        s1 = abs(a) ** 2 - abs(b) ** 2
        s2 = 2 * (a.conjugate() * b).real
        s3 = 2 * (a.conjugate() * b).imag
        beta = 0.5 * math.atan2(s3, math.hypot(s1, s2))
        return cls(abs(math.tan(beta)), 0.5 * math.atan2(s2, s1), 1 if s3 >= 0 else -1)


def _transverse_basis(axis):
    axis = axis / np.linalg.norm(axis)
    zhat = np.array([0.0, 0.0, 1.0])
    if np.allclose(axis, zhat):
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    if np.allclose(axis, -zhat):
        return np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])
    e1 = np.cross(zhat, axis)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


def decay_constant(geom: InterfaceGeometry) -> float:
    """kappa = k_L sqrt(n^2 sin^2 theta_i - 1) of the evanescent field amplitude."""
    return geom.k0 * geom.q


def poynting_tilt(geom: InterfaceGeometry) -> float:
    """Sideways tilt chi of the Poynting vector of a circular evanescent wave."""
    return math.atan(geom.q)


def incident_basis(geom: InterfaceGeometry):
    """Unit vectors (k, s, k x s) of the beam incident from the glass side."""
    s, c = math.sin(geom.theta_i), math.cos(geom.theta_i)
    k = np.array([s, 0.0, c])
    e_s = np.array([0.0, 1.0, 0.0])
    return k, e_s, np.cross(k, e_s)


def transmission_coefficients(geom: InterfaceGeometry) -> tuple[complex, complex]:
    """Fresnel amplitude transmission (t_s, t_p) from glass into vacuum beyond TIR.

    t_p refers to the transmitted field along ``(iq, 0, -n sin theta_i)``,
    the complex unit vector of the TM evanescent wave.
    """
    n, c, q = geom.n, math.cos(geom.theta_i), geom.q
    t_s = 2 * n * c / (n * c + 1j * q)
    t_p = 2 * n * c / (c + 1j * n * q)
    return t_s, t_p


def _tm_direction(geom):
    return np.array([1j * geom.q, 0.0, -geom.n * math.sin(geom.theta_i)])


def incident_field(geom: InterfaceGeometry, ellipse: EllipseSpec) -> PolarizationState:
    """Incident field vector in the glass for a beam with polarization ``ellipse``."""
    _, e_s, e_2 = incident_basis(geom)
    a, b = ellipse.jones()
    return PolarizationState.from_vector(a * e_s + b * e_2)


def required_input_polarization(geom: InterfaceGeometry, handedness: int = 1) -> EllipseSpec:
    """Input ellipse that makes the evanescent wave circularly polarized.

    ``handedness=+1`` gives an evanescent wave that is sigma+ about its
    (forward, tilted) spin axis.
    """
    orientation = -handedness * math.atan2(geom.q, math.cos(geom.theta_i))
    return EllipseSpec(1 / geom.n, orientation, handedness)


def evanescent_field(geom: InterfaceGeometry, incident: PolarizationState) -> PolarizationState:
    """Evanescent field amplitude just above the surface for a given incident field."""
    e_in = incident.vector
    k, e_s, e_2 = incident_basis(geom)
    norm = math.sqrt(incident.intensity)
    if not norm > 0 or not np.all(np.isfinite(e_in)):
        raise ValueError("incident field must be finite and nonzero")
    if abs(e_in @ k) > 1e-9 * norm:
        raise ValueError("incident field has a component along its propagation direction")
    t_s, t_p = transmission_coefficients(geom)
    a_s = e_in @ e_s
    a_p = -(e_in @ e_2)
    return PolarizationState.from_vector(t_s * a_s * e_s + t_p * a_p * _tm_direction(geom))


def _beam_field(geom, direction, pol):
    ux, uy = direction
    if pol == "TE":
        return np.array([-uy, ux, 0.0], dtype=complex)
    if pol == "TM":
        s = math.sin(geom.theta_i)
        vec = np.array([1j * geom.q * ux, 1j * geom.q * uy, -geom.n * s])
        return vec / np.linalg.norm(vec)
    raise ValueError(f"beam polarization must be 'TE' or 'TM', got {pol!r}")


def crossing_field(geom, crossing_angle, x, y, polarizations=("TE", "TE"), amplitudes=(1.0, 1.0)):
    """Total field of two evanescent beams crossing at ``crossing_angle``.

    The beams travel in-plane at angles +-crossing_angle/2 from x, so the
    fringe normal is y. Both share ``geom`` (equal decay), so the common
    exp(-kappa z) factor is dropped. Returns a complex array of shape (3, N).
    """
    if not all(abs(a) > 0 for a in amplitudes):
        raise ValueError("both beams need a nonzero amplitude")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    half = crossing_angle / 2
    field = np.zeros((3, np.broadcast(x, y).size), dtype=complex)
    for sign, pol, amp in zip((1, -1), polarizations, amplitudes):
        u = (math.cos(half), sign * math.sin(half))
        phase = np.exp(1j * geom.k_parallel * (u[0] * x + u[1] * y)).ravel()
        field += amp * _beam_field(geom, u, pol)[:, None] * phase[None, :]
    return field


def te_crossing_pattern(geom: InterfaceGeometry, crossing_angle: float,
                        sample_points: Sequence[tuple[float, float]],
                        polarizations=("TE", "TE")) -> list[PolarizationState]:
    pts = np.asarray(sample_points, dtype=float).reshape(-1, 2)
    field = crossing_field(geom, crossing_angle, pts[:, 0], pts[:, 1], polarizations)
    return [PolarizationState.from_vector(col) for col in field.T]


def sigma_line_spacing(geom: InterfaceGeometry, crossing_angle: float = math.pi / 2) -> float:
    """Distance between neighbouring sigma+ and sigma- lines of a two-beam crossing."""
    return geom.lambda0 / (4 * geom.n * math.sin(geom.theta_i) * math.sin(crossing_angle / 2))


def field_map(geom, crossing_angle, x, y, polarizations=("TE", "TE")):
    """Columns x, y, I, s1, s2, s3 (Stokes about the surface normal) on a grid."""
    xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    xx, yy = xx.ravel(), yy.ravel()
    e = crossing_field(geom, crossing_angle, xx, yy, polarizations)
    ex, ey = e[0], e[1]
    intensity = np.sum(np.abs(e) ** 2, axis=0)
    s0 = np.abs(ex) ** 2 + np.abs(ey) ** 2
    safe = np.where(s0 > 0, s0, 1.0)
    cross = ex.conj() * ey
    s1 = (np.abs(ex) ** 2 - np.abs(ey) ** 2) / safe
    s2 = 2 * cross.real / safe
    s3 = 2 * cross.imag / safe
    return {"x": xx, "y": yy, "I": intensity, "s1": s1, "s2": s2, "s3": s3}


def fringe_visibility(intensity_reflectivity: float) -> float:
    """Visibility 2 sqrt(R) / (1 + R) of an incident wave interfering with its reflection."""
    r = intensity_reflectivity
    if not 0 <= r <= 1:
        raise ValueError(f"reflectivity must lie in [0, 1], got {r!r}")
    return 2 * math.sqrt(r) / (1 + r)
