"""Monte Carlo phase-space compression by inelastic bouncing.

Atoms are drawn from a Gaussian molasses distribution, fall ballistically
to the edge of the evanescent region and bounce with stochastic Raman
interruption. Pump coordinates are histogrammed into a dimensionless
phase-space density (probability per quantum state, i.e. classical
density times h/m).

Random numbers come in fixed-size blocks, each seeded from
``SeedSequence(master_seed, spawn_key=(block,))``. The draws of atom ``i``
therefore depend only on the master seed and ``i``, never on how blocks
are scheduled across threads.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import mirror as md
from .core import AtomSpecies, KinematicState, g, h, k_B
from .optics import InterfaceGeometry

log = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class MolassesConfig:
    """Initial cloud. ``sigma_v`` overrides ``temperature`` when given."""

    sigma_z: float = 0.2e-3
    temperature: float = 10e-6
    sigma_v: Optional[float] = None
    drop_height: float = 6e-3
    n_atoms: int = 1_000_000
    master_seed: int = 0

    def __post_init__(self):
        if not self.sigma_z > 0:
            raise ValueError("sigma_z must be positive")
        if self.sigma_v is None and not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if self.sigma_v is not None and not self.sigma_v > 0:
            raise ValueError("sigma_v must be positive")
        if not self.drop_height > 0:
            raise ValueError("drop_height must be positive")
        if not self.n_atoms >= 1:
            raise ValueError("n_atoms must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def velocity_width(self, species: AtomSpecies) -> float:
        if self.sigma_v is not None:
            return self.sigma_v
        return math.sqrt(k_B * self.temperature / species.mass)

    def peak_density(self, species: AtomSpecies) -> float:
        """Dimensionless peak of the Gaussian Phi(z, v)."""
        return (h / species.mass) / (2 * math.pi * self.sigma_z * self.velocity_width(species))


@dataclass
class PhaseSpaceHistogram:
    z_edges: np.ndarray
    v_edges: np.ndarray
    counts: np.ndarray
    total_weight: float
    mass: float

    @property
    def z_centers(self):
        return 0.5 * (self.z_edges[1:] + self.z_edges[:-1])

    @property
    def v_centers(self):
        return 0.5 * (self.v_edges[1:] + self.v_edges[:-1])

    def probability(self) -> np.ndarray:
        return self.counts / self.total_weight

    def density(self) -> np.ndarray:
        """Dimensionless density per bin, shape (n_z, n_v)."""
        area = np.outer(np.diff(self.z_edges), np.diff(self.v_edges))
        return self.probability() / area * (h / self.mass)

    def row_index(self, v: float = 0.0) -> int:
        j = int(np.searchsorted(self.v_edges, v, side="right")) - 1
        if not 0 <= j < len(self.v_edges) - 1:
            raise ValueError(f"v = {v} lies outside the histogram")
        return j

    def row(self, v: float = 0.0) -> np.ndarray:
        return self.density()[:, self.row_index(v)]

    def __add__(self, other):
        if not (np.array_equal(self.z_edges, other.z_edges) and np.array_equal(self.v_edges, other.v_edges)):
            raise ValueError("histograms have different bins")
        return PhaseSpaceHistogram(self.z_edges, self.v_edges, self.counts + other.counts,
                                   self.total_weight + other.total_weight, self.mass)


@dataclass
class CompressionReport:
    peak_initial: float
    peak_final: float
    compression_factor: float
    pumped_fraction: float
    unpumped_fraction: float
    overrun_fraction: float
    width_z_at_v0: float
    z_at_peak: float
    mean_photons: float
    n_atoms: int
    no_pumped_atoms: bool = False

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class Binning:
    """Histogram layout; ``None`` ranges default to [0, 5/2kappa] x [-v_i, v_i]."""

    n_z: int = 256
    n_v: int = 65
    z_range: Optional[tuple] = None
    v_range: Optional[tuple] = None

    def edges(self, mirror: md.MirrorConfig, mol: MolassesConfig):
        z_range = self.z_range or (0.0, 2.5 / mirror.kappa)
        if self.v_range is None:
            v_i = math.sqrt(2 * g * mol.drop_height)
            v_range = (-v_i, v_i)
        else:
            v_range = self.v_range
        return np.linspace(*z_range, self.n_z + 1), np.linspace(*v_range, self.n_v + 1)


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(block,))))


def sample_initial(cfg: MolassesConfig, species: AtomSpecies, rng: np.random.Generator, size: Optional[int] = None):
    """Positions and velocities ``(z, v)`` from the molasses Gaussian."""
    size = cfg.n_atoms if size is None else size
    z = rng.normal(cfg.drop_height, cfg.sigma_z, size)
    v = rng.normal(0.0, cfg.velocity_width(species), size)
    return z, v


def free_fall(z, v, edge_height):
    """Ballistic arrival ``(t_arrival, v_i)`` at ``edge_height`` from above."""
    z, v = np.asarray(z, float), np.asarray(v, float)
    drop = z - edge_height
    if np.any(drop < 0):
        raise ValueError("start must lie above the edge")
    speed = np.sqrt(v * v + 2 * g * drop)
    return (v + speed) / g, -speed


def free_fall_to_mirror(state: KinematicState, edge_height: float) -> KinematicState:
    t_arr, v_i = free_fall(state.z, state.v, edge_height)
    if t_arr == 0:
        return state
    return KinematicState(edge_height, float(v_i), state.t + float(t_arr))


def _entry_states(z0, v0, edge):
    """Entry point into the evanescent region for each atom; z < 0 marks a start inside the glass."""
    above = z0 >= edge
    z_in = np.where(above, edge, z0)
    speed = np.sqrt(v0 * v0 + 2 * g * np.where(above, z0 - edge, 0.0))
    speed = np.maximum(speed, np.finfo(float).tiny)
    return z_in, -speed


def _run_block(mol, mirror, z_edges, v_edges, edge, block, n, method, options):
    rng = block_rng(mol.master_seed, block)
    z0, v0 = sample_initial(mol, mirror.species, rng, n)
    target = -np.log1p(-rng.random(n))
    z_in, v_in = _entry_states(z0, v0, edge)
    inside_glass = z_in < 0
    z_in = np.where(inside_glass, edge, z_in)
    if method == "closed_form":
        res = md.sample_bounces(mirror, z_in, v_in, target)
        status, z_p, v_p, photons = res["status"], res["z_p"], res["v_p"], res["photons"]
    elif method == "integrate":
        status = np.empty(n, np.int8)
        z_p = np.full(n, np.nan)
        v_p = np.full(n, np.nan)
        photons = np.zeros(n)
        for i in range(n):
            out = md.integrate_bounce(mirror, KinematicState(z_in[i], v_in[i]), options=options,
                                      exposure_target=target[i])
            status[i] = out.status
            photons[i] = out.photons_scattered
            if out.pumped:
                z_p[i], v_p[i] = out.z_p, out.v_p
    else:
        raise ValueError(f"unknown method {method!r}")
    status = np.where(inside_glass, md.OVERRUN, status)
    pumped = status == md.PUMPED
    counts, _, _ = np.histogram2d(z_p[pumped], v_p[pumped], bins=(z_edges, v_edges))
    tallies = np.bincount(status, minlength=3)
    return counts.astype(np.int64), tallies, float(photons.sum())


def run_ensemble(mol: MolassesConfig, mirror: md.MirrorConfig, bins: Optional[Binning] = None, *,
                 threads: int = 1, method: str = "closed_form",
                 options: md.BounceOptions = md.BounceOptions(), edge_level: float = 1e-7,
                 smoothing: float = 0.0):
    """Simulate the ensemble and histogram the pump coordinates.

    ``method="closed_form"`` uses the exact gravity-free bounce,
    ``"integrate"`` the numerical integrator (slow, honours
    ``options.gravity``). Output is identical for any ``threads``.
    """
    bins = bins or Binning()
    z_edges, v_edges = bins.edges(mirror, mol)
    edge = md.entry_edge(mirror, edge_level)
    n_blocks = -(-mol.n_atoms // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, mol.n_atoms - b * BLOCK_SIZE) for b in range(n_blocks)]

    def work(b):
        return _run_block(mol, mirror, z_edges, v_edges, edge, b, sizes[b], method, options)

    workers = threads if threads > 0 else (os.cpu_count() or 1)
    if workers == 1:
        results = [work(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, range(n_blocks)))

    counts = sum(r[0] for r in results)
    tallies = sum(r[1] for r in results)
    photons = math.fsum(r[2] for r in results)
    hist = PhaseSpaceHistogram(z_edges, v_edges, counts, float(mol.n_atoms), mirror.mass)
    report = compression_report(hist, mol, mirror.species, tallies, photons, smoothing)
    return hist, report


def peak_along_row(row, centers, smoothing: float = 0.0):
    """Peak value and position of a density row, with 3-point parabolic refinement.

    ``smoothing`` is the width (in bins) of a Gaussian kernel applied first.
    """
    row = np.asarray(row, float)
    if smoothing > 0:
        half = int(math.ceil(4 * smoothing))
        x = np.arange(-half, half + 1)
        kernel = np.exp(-0.5 * (x / smoothing) ** 2)
        row = np.convolve(row, kernel / kernel.sum(), mode="same")
    i = int(np.argmax(row))
    peak, pos = row[i], centers[i]
    if 0 < i < len(row) - 1:
        ym, y0, yp = row[i - 1], row[i], row[i + 1]
        curv = ym - 2 * y0 + yp
        if curv < 0:
            offset = 0.5 * (ym - yp) / curv
            peak = y0 - 0.25 * (ym - yp) * offset
            pos = centers[i] + offset * (centers[1] - centers[0])
    return float(peak), float(pos)


def full_width_half_max(row, centers) -> float:
    row = np.asarray(row, float)
    i = int(np.argmax(row))
    half = row[i] / 2
    if half <= 0:
        return 0.0
    lo = i
    while lo > 0 and row[lo - 1] > half:
        lo -= 1
    hi = i
    while hi < len(row) - 1 and row[hi + 1] > half:
        hi += 1
    dz = centers[1] - centers[0]
    left = centers[lo] - dz * (row[lo] - half) / (row[lo] - row[lo - 1]) if lo > 0 else centers[0]
    right = centers[hi] + dz * (row[hi] - half) / (row[hi] - row[hi + 1]) if hi < len(row) - 1 else centers[-1]
    return float(right - left)


def compression_report(hist, mol, species, tallies, photons, smoothing=0.0) -> CompressionReport:
    n = mol.n_atoms
    row = hist.row(0.0)
    peak_initial = mol.peak_density(species)
    no_pumped = tallies[md.PUMPED] == 0
    if no_pumped or not row.any():
        if no_pumped:
            log.warning("no atoms were pumped; peak density is zero")
        peak, pos, width = 0.0, float("nan"), 0.0
    else:
        peak, pos = peak_along_row(row, hist.z_centers, smoothing)
        width = full_width_half_max(row, hist.z_centers)
    return CompressionReport(
        peak_initial=peak_initial,
        peak_final=peak,
        compression_factor=peak / peak_initial,
        pumped_fraction=float(tallies[md.PUMPED] / n),
        unpumped_fraction=float(tallies[md.REFLECTED] / n),
        overrun_fraction=float(tallies[md.OVERRUN] / n),
        width_z_at_v0=width,
        z_at_peak=pos,
        mean_photons=photons / n,
        n_atoms=n,
        no_pumped_atoms=bool(no_pumped),
    )


# -- parameter optimization -------------------------------------------------

INVERSE_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass
class OptimizeResult:
    params: dict
    report: CompressionReport
    at_boundary: dict = field(default_factory=dict)
    evaluations: int = 0


def with_params(mirror: md.MirrorConfig, params: dict) -> md.MirrorConfig:
    """Apply free parameters ``kappa`` (m^-1), ``ratio`` (U0/R0, J s) or ``delta1`` (rad/s)."""
    cfg = mirror
    if "kappa" in params:
        geom = InterfaceGeometry.from_decay(params["kappa"] / cfg.geom.k0, cfg.geom.n, cfg.geom.lambda0)
        cfg = replace(cfg, geom=geom)
    if "delta1" in params:
        cfg = replace(cfg, delta1=params["delta1"], pump_rate0=None)
    if "ratio" in params:
        cfg = replace(cfg, pump_rate0=cfg.u0 / params["ratio"])
    return cfg


def golden_section_max(f, lo, hi, tol=1e-3, max_iter=100):
    """Maximize a unimodal ``f`` on [lo, hi] to absolute tolerance ``tol``.

    Returns (x, f(x), at_boundary, n_evals). The bounds are evaluated last
    and win if they beat the interior optimum.
    """
    if hi < lo:
        raise ValueError("empty bracket")
    if hi == lo:
        return lo, f(lo), False, 1
    a, b = lo, hi
    x1 = b - INVERSE_GOLDEN * (b - a)
    x2 = a + INVERSE_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    while b - a > tol and evals < max_iter:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVERSE_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVERSE_GOLDEN * (b - a)
            f2 = f(x2)
        evals += 1
    x, fx = (x1, f1) if f1 >= f2 else (x2, f2)
    f_lo, f_hi = f(lo), f(hi)
    evals += 2
    if f_lo > fx and f_lo >= f_hi:
        return lo, f_lo, True, evals
    if f_hi > fx:
        return hi, f_hi, True, evals
    # an interior optimum squeezed against a bound is reported as a boundary hit
    return x, fx, min(x - lo, hi - x) <= tol, evals


def optimize_peak(mol: MolassesConfig, mirror: md.MirrorConfig, bounds: dict, *, sweeps: int = 2,
                  tol: float = 1e-3, smoothing: float = 4.0, bins: Optional[Binning] = None,
                  threads: int = 1) -> OptimizeResult:
    """Coordinate-wise golden-section search for the largest smoothed peak of rho(z_p, 0).

    ``bounds`` maps one or two of ``kappa``, ``ratio``, ``delta1`` to
    ``(lo, hi)``. Every evaluation reuses ``mol.master_seed`` (common
    random numbers) so the objective is deterministic. Searches run in
    log space.
    """
    if not 1 <= len(bounds) <= 2:
        raise ValueError("optimize between one and two parameters")
    for name, (lo, hi) in bounds.items():
        if name not in ("kappa", "ratio", "delta1"):
            raise ValueError(f"unknown free parameter {name!r}")
        if not 0 < lo <= hi:
            raise ValueError(f"bounds for {name} must satisfy 0 < lo <= hi")
    if "ratio" in bounds and "delta1" in bounds:
        raise ValueError("ratio and delta1 both set the pump rate; free only one")
    # kappa first so ratio/delta1 see the final geometry
    names = sorted(bounds, key=lambda k: k != "kappa")
    current = {k: math.sqrt(bounds[k][0] * bounds[k][1]) for k in names}
    flags = {}
    evals = 0

    def objective(params):
        _, rep = run_ensemble(mol, with_params(mirror, params), bins, threads=threads, smoothing=smoothing)
        return rep.peak_final

    for _ in range(sweeps if len(names) > 1 else 1):
        for name in names:
            lo, hi = bounds[name]

            def f(logx, name=name):
                return objective({**current, name: math.exp(logx)})

            log_lo, log_hi = math.log(lo), math.log(hi)
            x, _, edge, n = golden_section_max(f, log_lo, log_hi, tol)
            current[name] = lo if x == log_lo else hi if x == log_hi else math.exp(x)
            flags[name] = edge
            evals += n
    _, report = run_ensemble(mol, with_params(mirror, current), bins, threads=threads, smoothing=smoothing)
    return OptimizeResult(dict(current), report, flags, evals + 1)


def reference_mirror(species: AtomSpecies, drop_height: float = 6e-3, n: float = 1.51,
                     offset: float = 0.01, lambda0: float = 780e-9, detuning_in_gamma: float = 100.0,
                     b: float = 0.5, u0_over_impact: float = 2.0) -> md.MirrorConfig:
    """Reference mirror: U0 twice the impact energy, delta1 = 100 Gamma, b = 0.5."""
    geom = InterfaceGeometry.near_critical(n, offset, lambda0)
    energy = species.mass * g * drop_height
    return md.MirrorConfig(species, geom, u0_over_impact * energy, detuning_in_gamma * species.gamma, b)
