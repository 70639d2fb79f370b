import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ewmirror import mirror as md
from ewmirror.core import KinematicState, builtin_rb87, g, hbar
from ewmirror.optics import InterfaceGeometry

SP = builtin_rb87()
K780 = 2 * math.pi / 780e-9


def make_cfg(kappa_over_k=0.15, p_recoils=60.0, u0_over_e=2.0, delta_gamma=100.0, b=0.5, pump_rate0=None):
    geom = InterfaceGeometry.from_decay(kappa_over_k)
    p = p_recoils * hbar * K780
    energy = p ** 2 / (2 * SP.mass)
    cfg = md.MirrorConfig(SP, geom, u0_over_e * energy, delta_gamma * SP.gamma, b, pump_rate0)
    return cfg, p, energy


def far_entry(cfg, energy, level=1e-12):
    """Entry state where U has fallen to ``level`` times the incident energy."""
    z = md.turning_point(cfg, energy) + math.log(1 / level) / (2 * cfg.kappa)
    u = float(md.potential(cfg, z))
    return KinematicState(z, -math.sqrt(2 * (energy - u) / cfg.mass))


def quad_potential_integral(cfg, energy):
    """2 * integral of U dz / |v| from the turning point outwards, with z = z_t + s^2."""
    z_t = md.turning_point(cfg, energy)
    m, kappa = cfg.mass, cfg.kappa

    def integrand(s):
        if s == 0:
            # limit: U / sqrt(2 (E - U) / m) * 2 s with E - U ~ 2 kappa E s^2
            return 2 * energy / math.sqrt(4 * kappa * energy / m)
        z = z_t + s * s
        u = cfg.u0 * math.exp(-2 * kappa * z)
        return u * 2 * s / math.sqrt(2 * (energy - u) / m)

    s_max = math.sqrt(60 / (2 * kappa))
    val, _ = quad(integrand, 0, s_max, epsabs=0, epsrel=1e-13, limit=200)
    return 2 * val


def test_profiles_share_decay():
    cfg, _, _ = make_cfg()
    z = np.linspace(0, 2e-6, 7)
    u, gs, r = md.potential(cfg, z), md.scatter_rate(cfg, z), md.raman_rate(cfg, z)
    np.testing.assert_allclose(u / cfg.u0, gs / cfg.scatter_rate0, rtol=1e-15)
    np.testing.assert_allclose(r, 0.5 * gs, rtol=1e-15)
    np.testing.assert_allclose(u[1:] / u[:-1], math.exp(-2 * cfg.kappa * z[1]), rtol=1e-12)
    for fn in (md.potential, md.scatter_rate, md.raman_rate):
        with pytest.raises(ValueError):
            fn(cfg, -1e-9)


def test_config_validation():
    geom = InterfaceGeometry.from_decay(0.15)
    with pytest.raises(ValueError):
        md.MirrorConfig(SP, geom, 0.0, 1.0)
    with pytest.raises(ValueError):
        md.MirrorConfig(SP, geom, 1e-28, -1.0)
    with pytest.raises(ValueError):
        md.MirrorConfig(SP, geom, 1e-28, 1.0, branching_b=1.5)
    critical = InterfaceGeometry(1.51, math.asin(1 / 1.51), 780e-9)
    with pytest.raises(ValueError):
        md.MirrorConfig(SP, critical, 1e-28, 1.0)


def test_turning_point_reference():
    cfg, _, energy = make_cfg()
    # ln 2 / (2 * 0.15 k_L)
    assert md.turning_point(cfg, energy) == pytest.approx(286.8259441e-9, rel=1e-9)
    with pytest.raises(md.MirrorOverrun):
        md.turning_point(cfg, 1.01 * cfg.u0)
    with pytest.raises(ValueError):
        md.turning_point(cfg, 0.0)


def test_photon_budget_closed_form():
    cfg, p, _ = make_cfg()
    n_sc = md.bounce_scattered_photons(cfg, p)
    assert n_sc == pytest.approx(4.0, rel=1e-12)
    assert cfg.branching_b * n_sc == pytest.approx(2.0, rel=1e-12)
    assert md.bounce_raman_exposure(cfg, p) == pytest.approx(2.0, rel=1e-12)


@given(st.floats(0.01, 1.0), st.floats(1.0, 500.0), st.floats(1.05, 20.0))
def test_photon_budget_independent_of_u0(kq, p_rec, ratio):
    cfg, p, _ = make_cfg(kq, p_rec, ratio, delta_gamma=50.0)
    assert md.bounce_scattered_photons(cfg, p) == pytest.approx(p_rec / kq / 50.0, rel=1e-10)


def test_turning_point_wavelength_scale():
    cfg, p, _ = make_cfg()
    assert md.turning_point_wavelength_scale(cfg, p) == pytest.approx(15.24456e-9, rel=1e-5)


def test_optimal_ratio_and_detuning():
    cfg, p, _ = make_cfg()
    ratio = md.optimal_ratio(SP, p, cfg.kappa)
    assert ratio == pytest.approx(SP.mass * (p / SP.mass) / (2 * cfg.kappa), rel=1e-15)
    # with R0 = U0 / ratio the exposure to the turning point is 1, i.e. half a bounce
    tuned = md.MirrorConfig(SP, cfg.geom, cfg.u0, cfg.delta1, pump_rate0=cfg.u0 / ratio)
    assert md.bounce_raman_exposure(tuned, p) == pytest.approx(2.0, rel=1e-14)
    delta = md.optimal_detuning(0.5, p, cfg.kappa, SP.gamma)
    single = md.MirrorConfig(SP, cfg.geom, cfg.u0, delta, 0.5)
    assert md.bounce_raman_exposure(single, p) == pytest.approx(2.0, rel=1e-14)
    # kappa = 0.15 k_L, p = 60 hbar k_L gives 100 Gamma
    assert delta / SP.gamma == pytest.approx(100.0, rel=1e-12)
    with pytest.raises(ValueError):
        md.optimal_ratio(SP, -p, cfg.kappa)


def test_entry_edge():
    cfg, _, _ = make_cfg()
    z = md.entry_edge(cfg, 1e-7)
    assert float(md.potential(cfg, z)) == pytest.approx(1e-7 * cfg.u0, rel=1e-12)


def test_closed_form_trajectory_satisfies_equation_of_motion():
    cfg, _, energy = make_cfg()
    z_of_t, v_of_t = md.closed_form_trajectory(cfg, energy)
    t = np.linspace(-3e-5, 3e-5, 41)
    dt = 1e-9
    accel = (z_of_t(t + dt) - 2 * z_of_t(t) + z_of_t(t - dt)) / dt ** 2
    force = 2 * cfg.kappa * md.potential(cfg, z_of_t(t)) / cfg.mass
    np.testing.assert_allclose(accel, force, rtol=1e-4, atol=1e-6 * force.max())
    e = 0.5 * cfg.mass * v_of_t(t) ** 2 + md.potential(cfg, z_of_t(t))
    np.testing.assert_allclose(e, energy, rtol=1e-13)


def test_quad_oracle_matches_closed_form():
    for kq, p_rec, ratio in [(0.15, 60, 2), (0.05, 20, 1.1), (0.6, 300, 8)]:
        cfg, p, energy = make_cfg(kq, p_rec, ratio)
        assert quad_potential_integral(cfg, energy) == pytest.approx(p / cfg.kappa, rel=1e-10)


def _random_config(rng):
    n = rng.uniform(1.3, 2.0)
    theta_c = math.asin(1 / n)
    geom = InterfaceGeometry(n, theta_c + rng.uniform(0.002, 0.9) * (math.pi / 2 - theta_c), 780e-9)
    height = 10 ** rng.uniform(-3.5, -1.5)
    energy = SP.mass * g * height
    cfg = md.MirrorConfig(SP, geom, energy * rng.uniform(1.05, 20), rng.uniform(20, 500) * SP.gamma,
                          rng.uniform(0.1, 1.0))
    return cfg, energy


def test_integrated_potential_integral_random_configs():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        cfg, energy = _random_config(rng)
        v_i = math.sqrt(2 * energy / cfg.mass)
        out = md.integrate_bounce(cfg, far_entry(cfg, energy))
        assert out.status == md.REFLECTED
        exact = cfg.mass * v_i / cfg.kappa
        assert quad_potential_integral(cfg, energy) == pytest.approx(exact, rel=1e-10)
        worst = max(worst, abs(out.potential_integral / exact - 1))
        assert out.final.v == pytest.approx(v_i, rel=1e-10)
    assert worst < 1e-8


def test_exposure_linear_in_velocity():
    cfg, _, energy = make_cfg()
    entry = far_entry(cfg, energy, 1e-9)
    out = md.integrate_bounce(cfg, entry, options=md.BounceOptions(record=True))
    t, z, v, x = out.path.T
    predicted = cfg.raman_rate0 / cfg.u0 * cfg.mass * (v - entry.v) / (2 * cfg.kappa)
    assert np.max(np.abs(x - predicted)) / x[-1] < 1e-6
    assert np.all(np.diff(x) >= 0)


def test_integrator_path_matches_closed_form():
    cfg, _, energy = make_cfg()
    out = md.integrate_bounce(cfg, far_entry(cfg, energy, 1e-9), options=md.BounceOptions(record=True))
    t, z, v, _ = out.path.T
    i = int(np.argmax(v > 0))
    t_turn = t[i - 1] - v[i - 1] * (t[i] - t[i - 1]) / (v[i] - v[i - 1])
    z_of_t, _ = md.closed_form_trajectory(cfg, energy)
    # align on the turning time of the sampled path, then compare shapes near the mirror
    mask = np.abs(t - t_turn) < 2e-5
    assert np.max(np.abs(z[mask] - z_of_t(t[mask] - t_turn))) < 1e-6 * md.turning_point(cfg, energy)


@pytest.mark.parametrize("target", [0.05, 0.5, 1.0, 1.7, 1.9])
def test_integrator_agrees_with_sampler(target):
    cfg, _, energy = make_cfg(0.15, 60, 2.0, delta_gamma=100.0)
    entry = KinematicState(md.entry_edge(cfg), -58.3 * hbar * K780 / SP.mass)
    out = md.integrate_bounce(cfg, entry, exposure_target=target)
    ref = md.sample_bounces(cfg, entry.z, entry.v, target)
    assert out.status == md.PUMPED == ref["status"]
    assert out.v_p == pytest.approx(float(ref["v_p"]), rel=1e-9, abs=1e-9 * abs(entry.v))
    assert out.z_p == pytest.approx(float(ref["z_p"]), rel=1e-9)
    assert out.photons_scattered == pytest.approx(float(ref["photons"]), rel=1e-9)
    assert out.raman_exposure == pytest.approx(target, rel=1e-12)


def test_sampler_reflects_beyond_full_exposure():
    cfg, _, energy = make_cfg()
    entry = KinematicState(md.entry_edge(cfg), -math.sqrt(2 * energy / cfg.mass))
    ref = md.sample_bounces(cfg, entry.z, entry.v, [2.5, 100.0])
    assert list(ref["status"]) == [md.REFLECTED, md.REFLECTED]
    assert np.all(np.isnan(ref["v_p"]))
    np.testing.assert_allclose(ref["photons"], 4.0, rtol=1e-6)
    out = md.integrate_bounce(cfg, entry, exposure_target=2.5)
    assert out.status == md.REFLECTED
    assert out.photons_scattered == pytest.approx(float(ref["photons"][0]), rel=1e-9)


def test_overrun_status():
    cfg, _, energy = make_cfg(u0_over_e=0.9)
    entry = KinematicState(md.entry_edge(cfg), -math.sqrt(2 * energy / cfg.mass))
    assert md.integrate_bounce(cfg, entry, exposure_target=0.5).status == md.OVERRUN
    assert md.sample_bounces(cfg, entry.z, entry.v, 0.5)["status"][()] == md.OVERRUN
    with pytest.raises(md.MirrorOverrun):
        md.bounce_scattered_photons(cfg, math.sqrt(2 * cfg.mass * energy))


def test_gravity_energy_conservation():
    cfg, _, energy = make_cfg()
    entry = far_entry(cfg, energy, 1e-9)
    opts = md.BounceOptions(gravity=True, record=True)
    out = md.integrate_bounce(cfg, entry, options=opts)
    t, z, v, _ = out.path.T
    e = 0.5 * cfg.mass * v ** 2 + cfg.u0 * np.exp(-2 * cfg.kappa * z) + cfg.mass * g * z
    assert np.max(np.abs(e / e[0] - 1)) < 1e-10
    # gravity slows the exit slightly relative to the gravity-free bounce
    assert out.final.v < abs(entry.v)


def test_integration_errors():
    cfg, _, energy = make_cfg()
    entry = far_entry(cfg, energy, 1e-9)
    with pytest.raises(md.IntegrationError):
        md.integrate_bounce(cfg, entry, options=md.BounceOptions(min_step=1.0))
    with pytest.raises(md.IntegrationError):
        md.integrate_bounce(cfg, entry, options=md.BounceOptions(max_steps=10))
    with pytest.raises(ValueError):
        md.integrate_bounce(cfg, KinematicState(entry.z, 1.0))


def test_pump_events_concentrate_at_turning_point():
    cfg, p, energy = make_cfg()
    tuned = md.MirrorConfig(SP, cfg.geom, cfg.u0, cfg.delta1, pump_rate0=cfg.u0 / md.optimal_ratio(SP, p, cfg.kappa))
    rng = np.random.default_rng(7)
    n = 200_000
    z_e = md.entry_edge(tuned)
    v_e = -math.sqrt(2 * (energy - float(md.potential(tuned, z_e))) / SP.mass)
    out = md.sample_bounces(tuned, z_e, np.full(n, v_e), rng.exponential(size=n))
    z_t = md.turning_point(tuned, energy)
    zp = out["z_p"][out["status"] == md.PUMPED]
    assert np.all(zp >= z_t * (1 - 1e-12))
    counts, edges = np.histogram(zp, bins=200, range=(z_t, z_t + 5 / (2 * tuned.kappa)))
    mode = int(np.argmax(counts))
    assert edges[mode] <= z_t + 1e-15 < edges[mode + 1]


def test_survival_at_optimal_ratio_integrator_subset():
    cfg, p, energy = make_cfg()
    tuned = md.MirrorConfig(SP, cfg.geom, cfg.u0, cfg.delta1, pump_rate0=cfg.u0 / md.optimal_ratio(SP, p, cfg.kappa))
    rng = np.random.default_rng(11)
    entry = far_entry(tuned, energy, 1e-9)
    n = 400
    before = 0
    for _ in range(n):
        out = md.integrate_bounce(tuned, entry, rng, md.BounceOptions(eta=0.05))
        before += out.pumped and out.v_p < 0
    p0 = 1 - math.exp(-1)
    assert abs(before / n - p0) < 4 * math.sqrt(p0 * (1 - p0) / n)


def test_profile_identities():
    cfg, _, _ = make_cfg()
    assert float(md.potential(cfg, 0.0)) == cfg.u0
    assert float(md.potential(cfg, 1 / (2 * cfg.kappa))) == pytest.approx(cfg.u0 / math.e, rel=1e-15)
    z = np.linspace(0, 1e-6, 11)
    np.testing.assert_allclose(md.scatter_rate(cfg, z) * hbar * cfg.delta1 / md.potential(cfg, z), SP.gamma,
                               rtol=1e-14)


@pytest.mark.parametrize("scale", [0.3, 1.0, 2.5])
def test_full_bounce_pump_fraction(scale):
    cfg, p, energy = make_cfg()
    ratio = scale * md.optimal_ratio(SP, p, cfg.kappa)
    tuned = md.MirrorConfig(SP, cfg.geom, cfg.u0, cfg.delta1, pump_rate0=cfg.u0 / ratio)
    n = 100_000
    z_e = md.entry_edge(tuned)
    v_e = -math.sqrt(2 * (energy - float(md.potential(tuned, z_e))) / SP.mass)
    out = md.sample_bounces(tuned, z_e, np.full(n, v_e), np.random.default_rng(int(10 * scale)).exponential(size=n))
    frac = float(np.mean(out["status"] == md.PUMPED))
    expected = 1 - math.exp(-(tuned.raman_rate0 / tuned.u0) * SP.mass * (p / SP.mass) / tuned.kappa)
    assert abs(frac - expected) < 3 * math.sqrt(expected * (1 - expected) / n)
