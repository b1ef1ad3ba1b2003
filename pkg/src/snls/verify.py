"""Invariant suites behind the `verify` subcommand.

Each check returns (name, passed, detail).  `quick` covers the structural
identities (Pokhozhaev, Parseval, Gagliardo-Nirenberg sharpness, mass
conservation, virial rates, theory monotonicity); `statistical` adds seeded
Monte Carlo checks of the noise sampler and the drift identities.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import GroundStateRefs, SimConfig, run_trajectory, step_deterministic
from .grid import FieldState, GridSpec, apply_dealias, mass
from .ground_state import energy_three_ways, solve_ground_state
from .initial_data import ground_state_field
from .noise_model import CovarianceSpec, NoiseSampler, make_rng, noise_constants
from .observables import observe
from .theory import t_star_additive_critical, t_star_multiplicative

__all__ = ["run_suite", "SUITES"]


def _random_smooth_field(grid, rng, n_modes=6):
    vals = np.zeros(grid.shape, dtype=complex)
    for _ in range(n_modes):
        k = rng.integers(-4, 5, size=grid.dim)
        amp = rng.normal() + 1j * rng.normal()
        phase = np.zeros(grid.shape)
        for ki, x, L in zip(k, grid.coords, grid.extent):
            phase = phase + 2 * np.pi * ki / L * x
        vals += amp * np.exp(1j * phase) * np.exp(-grid.radius_sq / 8.0)
    return FieldState(grid, vals)


def check_pokhozhaev(pairs=((1, 2.0), (1, 3.0))):
    worst = 0.0
    for n, sigma in pairs:
        gs = solve_ground_state(n, sigma)
        r1, r2 = gs.pokhozhaev_residuals()
        h = energy_three_ways(gs)
        spread = max(abs(h[0] - h[1]), abs(h[0] - h[2])) / max(abs(h[0]), gs.mass)
        worst = max(worst, r1, r2, spread)
    return worst < 1e-8, f"max residual {worst:.2e}"


def check_parseval(seed=0):
    rng = make_rng(seed, 1)
    grid = GridSpec(1, 25.0, 128)
    worst = 0.0
    for _ in range(10):
        u = _random_smooth_field(grid, rng)
        m = mass(u)
        spec_m = grid.cell_volume / grid.total_points * np.sum(np.abs(u.spectral) ** 2)
        roundtrip = np.max(np.abs(np.fft.ifftn(u.spectral) - u.values))
        worst = max(worst, abs(m - spec_m) / m, roundtrip)
    return worst < 1e-12, f"max Parseval/roundtrip deviation {worst:.2e}"


def check_gn_sharpness(seed=3):
    gs = solve_ground_state(1, 2.0)
    grid = GridSpec(1, 40.0, 512, dealias_fraction=1.0)
    q = ground_state_field(gs, grid)
    s = observe(q, 0.0, mass(q), 0.0, 2.0)
    rhs = gs.C_GN * s.grad_sq ** (1.0 * 2.0 / 2.0) * s.mass ** ((2.0 + 2.0) / 2.0)
    eq_err = abs(s.lp2s2 - rhs) / rhs
    rng = make_rng(seed, 2)
    strict = True
    for _ in range(20):
        u = _random_smooth_field(grid, rng)
        su = observe(u, 0.0, mass(u), 0.0, 2.0)
        bound = gs.C_GN * su.grad_sq * su.mass**2
        strict &= su.lp2s2 < bound * (1 + 1e-12)
    return eq_err < 1e-6 and strict, f"equality error at Q {eq_err:.2e}, strict on 20 fields {strict}"


def check_dealias(seed=4):
    grid = GridSpec(1, 10.0, 512)
    rng = make_rng(seed, 3)
    u = FieldState(grid, rng.standard_normal(512) + 1j * rng.standard_normal(512))
    once = apply_dealias(u)
    twice = apply_dealias(once)
    idem = np.max(np.abs(once.values - twice.values))
    kept = int(np.sum(np.abs(once.spectral) > 1e-14))
    return idem < 1e-14 and kept == 341, f"idempotence {idem:.1e}, retained modes {kept} (expect 341)"


def check_mass_conservation(seed=5, n_steps=2000):
    gs = solve_ground_state(1, 2.0)
    grid = GridSpec(1, 40.0, 512)
    u = ground_state_field(gs, grid)
    u = u.with_values(np.sqrt(0.8) * u.values)
    spec = CovarianceSpec("fourier_diagonal", {(0,): 0.1, (1,): 0.1})
    sampler = NoiseSampler(spec, grid)
    rng = make_rng(seed, 4)
    m0 = mass(u)
    from .dynamics import step_multiplicative

    dt = 1e-4
    for _ in range(n_steps):
        u = step_deterministic(u, dt, 2.0)
        u = step_multiplicative(u, sampler.sample_real(dt, rng))
    drift = abs(mass(u) / m0 - 1.0)
    return drift < 1e-11, f"relative mass drift {drift:.2e} over {n_steps} steps"


def check_virial(seed=None):
    gs = solve_ground_state(1, 3.0)
    grid = GridSpec(1, 30.0, 512)
    q = ground_state_field(gs, grid)
    u0 = q.with_values(1.02 * q.values)
    refs = GroundStateRefs.from_ground_state(gs)
    cfg = SimConfig(n=1, sigma=3.0, noise_type="none", dt0=5e-4, T_end=0.3,
                    grad_threshold=50.0, record_stride=1, gs_refs=refs)
    rec = run_trajectory(cfg, u0, None, 0)
    arr = rec.sample_arrays()
    t, V, G = arr["t"], arr["variance"], arr["momentum"]
    H, gsq = arr["energy"], arr["grad_sq"]
    dVdt = (V[2:] - V[:-2]) / (t[2:] - t[:-2])
    err_v = np.max(np.abs(dVdt - 4 * G[1:-1])) / np.max(np.abs(4 * G[1:-1]))
    dGdt = (G[2:] - G[:-2]) / (t[2:] - t[:-2])
    rate = 2 * 1 * 3.0 * H - 2 * 3.0 * gs.s_c * gsq
    err_g = np.max(np.abs(dGdt - rate[1:-1])) / np.max(np.abs(rate))
    ok = err_v < 1e-3 and err_g < 1e-3
    return ok, f"V'=4G error {err_v:.2e}, G' rate error {err_g:.2e}"


def check_theory_monotonic(seed=6):
    rng = make_rng(seed, 5)
    viol = 0
    for _ in range(100):
        s_c = rng.uniform(0.05, 0.95)
        n = int(rng.integers(1, 4))
        beta = rng.uniform(0.05, 0.9)
        mphi = rng.uniform(0.01, 1.0)
        ratio = rng.uniform(0.5, 2.0)
        t0 = t_star_multiplicative(beta, s_c, n, mphi, ratio)
        if t_star_multiplicative(beta + 0.05, s_c, n, mphi, ratio) >= t0:
            viol += 1
        if t_star_multiplicative(beta, s_c, n, mphi * 1.1, ratio) >= t0:
            viol += 1
        b = rng.uniform(0.0, 0.9)
        _, ts = t_star_additive_critical(b, 1.0, 1.0)
        _, ts2 = t_star_additive_critical(b, 1.1, 1.0)
        if ts2 >= ts:
            viol += 1
    eps0 = t_star_additive_critical(0.0, 1.0, 1.0)[0]
    spot = abs(eps0 - (3 * math.sqrt(10) - 9))
    return viol == 0 and spot < 1e-12, f"{viol} monotonicity violations, eps*(0) error {spot:.1e}"


def check_noise_sampler(seed):
    grid = GridSpec(1, 20.0, 64)
    spec = CovarianceSpec("fourier_diagonal", {(0,): 0.2, (1,): 0.1, (3,): 0.05})
    nc = noise_constants(spec, grid, 2.0)
    sampler = NoiseSampler(spec, grid)
    rng = make_rng(seed, 6)
    n, dt = 40000, 0.02
    draws = np.array([sampler.sample_real(dt, rng) for _ in range(n)])
    var = draws.var(axis=0) / dt
    se = nc.F_phi * math.sqrt(2.0 / n)
    ok_var = np.all(np.abs(var - nc.F_phi) <= 3 * se + 1e-12)
    comp = np.array([np.sum(np.abs(sampler.sample_complex(dt, rng)) ** 2)
                     * grid.cell_volume for _ in range(n)])
    z = (comp.mean() - nc.hs00 * dt) / (comp.std(ddof=1) / math.sqrt(n))
    return bool(ok_var and abs(z) <= 3.0), f"pointwise variance ok={ok_var}, ||dW||^2 z={z:.2f}"


def check_additive_drift(seed):
    from .ensemble import EnsembleConfig, mass_drift_check, run_ensemble
    from .initial_data import InitialData

    grid = GridSpec(1, 20.0, 64)
    spec = CovarianceSpec("fourier_diagonal", {(0,): 0.1, (1,): 0.1})
    nc = noise_constants(spec, grid, 2.0)
    cfg_t = SimConfig(n=1, sigma=2.0, noise_type="additive", dt0=0.01, T_end=0.5,
                      grad_threshold=50.0, record_stride=5)
    ecfg = EnsembleConfig(n_traj=300, master_seed=seed, trajectory=cfg_t, grid=grid,
                          initial_data=InitialData("zero"), covariance=spec,
                          config_hash="verify")
    summary, _ = run_ensemble(ecfg)
    chk = mass_drift_check(summary, 0.0, nc.hs00)
    return chk["z_max"] <= 3.0, f"max |z| = {chk['z_max']:.2f} at 5 checkpoints"


def check_stratonovich_drift(seed):
    from .ensemble import EnsembleConfig, energy_drift_check, run_ensemble
    from .initial_data import InitialData

    gs = solve_ground_state(1, 2.0)
    grid = GridSpec(1, 20.0, 128)
    spec = CovarianceSpec("fourier_diagonal", {(1,): 0.3, (2,): 0.15})
    nc = noise_constants(spec, grid, 2.0)
    q = ground_state_field(gs, grid)
    u0 = q.with_values(np.sqrt(0.8) * q.values)
    h0 = observe(u0, 0.0, mass(u0), 0.0, 2.0).energy
    cfg_t = SimConfig(n=1, sigma=2.0, noise_type="multiplicative", dt0=2e-3, T_end=0.5,
                      grad_threshold=50.0, record_stride=10,
                      gs_refs=GroundStateRefs.from_ground_state(gs))
    ecfg = EnsembleConfig(n_traj=300, master_seed=seed, trajectory=cfg_t, grid=grid,
                          initial_data=InitialData("scaled_ground_state",
                                                   {"mass_fraction": 0.8}),
                          covariance=spec, ground_state=gs, config_hash="verify")
    summary, _ = run_ensemble(ecfg)
    chk = energy_drift_check(summary, h0, float(nc.f1_phi.flat[0]))
    return chk["z_max"] <= 3.0, f"max |z| = {chk['z_max']:.2f} at 3 checkpoints"


QUICK_CHECKS = [
    ("pokhozhaev", lambda seed: check_pokhozhaev()),
    ("parseval", lambda seed: check_parseval()),
    ("gn_sharpness", lambda seed: check_gn_sharpness()),
    ("dealias", lambda seed: check_dealias()),
    ("mass_conservation", lambda seed: check_mass_conservation()),
    ("virial", lambda seed: check_virial()),
    ("theory_monotonicity", lambda seed: check_theory_monotonic()),
]

STATISTICAL_CHECKS = [
    ("noise_sampler", check_noise_sampler),
    ("additive_mass_drift", check_additive_drift),
    ("multiplicative_energy_drift", check_stratonovich_drift),
]

SUITES = {
    "quick": QUICK_CHECKS,
    "statistical": STATISTICAL_CHECKS,
    "all": QUICK_CHECKS + STATISTICAL_CHECKS,
}


def run_suite(name: str, seed: int = 12345, out=print):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    failures = 0
    for check_name, fn in SUITES[name]:
        try:
            passed, detail = fn(seed)
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        failures += not passed
        out(f"[{'PASS' if passed else 'FAIL'}] {check_name}: {detail}")
    return failures
