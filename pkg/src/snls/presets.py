"""Named experiment presets, one per regime exercised by the verification lab.

Noise strengths are chosen so that the closed-form horizons T*, T~ comfortably
exceed the simulated window in the survival presets, and small enough in the
blow-up presets that the deterministic core still collapses.
"""

from __future__ import annotations

from .config import ExperimentConfig

__all__ = ["PRESETS", "get_preset", "preset_names"]


def _cfg(name, **kw):
    return ExperimentConfig.from_dict({"name": name, **kw})


def _build_presets():
    p = {}

    # Deterministic mass-critical dichotomy, below threshold: global existence.
    p["det-critical-below"] = _cfg(
        "det-critical-below",
        grid={"dim": 1, "extent": 40.0, "points": 256, "dealias_fraction": 1.0},
        physics={"n": 1, "sigma": 2.0, "noise_type": "none"},
        covariance={"kind": "none"},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.8}},
        run={"dt": 1e-3, "T_end": 10.0, "grad_threshold": 10.0, "record_stride": 100},
    )

    # Deterministic mass-critical, above threshold: 1.1 Q has negative energy
    # and collapses; detection threshold sized to the grid resolution.
    p["det-critical-above"] = _cfg(
        "det-critical-above",
        grid={"dim": 1, "extent": 30.0, "points": 1024},
        physics={"n": 1, "sigma": 2.0, "noise_type": "none"},
        covariance={"kind": "none"},
        initial_data={"family": "scaled_ground_state", "params": {"c": 1.1}},
        run={"dt": 2e-4, "T_end": 2.0, "grad_threshold": 20.0, "record_stride": 1},
    )

    # Long multiplicative runs for the mass-conservation check (1e5 steps).
    for tag, sigma in (("", 2.0), ("-s3", 3.0)):
        p[f"mult-mass-check{tag}"] = _cfg(
            f"mult-mass-check{tag}",
            grid={"dim": 1, "extent": 40.0, "points": 512},
            physics={"n": 1, "sigma": sigma, "noise_type": "multiplicative"},
            covariance={"kind": "fourier_diagonal", "scale": 1.0,
                        "amplitudes": {"0": 0.1, "1": 0.1}},
            initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.8}},
            run={"dt": 1e-5, "T_end": 1.0, "grad_threshold": 50.0, "record_stride": 1000},
            ensemble={"n_traj": 1, "master_seed": 2024},
        )

    # Additive mass drift: u0 = 0, E M(t) = t ||phi||_00^2.
    p["add-mass-drift"] = _cfg(
        "add-mass-drift",
        grid={"dim": 1, "extent": 20.0, "points": 64},
        physics={"n": 1, "sigma": 2.0, "noise_type": "additive"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"0": 0.1, "1": 0.1, "2": 0.05}},
        initial_data={"family": "zero"},
        run={"dt": 0.01, "T_end": 0.5, "grad_threshold": 50.0, "record_stride": 5},
        ensemble={"n_traj": 1000, "master_seed": 7001},
    )

    # Multiplicative energy drift: E H(t) - H(0) = (1/2) int E int |u|^2 f1_phi.
    p["mult-energy-drift"] = _cfg(
        "mult-energy-drift",
        grid={"dim": 1, "extent": 20.0, "points": 128},
        physics={"n": 1, "sigma": 2.0, "noise_type": "multiplicative"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"1": 0.3, "2": 0.15}},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.8}},
        run={"dt": 2e-3, "T_end": 0.5, "grad_threshold": 50.0, "record_stride": 10},
        ensemble={"n_traj": 1000, "master_seed": 7002},
    )

    # Multiplicative mass-critical survival: mass below M(Q) is conserved a.s.,
    # so the run is global regardless of the horizon.
    p["mult-critical-survival"] = _cfg(
        "mult-critical-survival",
        grid={"dim": 1, "extent": 30.0, "points": 128},
        physics={"n": 1, "sigma": 2.0, "noise_type": "multiplicative"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"1": 0.2}},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.8}},
        run={"dt": 5e-3, "T_end": 5.0, "grad_threshold": 20.0, "record_stride": 50},
        ensemble={"n_traj": 200, "master_seed": 7007},
    )

    # Multiplicative intercritical survival below the horizon T*.
    p["mult-inter-survival"] = _cfg(
        "mult-inter-survival",
        grid={"dim": 1, "extent": 20.0, "points": 256},
        physics={"n": 1, "sigma": 3.0, "noise_type": "multiplicative"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"1": 0.3}},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.64}},
        run={"dt": 5e-4, "T_end": 1.0, "grad_threshold": 20.0, "record_stride": 10,
             "thresholds": {"delta_energy": 0.99, "gamma": 0.9}},
        ensemble={"n_traj": 200, "master_seed": 7003},
    )

    # Multiplicative intercritical blow-up with positive energy:
    # beta < 1 < delta_0 (c = 1.05 gives beta ~ 0.57, delta_0 ~ 1.34); M_phi is
    # small enough that the sufficient-condition ledger passes at t = T_end.
    p["blowup-mult"] = _cfg(
        "blowup-mult",
        grid={"dim": 1, "extent": 20.0, "points": 1024},
        physics={"n": 1, "sigma": 3.0, "noise_type": "multiplicative"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"1": 4e-4}},
        initial_data={"family": "scaled_ground_state", "params": {"c": 1.05}},
        run={"dt": 1e-4, "T_end": 2.0, "grad_threshold": 25.0, "record_stride": 1,
             "thresholds": {"delta_gradient": 1.1, "gamma": 0.9}},
        ensemble={"n_traj": 100, "master_seed": 7004},
    )

    # Additive mass-critical survival below T*(beta).
    p["add-critical"] = _cfg(
        "add-critical",
        grid={"dim": 1, "extent": 20.0, "points": 128},
        physics={"n": 1, "sigma": 2.0, "noise_type": "additive"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"0": 0.07, "1": 0.05}},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.64}},
        run={"dt": 1e-3, "T_end": 0.5, "grad_threshold": 20.0, "record_stride": 10,
             "thresholds": {"delta_mass": 0.9, "lam": 0.95}},
        ensemble={"n_traj": 200, "master_seed": 7005},
    )

    # Additive intercritical: broad low bump keeps beta^2 + gamma < 1, and the
    # noise is small enough that T~ exceeds the simulated window.
    p["add-inter"] = _cfg(
        "add-inter",
        grid={"dim": 1, "extent": 30.0, "points": 128},
        physics={"n": 1, "sigma": 3.0, "noise_type": "additive"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"0": 0.005, "1": 0.005}},
        initial_data={"family": "gaussian_bump", "params": {"amplitude": 0.3, "width": 3.0}},
        run={"dt": 1e-3, "T_end": 0.5, "grad_threshold": 20.0, "record_stride": 10,
             "thresholds": {"A_energy": 0.9, "lam": 0.95}},
        ensemble={"n_traj": 200, "master_seed": 7006},
    )

    # Theory-only preset: 3d cubic multiplicative intercritical bounds.
    p["mult-intercritical-3d-cubic"] = _cfg(
        "mult-intercritical-3d-cubic",
        grid={"dim": 3, "extent": 20.0, "points": 16},
        physics={"n": 3, "sigma": 1.0, "noise_type": "multiplicative"},
        covariance={"kind": "fourier_diagonal", "scale": 1.0,
                    "amplitudes": {"1,0,0": 0.1, "0,1,0": 0.1, "0,0,1": 0.1}},
        initial_data={"family": "scaled_ground_state", "params": {"mass_fraction": 0.64}},
        run={"dt": 1e-3, "T_end": 1.0, "grad_threshold": 100.0},
    )
    return p


PRESETS = _build_presets()


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")


def preset_names():
    return sorted(PRESETS)
