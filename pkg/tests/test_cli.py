import json

import pytest

from snls.cli import main
from snls.config import ExperimentConfig, config_hash, dump_config, load_config
from snls.presets import PRESETS, get_preset, preset_names


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ground_state_cli_critical(capsys):
    code, out, _ = run_cli(capsys, "ground-state", "--n", "1", "--sigma", "2")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["energy"]) <= 1e-10  # H(Q) = 0 at s_c = 0
    assert doc["gn_K"] == pytest.approx(3.0)  # K = sigma + 1 in the critical case


def test_ground_state_cli_radial_residuals(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "ground-state", "--n", "3", "--sigma", "1",
                           "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "ground_state.json").read_text())
    assert max(doc["pokhozhaev_residuals"]) <= 1e-6
    csv = (tmp_path / "ground_state_profile.csv").read_text().splitlines()
    assert csv[0] == "r,Q"
    assert len(csv) > 1000


def test_ground_state_cli_rejects_supercritical(capsys):
    code, _, err = run_cli(capsys, "ground-state", "--n", "3", "--sigma", "2")
    assert code == 1
    assert "energy-supercritical" in err


def test_theory_cli_preset(capsys):
    code, out, _ = run_cli(capsys, "theory", "--preset", "mult-intercritical-3d-cubic")
    assert code == 0
    doc = json.loads(out)
    assert doc["T_star_mult"] is not None and doc["T_star_mult"] > 0
    assert doc["config_hash"] == config_hash(get_preset("mult-intercritical-3d-cubic"))


def test_theory_cli_above_threshold(capsys, tmp_path):
    cfg = get_preset("det-critical-above").to_dict()
    cfg["physics"]["noise_type"] = "additive"
    cfg["covariance"] = {"kind": "fourier_diagonal", "amplitudes": {"0": 0.1}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run_cli(capsys, "theory", "--config", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["regime"] == "above-threshold"
    assert doc["T_star_add_crit"] is None  # omitted above the threshold


def test_theory_cli_additive_above_threshold_field(capsys, tmp_path):
    # beta^2 + gamma >= 1 must be reported, not crash: u0 = Q has beta = gamma = 1
    cfg = {
        "name": "above",
        "grid": {"dim": 1, "extent": 30.0, "points": 128},
        "physics": {"n": 1, "sigma": 3.0, "noise_type": "additive"},
        "covariance": {"kind": "fourier_diagonal", "amplitudes": {"0": 0.01}},
        "initial_data": {"family": "scaled_ground_state", "params": {"c": 1.0}},
        "run": {"dt": 1e-3, "T_end": 0.5, "grad_threshold": 20.0},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run_cli(capsys, "theory", "--config", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["T_tilde_add_inter"] is None
    assert any("above additive threshold" in n for n in doc["notes"])


def test_theory_random_initial_data_moment_bound(capsys, tmp_path):
    # uniform c in (0, 1): the random-data horizon uses E(M(u0)^(1/s_c))
    cfg = {
        "name": "rand",
        "grid": {"dim": 1, "extent": 20.0, "points": 256},
        "physics": {"n": 1, "sigma": 3.0, "noise_type": "multiplicative"},
        "covariance": {"kind": "fourier_diagonal", "amplitudes": {"1": 0.3}},
        "initial_data": {"family": "random_scaled_ground_state",
                         "params": {"c_dist": {"kind": "uniform", "lo": 0.5, "hi": 0.8}}},
        "run": {"dt": 5e-4, "T_end": 1.0, "grad_threshold": 20.0},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run_cli(capsys, "theory", "--config", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["T_star_mult_random"] is not None
    assert doc["T_star_mult_random"] > 0
    # the deterministic horizon at the envelope c is smaller than the
    # moment-averaged one (E(M^(1/s_c)) < M(c_hi Q)^(1/s_c))
    assert doc["T_star_mult_random"] > doc["T_star_mult"]


def test_statistical_check_deterministic_given_seed():
    from snls.verify import check_noise_sampler

    assert check_noise_sampler(777) == check_noise_sampler(777)


def test_theory_additive_blowup_ledger(capsys, tmp_path):
    # c = 1.05 sits on the blow-up side; with tiny additive noise the
    # sufficient-condition ledger must be emitted and satisfied
    cfg = {
        "name": "add-blowup",
        "grid": {"dim": 1, "extent": 20.0, "points": 512},
        "physics": {"n": 1, "sigma": 3.0, "noise_type": "additive"},
        "covariance": {"kind": "fourier_diagonal", "amplitudes": {"1": 1e-6}},
        "initial_data": {"family": "scaled_ground_state", "params": {"c": 1.05}},
        "run": {"dt": 1e-4, "T_end": 2.0, "grad_threshold": 25.0},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run_cli(capsys, "theory", "--config", str(path))
    assert code == 0
    doc = json.loads(out)
    led = doc["blowup_additive"]
    assert led is not None
    names = {c["name"] for c in led["checks"]}
    assert names == {"cond_1_add", "cond_2_add", "cond_3_add", "cond_4_add",
                     "cond_3_add_variance"}
    assert led["satisfied"] is True


def test_simulate_cli_survival(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "simulate", "--preset", "det-critical-below",
                           "--out", str(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["status"]["kind"] == "survived"
    assert doc["classification"]["regime"] == "global-side"
    assert (tmp_path / "traj_00000.jsonl").exists()
    assert doc["config_hash"] == config_hash(get_preset("det-critical-below"))


def test_ensemble_cli_smoke(capsys):
    code, out, _ = run_cli(capsys, "ensemble", "--preset", "add-mass-drift",
                           "--n-traj", "40", "--workers", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["n_traj"] == 40
    assert doc["survival_prob"] == 1.0
    assert doc["usable"] is True


def test_verify_cli_quick(capsys):
    code, out, _ = run_cli(capsys, "verify", "quick")
    assert code == 0
    assert out.count("[PASS]") >= 7
    assert "[FAIL]" not in out


def test_cli_validation_exit_code(capsys):
    code, _, err = run_cli(capsys, "theory", "--preset", "no-such-preset")
    assert code == 1
    assert "unknown preset" in err


def test_config_roundtrip_all_presets(tmp_path):
    for name in preset_names():
        cfg = get_preset(name)
        p = tmp_path / f"{name}.json"
        dump_config(cfg, str(p))
        back = load_config(str(p))
        assert back.to_dict() == cfg.to_dict()  # lossless round trip
        assert config_hash(back) == config_hash(cfg)


def test_config_rejects_unknown_sections():
    with pytest.raises(ValueError, match="unknown config sections"):
        ExperimentConfig.from_dict({
            "name": "x",
            "grid": {"dim": 1, "extent": 10.0, "points": 64},
            "physics": {"n": 1, "sigma": 2.0, "noise_type": "none"},
            "initial_data": {"family": "zero"},
            "run": {"dt": 0.01, "T_end": 1.0},
            "bogus": {},
        })


def test_config_cross_field_validation():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({
            "name": "x",
            "grid": {"dim": 1, "extent": 10.0, "points": 64},
            "physics": {"n": 1, "sigma": 2.0, "noise_type": "none"},
            "initial_data": {"family": "zero"},
            "run": {"dt": 5.0, "T_end": 1.0},  # dt >= T_end
        })


def test_preset_hashes_are_distinct():
    hashes = {config_hash(get_preset(n)) for n in preset_names()}
    assert len(hashes) == len(PRESETS)


def test_verify_detects_fault_injection(monkeypatch, capsys):
    # corrupt the ground-state solver output: the Pokhozhaev check must fail
    import snls.verify as verify_mod

    real = verify_mod.solve_ground_state

    def corrupted(n, sigma, tol=None):
        gs = real(n, sigma, tol)
        object.__setattr__(gs, "grad_sq", gs.grad_sq * 1.001)
        return gs

    monkeypatch.setattr(verify_mod, "solve_ground_state", corrupted)
    failures = verify_mod.run_suite("quick", out=lambda s: None)
    assert failures >= 1
