"""Command-line interface: ground-state, theory, simulate, ensemble, verify.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 verification
failure.  The default worker count comes from SNLS_WORKERS when set.
All machine-readable output schemas are documented in docs/SCHEMA.md.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .config import ExperimentConfig, config_hash, load_config
from .dynamics import GroundStateRefs, run_trajectory
from .ensemble import (
    EnsembleConfig,
    compare_with_theory,
    mass_drift_check,
    run_ensemble,
)
from .ground_state import GroundStateError, energy_three_ways, solve_ground_state
from .initial_data import build_initial_data
from .noise_model import make_rng, noise_constants
from .observables import classify_dichotomy
from .report import build_theory_report
from .verify import run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3


def _json_out(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_encode)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _encode(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"not JSON serializable: {type(v)}")


def _resolve_config(args) -> ExperimentConfig:
    if getattr(args, "preset", None):
        from .presets import get_preset

        return get_preset(args.preset)
    if getattr(args, "config", None):
        return load_config(args.config)
    raise ValueError("pass either --preset NAME or --config FILE")


def materialize(cfg: ExperimentConfig):
    """Build (grid, gs, sim_config, covariance, initial_data, hash) from a config."""
    grid = cfg.build_grid()
    n, sigma = int(cfg.physics["n"]), float(cfg.physics["sigma"])
    gs = solve_ground_state(n, sigma)
    sim = cfg.build_sim_config(GroundStateRefs.from_ground_state(gs))
    cov = cfg.build_covariance()
    init = cfg.build_initial_data()
    return grid, gs, sim, cov, init, config_hash(cfg)


def cmd_ground_state(args):
    gs = solve_ground_state(args.n, args.sigma,
                            tol=args.tol if args.tol > 0 else None)
    r1, r2 = gs.pokhozhaev_residuals()
    h = energy_three_ways(gs)
    doc = {
        "n": gs.n, "sigma": gs.sigma, "s_c": gs.s_c, "alpha": gs.alpha,
        "mass": gs.mass, "grad_sq": gs.grad_sq, "lp2s2": gs.lp2s2,
        "energy": gs.energy, "gn_K": gs.gn_K, "C_GN": gs.C_GN,
        "x_star": gs.x_star, "f_xstar": gs.f_xstar,
        "pokhozhaev_residuals": [r1, r2],
        "energy_three_ways": list(h),
        "tol": gs.tol,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _json_out(doc, os.path.join(args.out, "ground_state.json"))
        csv_path = os.path.join(args.out, "ground_state_profile.csv")
        with open(csv_path, "w") as fh:
            fh.write("r,Q\n")
            for r, q in zip(gs.r, gs.profile):
                fh.write(f"{r:.16g},{q:.16g}\n")
        print(f"wrote {args.out}/ground_state.json and ground_state_profile.csv")
    else:
        _json_out(doc)
    return EXIT_OK


def cmd_theory(args):
    cfg = _resolve_config(args)
    rep = build_theory_report(cfg, horizon=args.horizon)
    _json_out(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_simulate(args):
    cfg = _resolve_config(args)
    grid, gs, sim, cov, init, chash = materialize(cfg)
    rng = make_rng(args.seed, 0) if init.is_random else None
    u0 = build_initial_data(init, grid, gs, rng)
    rec = run_trajectory(sim, u0, cov, seed=(args.seed, 0))
    rec.config_hash = chash
    doc = rec.to_summary_dict()
    doc["classification"] = classify_dichotomy(u0, gs).to_dict()
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        from .ensemble import persist_records

        persist_records([rec], args.out)
        _json_out(doc, os.path.join(args.out, "summary.json"))
    _json_out(doc)
    return EXIT_OK


def cmd_ensemble(args):
    cfg = _resolve_config(args)
    grid, gs, sim, cov, init, chash = materialize(cfg)
    e = cfg.ensemble
    workers = args.workers or int(os.environ.get("SNLS_WORKERS", "1"))
    ecfg = EnsembleConfig(
        n_traj=args.n_traj or int(e.get("n_traj", 100)),
        master_seed=args.seed if args.seed is not None else int(e.get("master_seed", 0)),
        trajectory=sim, grid=grid, initial_data=init, covariance=cov,
        ground_state=gs, parallel_workers=workers, config_hash=chash,
    )
    summary, _ = run_ensemble(ecfg, out_dir=args.out,
                              compress=bool(cfg.output.get("gzip", False)))
    if args.compare:
        rep = build_theory_report(cfg, gs=gs)
        drift = []
        if sim.noise_type == "additive" and cov is not None and "mass" in summary.mean_paths:
            nc = noise_constants(cov, grid, sim.sigma)
            u0 = build_initial_data(init, grid, gs,
                                    make_rng(ecfg.master_seed, 0) if init.is_random else None)
            from .grid import mass as grid_mass

            drift.append(mass_drift_check(summary, grid_mass(u0), nc.hs00))
        summary.theory_comparison = compare_with_theory(summary, rep, drift_checks=drift)
        if any(v.get("verdict") == "violated" for v in summary.theory_comparison):
            _json_out(summary.to_dict())
            return EXIT_VERIFY
    _json_out(summary.to_dict())
    return EXIT_OK


def cmd_verify(args):
    failures = run_suite(args.suite, seed=args.seed)
    return EXIT_VERIFY if failures else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="snls",
                                description="stochastic NLS simulator and bound checker")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("ground-state", help="compute Q and its constants")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=float, required=True)
    g.add_argument("--tol", type=float, default=-1.0)
    g.add_argument("--out", default=None, help="directory for JSON + CSV output")
    g.set_defaults(fn=cmd_ground_state)

    t = sub.add_parser("theory", help="evaluate all closed-form bounds")
    t.add_argument("--preset", default=None)
    t.add_argument("--config", default=None)
    t.add_argument("--horizon", type=float, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(fn=cmd_theory)

    s = sub.add_parser("simulate", help="run one trajectory")
    s.add_argument("--preset", default=None)
    s.add_argument("--config", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_simulate)

    e = sub.add_parser("ensemble", help="run a Monte Carlo ensemble")
    e.add_argument("--preset", default=None)
    e.add_argument("--config", default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--n-traj", type=int, default=None)
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--out", default=None)
    e.add_argument("--compare", action="store_true",
                   help="attach theory-comparison verdicts")
    e.set_defaults(fn=cmd_ensemble)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=["quick", "statistical", "all"])
    v.add_argument("--seed", type=int, default=12345)
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, GroundStateError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # unexpected: runtime failure
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
