"""Monte Carlo harness over independent trajectories.

Per-trajectory randomness comes from a counter-based stream keyed by
(master_seed, index), so the summary is bitwise independent of the worker
count and schedule: workers may finish in any order, but aggregation always
walks the records in index order.
"""

from __future__ import annotations

import gzip
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SimConfig, TrajectoryRecord, run_trajectory
from .grid import GridSpec
from .ground_state import GroundState
from .initial_data import InitialData, build_initial_data
from .noise_model import CovarianceSpec, make_rng

__all__ = [
    "EnsembleConfig",
    "EnsembleSummary",
    "run_ensemble",
    "estimate_survival",
    "wilson_interval",
    "hitting_time_stats",
    "compare_with_theory",
    "mass_drift_check",
    "energy_drift_check",
    "persist_records",
]

Z95 = 1.959963984540054


@dataclass(frozen=True)
class EnsembleConfig:
    n_traj: int
    master_seed: int
    trajectory: SimConfig
    grid: GridSpec
    initial_data: InitialData
    covariance: CovarianceSpec | None = None
    ground_state: GroundState | None = None
    parallel_workers: int = 1
    config_hash: str | None = None

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if self.parallel_workers < 1:
            raise ValueError("parallel_workers must be >= 1")


def wilson_interval(successes: int, n: int, z: float = Z95):
    """Wilson 95% score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = successes / n
    denom = 1.0 + z**2 / n
    center = (p + z**2 / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2))
    return max(0.0, center - half), min(1.0, center + half)


def estimate_survival(records, T: float):
    """(p_hat, (lo, hi)) for P(trajectory alive beyond T)."""
    if not records:
        raise ValueError("no records")
    n = len(records)
    k = 0
    for r in records:
        st = r.status
        alive = st.kind == "survived" or (st.kind in ("blownup", "failed") and st.time > T)
        k += bool(alive)
    return k / n, wilson_interval(k, n)


def hitting_time_stats(records, name: str, T_end: float):
    """Censored statistics of one stopping time across the ensemble."""
    hits = [r.hit_times.get(name) for r in records]
    censored = sum(h is None for h in hits)
    vals = np.array([T_end if h is None else min(h, T_end) for h in hits], dtype=float)
    return {
        "name": name,
        "censored_count": int(censored),
        "n": len(hits),
        "mean_censored": float(vals.mean()),
        "second_moment_censored": float(np.mean(vals**2)),
    }


@dataclass
class EnsembleSummary:
    n_traj: int
    master_seed: int
    survival_prob: float
    survival_interval: tuple
    survival_horizon: float
    blowup_fraction: float
    blowup_interval: tuple
    failed_count: int
    usable: bool
    hitting_times: dict
    mean_paths: dict          # observable -> {"t", "mean", "se", "n_alive"}
    theory_comparison: list = field(default_factory=list)
    config_hash: str | None = None

    def to_dict(self):
        return {
            "n_traj": self.n_traj,
            "master_seed": self.master_seed,
            "survival_prob": self.survival_prob,
            "survival_interval": list(self.survival_interval),
            "survival_horizon": self.survival_horizon,
            "blowup_fraction": self.blowup_fraction,
            "blowup_interval": list(self.blowup_interval),
            "failed_count": self.failed_count,
            "usable": self.usable,
            "hitting_times": self.hitting_times,
            "mean_paths": {k: {kk: (vv.tolist() if isinstance(vv, np.ndarray) else vv)
                               for kk, vv in v.items()}
                           for k, v in self.mean_paths.items()},
            "theory_comparison": self.theory_comparison,
            "config_hash": self.config_hash,
        }


def _run_one(cfg: EnsembleConfig, index: int) -> TrajectoryRecord:
    rng = make_rng(cfg.master_seed, index) if cfg.initial_data.is_random else None
    u0 = build_initial_data(cfg.initial_data, cfg.grid, cfg.ground_state, rng)
    rec = run_trajectory(cfg.trajectory, u0, cfg.covariance,
                         seed=(cfg.master_seed, index))
    rec.config_hash = cfg.config_hash
    return rec


def _mean_paths(records):
    done = [r for r in records if r.samples]
    if not done:
        return {}
    n_common = min(len(r.samples) for r in done)
    t = np.array([s.t for s in done[0].samples[:n_common]])
    out = {}
    keys = [k for k in done[0].samples[0].to_dict() if k != "t"]
    for key in keys:
        stack = np.array([[s.to_dict()[key] for s in r.samples[:n_common]] for r in done])
        mean = stack.mean(axis=0)
        se = (stack.std(axis=0, ddof=1) / math.sqrt(len(done))
              if len(done) > 1 else np.zeros(n_common))
        out[key] = {"t": t, "mean": mean, "se": se, "n_alive": len(done)}
    return out


def persist_records(records, out_dir: str, compress: bool = False):
    """One JSON-lines file per trajectory (samples), plus a terminal summary line."""
    os.makedirs(out_dir, exist_ok=True)
    for i, rec in enumerate(records):
        path = os.path.join(out_dir, f"traj_{i:05d}.jsonl" + (".gz" if compress else ""))
        opener = gzip.open if compress else open
        with opener(path, "wt") as fh:
            for s in rec.samples:
                fh.write(json.dumps(s.to_dict()) + "\n")
            fh.write(json.dumps({"terminal": rec.to_summary_dict()}) + "\n")


def run_ensemble(cfg: EnsembleConfig, out_dir: str | None = None,
                 compress: bool = False) -> tuple:
    """Run all trajectories; returns (summary, records)."""
    indices = list(range(cfg.n_traj))
    if cfg.parallel_workers > 1 and cfg.n_traj > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel_workers) as pool:
            records = list(pool.map(_run_one, [cfg] * cfg.n_traj, indices,
                                    chunksize=max(1, cfg.n_traj // (4 * cfg.parallel_workers))))
    else:
        records = [_run_one(cfg, i) for i in indices]

    T = cfg.trajectory.T_end
    p_surv, ci_surv = estimate_survival(records, T * (1 - 1e-12))
    k_blow = sum(r.status.kind == "blownup" for r in records)
    failed = sum(r.status.kind == "failed" for r in records)
    p_blow = k_blow / cfg.n_traj
    ci_blow = wilson_interval(k_blow, cfg.n_traj)
    from .dynamics import STOPPING_TIME_NAMES

    hstats = {name: hitting_time_stats(records, name, T) for name in STOPPING_TIME_NAMES}
    summary = EnsembleSummary(
        n_traj=cfg.n_traj, master_seed=cfg.master_seed,
        survival_prob=p_surv, survival_interval=ci_surv, survival_horizon=T,
        blowup_fraction=p_blow, blowup_interval=ci_blow,
        failed_count=failed, usable=failed <= 0.2 * cfg.n_traj,
        hitting_times=hstats, mean_paths=_mean_paths(records),
        config_hash=cfg.config_hash,
    )
    if out_dir is not None:
        persist_records(records, out_dir, compress)
    return summary, records


def _verdict_positive_probability(name, frac, interval, bound):
    if frac > 0.0:
        return {"bound": name, "theoretical": bound, "empirical": frac,
                "verdict": "consistent"}
    return {"bound": name, "theoretical": bound, "empirical": frac,
            "verdict": "inconclusive",
            "note": "positive probability may be below the resolution of this sample"}


def compare_with_theory(summary: EnsembleSummary, report, T: float | None = None,
                        drift_checks: list | None = None) -> list:
    """One-sided consistency verdicts between an ensemble and a TheoryReport.

    A check may only return 'violated' when the empirical confidence interval
    excludes the theoretical bound entirely on its forbidden side; positive
    probability claims can never be violated, only 'inconclusive'.
    """
    if summary.config_hash != report.config_hash:
        raise ValueError("configuration hash mismatch between summary and report")
    verdicts = []
    if T is None:
        T = summary.survival_horizon

    t_star = report.T_star_mult if report.T_star_mult is not None else report.T_star_add_crit
    if t_star is not None and T < t_star:
        verdicts.append(_verdict_positive_probability(
            "survival P(tau* > T) > 0 for T < T*", summary.survival_prob,
            summary.survival_interval, t_star))

    if t_star is not None and math.isfinite(t_star):
        hs = summary.hitting_times.get("tau_delta_energy") or \
             summary.hitting_times.get("tau_delta_mass")
        if hs is not None:
            mean_c = hs["mean_censored"]
            n = hs["n"]
            if hs["censored_count"] == 0 and n > 1:
                se = math.sqrt(max(hs["second_moment_censored"] - mean_c**2, 0.0) / n)
                if mean_c + 3.0 * se < t_star:
                    v = "violated"
                else:
                    v = "consistent" if mean_c >= t_star else "inconclusive"
            else:
                v = "consistent" if mean_c >= t_star else "inconclusive"
            verdicts.append({"bound": "E(tau_delta) >= T* (censored)",
                             "theoretical": t_star, "empirical": mean_c,
                             "censored_count": hs["censored_count"], "verdict": v})

    ledger = report.blowup_multiplicative or report.blowup_additive
    if ledger is not None:
        if ledger.satisfied:
            verdicts.append(_verdict_positive_probability(
                "blow-up P(tau* <= T) > 0 under satisfied sufficient conditions",
                summary.blowup_fraction, summary.blowup_interval, 0.0))
        else:
            verdicts.append({"bound": "blow-up sufficient conditions",
                             "theoretical": None, "empirical": summary.blowup_fraction,
                             "verdict": "inconclusive",
                             "note": "sufficient-condition ledger not satisfied"})

    for chk in drift_checks or []:
        z = abs(chk["z_max"])
        verdicts.append({"bound": chk["name"], "theoretical": chk.get("theoretical"),
                         "empirical": chk.get("empirical"), "z_max": chk["z_max"],
                         "verdict": "consistent" if z <= 3.0 else "violated"})
    return verdicts


def mass_drift_check(summary: EnsembleSummary, m0: float, hs00: float,
                     checkpoints: int = 5) -> dict:
    """z statistics of mean M(t) against the additive drift law M(u0) + t hs00."""
    paths = summary.mean_paths["mass"]
    t, mean, se = paths["t"], paths["mean"], paths["se"]
    idx = np.unique(np.linspace(1, len(t) - 1, checkpoints).astype(int))
    zs = []
    for i in idx:
        predicted = m0 + t[i] * hs00
        denom = se[i] if se[i] > 0 else 1e-300
        zs.append((mean[i] - predicted) / denom)
    z_max = float(np.max(np.abs(zs)))
    return {"name": "additive mass drift E M(t) = M(u0) + t hs00",
            "z_scores": [float(z) for z in zs], "z_max": z_max,
            "theoretical": float(m0 + t[idx[-1]] * hs00),
            "empirical": float(mean[idx[-1]]),
            "times": [float(t[i]) for i in idx]}


def energy_drift_check(summary: EnsembleSummary, h0: float, f1_const: float,
                       checkpoints: int = 3) -> dict:
    """z statistics of mean H(t) against H(u0) + (1/2) int E int |u|^2 f1_phi.

    For spectrally diagonal covariances f1_phi is spatially constant, so the
    correction integrand is f1_const * M(s) with M recorded along the path;
    the time integral is taken by the trapezoid rule on the recorded grid.
    """
    t = summary.mean_paths["energy"]["t"]
    mean_h = summary.mean_paths["energy"]["mean"]
    se_h = summary.mean_paths["energy"]["se"]
    mean_m = summary.mean_paths["mass"]["mean"]
    corr = np.concatenate(([0.0], np.cumsum(
        0.5 * (mean_m[1:] + mean_m[:-1]) * np.diff(t)))) * 0.5 * f1_const
    idx = np.unique(np.linspace(1, len(t) - 1, checkpoints).astype(int))
    zs = []
    for i in idx:
        predicted = h0 + corr[i]
        denom = se_h[i] if se_h[i] > 0 else 1e-300
        zs.append((mean_h[i] - predicted) / denom)
    z_max = float(np.max(np.abs(zs)))
    return {"name": "multiplicative energy drift E H(t) = H(u0) + (1/2) int E|u|^2 f1",
            "z_scores": [float(z) for z in zs], "z_max": z_max,
            "theoretical": float(h0 + corr[idx[-1]]),
            "empirical": float(mean_h[idx[-1]]),
            "times": [float(t[i]) for i in idx]}
