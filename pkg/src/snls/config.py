"""Experiment configuration: one JSON document describing a whole run.

The file round-trips losslessly (parse -> serialize -> parse is the identity
on the canonical form) and its SHA-256 hash is embedded in every output the
run produces.  All numbers are nondimensional, matching the equations.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import AdaptSpec, GroundStateRefs, SimConfig, StoppingThresholds
from .grid import GridSpec
from .initial_data import InitialData
from .noise_model import CovarianceSpec, gaussian_spectrum_amplitudes

__all__ = ["ExperimentConfig", "config_hash", "load_config", "dump_config"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    grid: dict          # {dim, extent, points, dealias_fraction}
    physics: dict       # {n, sigma, noise_type}
    covariance: dict    # {kind, amplitudes | kernel profile, scale, ...}
    initial_data: dict  # {family, params}
    run: dict           # {dt, T_end, grad_threshold, record_stride, adapt, thresholds, ...}
    ensemble: dict = field(default_factory=dict)  # {n_traj, master_seed, workers}
    output: dict = field(default_factory=dict)    # {out_dir, gzip}
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "grid": self.grid,
            "physics": self.physics,
            "covariance": self.covariance,
            "initial_data": self.initial_data,
            "run": self.run,
            "ensemble": self.ensemble,
            "output": self.output,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"schema_version", "name", "grid", "physics", "covariance",
                 "initial_data", "run", "ensemble", "output"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config sections: {sorted(extra)}")
        cfg = cls(
            name=d.get("name", "unnamed"),
            grid=dict(d["grid"]),
            physics=dict(d["physics"]),
            covariance=dict(d.get("covariance", {"kind": "none"})),
            initial_data=dict(d["initial_data"]),
            run=dict(d["run"]),
            ensemble=dict(d.get("ensemble", {})),
            output=dict(d.get("output", {})),
            schema_version=int(d.get("schema_version", SCHEMA_VERSION)),
        )
        cfg.build_sim_config()  # validate cross-field constraints at load time
        return cfg

    # --- builders -------------------------------------------------------

    def build_grid(self) -> GridSpec:
        g = self.grid
        return GridSpec(
            dim=int(g["dim"]),
            extent=g["extent"],
            points=g["points"],
            dealias_fraction=float(g.get("dealias_fraction", 2.0 / 3.0)),
        )

    def build_covariance(self) -> CovarianceSpec | None:
        c = self.covariance
        kind = c.get("kind", "none")
        if kind in ("none", None) or self.physics.get("noise_type", "none") == "none":
            return None
        scale = float(c.get("scale", 1.0))
        if kind == "fourier_diagonal":
            amps = {_parse_mode(k): float(v) for k, v in c["amplitudes"].items()}
            return CovarianceSpec("fourier_diagonal", amps, scale=scale)
        if kind == "gaussian_spectrum":
            grid = self.build_grid()
            amps = gaussian_spectrum_amplitudes(
                grid, float(c["strength"]), float(c["width"]), int(c["k_max"]))
            return CovarianceSpec("fourier_diagonal", amps, scale=scale)
        if kind == "physical_kernel":
            grid = self.build_grid()
            kern = _build_kernel(grid, c)
            return CovarianceSpec("physical_kernel", kernel=kern, scale=scale)
        raise ValueError(f"unknown covariance kind {kind!r}")

    def build_thresholds(self) -> StoppingThresholds:
        th = self.run.get("thresholds", {})
        return StoppingThresholds(
            delta_energy=th.get("delta_energy"),
            delta_mass=th.get("delta_mass"),
            delta_gradient=th.get("delta_gradient"),
            gamma=th.get("gamma"),
            A_energy=th.get("A_energy"),
            lam=th.get("lam"),
        )

    def build_sim_config(self, gs_refs: GroundStateRefs | None = None) -> SimConfig:
        r = self.run
        adapt = None
        a = r.get("adapt")
        if a and a.get("enabled", True):
            adapt = AdaptSpec(growth_factor=float(a.get("growth_factor", 2.0)),
                              dt_min=float(a.get("dt_min", 1e-6)))
        return SimConfig(
            n=int(self.physics["n"]),
            sigma=float(self.physics["sigma"]),
            noise_type=self.physics.get("noise_type", "none"),
            dt0=float(r["dt"]),
            T_end=float(r["T_end"]),
            grad_threshold=float(r.get("grad_threshold", 1e3)),
            record_stride=int(r.get("record_stride", 1)),
            adapt=adapt,
            thresholds=self.build_thresholds(),
            gs_refs=gs_refs,
            tail_fraction_max=float(r.get("tail_fraction_max", 0.10)),
            allow_conditional_regime=bool(r.get("allow_conditional_regime", False)),
            disable_nonlinearity=bool(r.get("disable_nonlinearity", False)),
        )

    def build_initial_data(self) -> InitialData:
        return InitialData.from_dict(self.initial_data)


def _parse_mode(key: str):
    if isinstance(key, (int, np.integer)):
        return (int(key),)
    parts = str(key).replace("(", "").replace(")", "").split(",")
    return tuple(int(p) for p in parts if p.strip() != "")


def _build_kernel(grid: GridSpec, c: dict) -> np.ndarray:
    prof = c.get("profile", "gaussian")
    if prof != "gaussian":
        raise ValueError(f"unknown kernel profile {prof!r}")
    width = float(c["width"])
    amp = float(c.get("amplitude", 1.0))
    return amp * np.exp(-grid.radius_sq / (2.0 * width**2))


def config_hash(cfg: ExperimentConfig) -> str:
    canon = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def dump_config(cfg: ExperimentConfig, path: str):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
