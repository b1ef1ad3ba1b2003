"""Initial-data families used by the experiment presets.

Families: scaled ground state c*Q, boosted ground state Q e^{i x.xi0}, a
Gaussian bump, the zero field, c*Q with random c, and Q plus a small random
band-limited field.  Random families draw from the per-trajectory stream, so
ensembles stay reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import FieldState, GridSpec
from .ground_state import GroundState

__all__ = ["InitialData", "build_initial_data", "ground_state_field"]


def ground_state_field(gs: GroundState, grid: GridSpec) -> FieldState:
    """Sample Q(|x|) on the grid; the tail is extended by the e^{-r} asymptotics."""
    if grid.dim != gs.n:
        raise ValueError("grid dimension must match the ground-state dimension")
    r = np.sqrt(grid.radius_sq)
    return FieldState(grid, gs.profile_at(r))


@dataclass(frozen=True)
class InitialData:
    """Config-level descriptor of the u(0) family.

    family: one of zero | scaled_ground_state | boosted_ground_state |
    gaussian_bump | random_scaled_ground_state | ground_state_plus_field.
    params: family-specific scalars (see build_initial_data).
    """

    family: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d):
        return cls(family=d["family"], params=dict(d.get("params", {})))

    @property
    def is_random(self) -> bool:
        return self.family in ("random_scaled_ground_state", "ground_state_plus_field")


def _scaled_q(grid, gs, params):
    base = ground_state_field(gs, grid)
    if "mass_fraction" in params:
        # c chosen so M(u0) = mass_fraction * M(Q) exactly (grid masses)
        c = math.sqrt(float(params["mass_fraction"]))
    else:
        c = float(params.get("c", 1.0))
    return base.with_values(c * base.values)


def build_initial_data(desc: InitialData, grid: GridSpec, gs: GroundState | None,
                       rng: np.random.Generator | None = None) -> FieldState:
    """Materialize the described initial state on the grid."""
    fam = desc.family
    p = desc.params
    if fam == "zero":
        return FieldState(grid, np.zeros(grid.shape, dtype=complex))
    if fam == "gaussian_bump":
        amp = float(p.get("amplitude", 1.0))
        width = float(p.get("width", 1.0))
        vals = amp * np.exp(-grid.radius_sq / (2.0 * width**2))
        return FieldState(grid, vals.astype(complex))
    if gs is None:
        raise ValueError(f"family {fam!r} needs a ground state")
    if fam == "scaled_ground_state":
        return _scaled_q(grid, gs, p)
    if fam == "boosted_ground_state":
        base = _scaled_q(grid, gs, p)
        xi0 = p.get("boost", 0.0)
        xi0 = (float(xi0),) * grid.dim if np.isscalar(xi0) else tuple(float(v) for v in xi0)
        phase = np.zeros(grid.shape)
        for c, x in zip(xi0, grid.coords):
            phase = phase + c * x
        return base.with_values(base.values * np.exp(1j * phase))
    if fam == "random_scaled_ground_state":
        if rng is None:
            raise ValueError("random family needs an rng")
        c = _draw_coefficient(p.get("c_dist", {"kind": "uniform", "lo": 0.5, "hi": 0.9}), rng)
        base = ground_state_field(gs, grid)
        return base.with_values(c * base.values)
    if fam == "ground_state_plus_field":
        if rng is None:
            raise ValueError("random family needs an rng")
        base = ground_state_field(gs, grid)
        eps = float(p.get("amplitude", 0.05))
        k_max = int(p.get("k_max", 2))
        vals = np.array(base.values)
        for mode in _low_modes(grid, k_max):
            g_re, g_im = rng.standard_normal(2)
            phase = np.zeros(grid.shape)
            for m, x, L in zip(mode, grid.coords, grid.extent):
                phase = phase + 2.0 * np.pi * m / L * x
            vals = vals + eps * (g_re * np.cos(phase) + g_im * np.sin(phase))
        return base.with_values(vals)
    raise ValueError(f"unknown initial-data family {fam!r}")


def _low_modes(grid, k_max):
    modes = []
    for idx in np.ndindex(*[2 * k_max + 1] * grid.dim):
        m = tuple(i - k_max for i in idx)
        if any(c > 0 for c in m) or all(c == 0 for c in m):
            modes.append(m)
    return modes


def _draw_coefficient(dist, rng):
    kind = dist.get("kind", "uniform")
    if kind == "uniform":
        return float(rng.uniform(dist["lo"], dist["hi"]))
    if kind == "lognormal":
        return float(rng.lognormal(dist.get("mu", 0.0), dist.get("sigma", 0.1)))
    raise ValueError(f"unknown coefficient distribution {kind!r}")


def coefficient_moment(dist, q: float, n_quad: int = 400) -> float:
    """E(c^q) for the declared scalar distribution, by deterministic quadrature."""
    kind = dist.get("kind", "uniform")
    if kind == "uniform":
        lo, hi = float(dist["lo"]), float(dist["hi"])
        x = np.linspace(lo, hi, n_quad)
        return float(np.trapezoid(x**q, x) / (hi - lo))
    if kind == "lognormal":
        mu, s = float(dist.get("mu", 0.0)), float(dist.get("sigma", 0.1))
        return float(np.exp(q * mu + 0.5 * q**2 * s**2))
    raise ValueError(f"unknown coefficient distribution {kind!r}")
