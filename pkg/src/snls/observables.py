"""Scalar functionals of the field and the deterministic dichotomy classifier."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    FieldState,
    boundary_mass_fraction,
    gradient_norm_sq,
    mass,
    weighted_variance_quadrature,
)
from .ground_state import GroundState

__all__ = ["ObservableSample", "observe", "momentum", "classify_dichotomy", "DichotomyReport"]


@dataclass(frozen=True)
class ObservableSample:
    t: float
    mass: float                     # M(u)
    energy: float                   # H(u)
    grad_sq: float                  # ||grad u||^2
    lp2s2: float                    # ||u||_{2 sigma + 2}^{2 sigma + 2}
    variance: float                 # V(u) = int |x|^2 |u|^2
    momentum: float                 # G(u) = Im int u x.grad(conj u)
    X: float                        # ||grad u|| * (mass factor)^(alpha/2)
    me_product: float               # H(u) * (frozen initial mass)^alpha
    boundary_mass_fraction: float

    def to_dict(self):
        return {
            "t": self.t, "mass": self.mass, "energy": self.energy,
            "grad_sq": self.grad_sq, "lp2s2": self.lp2s2,
            "variance": self.variance, "momentum": self.momentum,
            "X": self.X, "me_product": self.me_product,
            "boundary_mass_fraction": self.boundary_mass_fraction,
        }


def momentum(state: FieldState) -> float:
    """G(u) = Im int u (x . grad conj(u)) dx, derivatives taken spectrally."""
    g = state.grid
    uh = state.spectral
    acc = 0.0
    for axis in range(g.dim):
        shape = [1] * g.dim
        shape[axis] = g.points[axis]
        xi = g.wavenumbers[axis].reshape(shape)
        du = np.fft.ifftn(1j * xi * uh)
        acc += np.sum(g.coords[axis] * np.imag(state.values * np.conj(du)))
    return float(g.cell_volume * acc)


def observe(u: FieldState, t: float, m0: float, alpha: float, sigma: float,
            mass_factor: float | None = None) -> ObservableSample:
    """All recorded scalars at time t.

    m0 is the frozen initial mass entering me_product = H * m0^alpha.  X uses
    mass_factor (default m0); the additive intercritical trackers pass the
    lambda^2 M(Q) surrogate instead.  Pass alpha = 0 in the mass-critical case,
    which makes X the plain gradient norm.
    """
    if not np.all(np.isfinite(u.values.view(np.float64))):
        raise ValueError("non-finite field")
    g = u.grid
    h = g.cell_volume
    abs2 = np.abs(u.values) ** 2
    m = float(h * np.sum(abs2))
    p = 2.0 * sigma + 2.0
    lp2s2 = float(h * np.sum(abs2 ** (p / 2.0)))
    grad_sq = gradient_norm_sq(u)
    energy = 0.5 * grad_sq - lp2s2 / p
    if mass_factor is None:
        mass_factor = m0
    X = math.sqrt(grad_sq) * mass_factor ** (alpha / 2.0)
    return ObservableSample(
        t=float(t), mass=m, energy=energy, grad_sq=grad_sq, lp2s2=lp2s2,
        variance=weighted_variance_quadrature(u), momentum=momentum(u),
        X=X, me_product=energy * m0**alpha,
        boundary_mass_fraction=boundary_mass_fraction(u),
    )


@dataclass(frozen=True)
class DichotomyReport:
    regime: str            # global-side | blow-up-side | above-threshold | boundary
    s_c: float
    mass_ratio: float      # M(u0) / M(Q)
    beta: float | None     # H(u0) M(u0)^alpha / (H(Q) M(Q)^alpha), intercritical
    delta0: float | None   # X(0) / x*, intercritical

    def to_dict(self):
        return {
            "regime": self.regime, "s_c": self.s_c, "mass_ratio": self.mass_ratio,
            "beta": self.beta, "delta0": self.delta0,
        }


def classify_dichotomy(u0: FieldState, gs: GroundState, rel_tol: float = 1e-9) -> DichotomyReport:
    """Place u0 relative to the ground-state thresholds.

    Mass-critical (s_c = 0): compare M(u0) against M(Q).  Intercritical: use
    the scale-invariant pair (H M^alpha, ||grad u|| ||u||^alpha) against the
    values at Q.
    """
    if not 0.0 <= gs.s_c < 1.0:
        raise ValueError("classifier needs 0 <= s_c < 1")
    sample = observe(u0, 0.0, mass(u0), gs.alpha or 0.0, gs.sigma)
    m = sample.mass
    ratio = m / gs.mass
    if abs(gs.s_c) < 1e-12:
        if abs(ratio - 1.0) <= rel_tol:
            regime = "boundary"
        elif ratio < 1.0:
            regime = "global-side"
        else:
            regime = "above-threshold"
        return DichotomyReport(regime, gs.s_c, ratio, None, None)
    beta = sample.energy * m**gs.alpha / gs.me_threshold
    delta0 = sample.X / gs.x_star
    if abs(beta - 1.0) <= rel_tol and abs(delta0 - 1.0) <= rel_tol:
        regime = "boundary"
    elif beta >= 1.0:
        regime = "above-threshold"
    elif delta0 < 1.0:
        regime = "global-side"
    else:
        regime = "blow-up-side"
    return DichotomyReport(regime, gs.s_c, ratio, beta, delta0)
