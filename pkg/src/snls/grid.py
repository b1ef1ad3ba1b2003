"""Periodic grids in 1 to 3 dimensions with an FFT contract.

The domain is the centered torus [-L/2, L/2)^dim sampled on N uniform points
per axis.  All quadratures are plain Riemann sums, which are spectrally
accurate for smooth periodic data.  Spectral coefficients use the unnormalized
numpy FFT; Parseval then reads  h^dim * sum|u|^2 == (h^dim / Ntot) * sum|uhat|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "FieldState",
    "quadrature_lp",
    "mass",
    "gradient_norm_sq",
    "weighted_variance_quadrature",
    "apply_dealias",
    "boundary_mass_fraction",
    "spectral_tail_fraction",
]


def _as_tuple(value, dim, caster):
    if np.isscalar(value):
        return tuple(caster(value) for _ in range(dim))
    out = tuple(caster(v) for v in value)
    if len(out) != dim:
        raise ValueError(f"expected {dim} per-axis values, got {len(out)}")
    return out


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L/2, L/2)^dim.

    extent and points may be scalars (same on every axis) or per-axis tuples.
    N must be even and at least 8 on each axis.  dealias_fraction is the kept
    fraction of the Nyquist wavenumber; 2/3 is the usual rule for quadratic
    nonlinearities and is a heuristic accuracy knob for fractional powers.
    """

    dim: int
    extent: tuple
    points: tuple
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        object.__setattr__(self, "extent", _as_tuple(self.extent, self.dim, float))
        object.__setattr__(self, "points", _as_tuple(self.points, self.dim, int))
        for L in self.extent:
            if L <= 0:
                raise ValueError("extent must be positive")
        for N in self.points:
            if N < 8 or N % 2 != 0:
                raise ValueError("points must be even and >= 8 per axis")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must lie in (0, 1]")

    @cached_property
    def spacing(self):
        return tuple(L / N for L, N in zip(self.extent, self.points))

    @cached_property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def total_points(self) -> int:
        return int(np.prod(self.points))

    @cached_property
    def shape(self):
        return tuple(self.points)

    @cached_property
    def axes(self):
        """Per-axis coordinate arrays, centered so x = 0 is a grid point."""
        return tuple(
            -L / 2.0 + h * np.arange(N)
            for L, h, N in zip(self.extent, self.spacing, self.points)
        )

    @cached_property
    def coords(self):
        """Meshgrid coordinate arrays, one per axis, shape == grid shape."""
        return np.meshgrid(*self.axes, indexing="ij")

    @cached_property
    def radius_sq(self):
        """|x|^2 on the grid."""
        r2 = np.zeros(self.shape)
        for x in self.coords:
            r2 += x**2
        return r2

    @cached_property
    def wavenumbers(self):
        """Per-axis signed wavenumbers xi = 2 pi k / L in FFT ordering."""
        return tuple(
            2.0 * np.pi * np.fft.fftfreq(N, d=h)
            for N, h in zip(self.points, self.spacing)
        )

    @cached_property
    def mode_indices(self):
        """Per-axis signed integer mode numbers in FFT ordering."""
        return tuple(
            np.rint(np.fft.fftfreq(N) * N).astype(int) for N in self.points
        )

    @cached_property
    def wavenumber_mesh(self):
        return np.meshgrid(*self.wavenumbers, indexing="ij")

    @cached_property
    def laplacian_symbol(self):
        """|xi|^2 on the spectral grid."""
        k2 = np.zeros(self.shape)
        for xi in self.wavenumber_mesh:
            k2 += xi**2
        return k2

    @cached_property
    def nyquist(self):
        return tuple(np.pi * N / L for N, L in zip(self.points, self.extent))

    @cached_property
    def dealias_mask(self):
        """Boolean keep-mask: True where every |xi_i| <= fraction * nyquist_i.

        Comparison is done on integer mode numbers (|k| <= fraction * N/2 with
        a tiny tolerance) so the retained band is exactly reproducible.  For
        fraction < 1 the -N/2 column is always dropped, which keeps the
        retained wavenumber set symmetric about 0.
        """
        mask = np.ones(self.shape, dtype=bool)
        for axis, (k, N) in enumerate(zip(self.mode_indices, self.points)):
            cut = self.dealias_fraction * (N / 2.0) + 1e-9
            keep = np.abs(k) <= cut
            shape = [1] * self.dim
            shape[axis] = N
            mask &= keep.reshape(shape)
        return mask

class FieldState:
    """Complex field samples on a GridSpec plus a lazily cached spectrum.

    Treated as immutable: stepping and filtering return fresh instances, so
    states can be shared read-only across trajectory workers.
    """

    __slots__ = ("grid", "values", "_spectral")

    def __init__(self, grid: GridSpec, values, spectral=None):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
        self.grid = grid
        self.values = values
        self._spectral = spectral

    @property
    def spectral(self):
        if self._spectral is None:
            self._spectral = np.fft.fftn(self.values)
        return self._spectral

    @property
    def has_valid_cache(self) -> bool:
        return self._spectral is not None

    def with_values(self, values, spectral=None) -> "FieldState":
        return FieldState(self.grid, values, spectral)

    @classmethod
    def from_spectral(cls, grid: GridSpec, spectral) -> "FieldState":
        spectral = np.asarray(spectral, dtype=np.complex128)
        return cls(grid, np.fft.ifftn(spectral), spectral.copy())

    def copy(self) -> "FieldState":
        spec = None if self._spectral is None else self._spectral.copy()
        return FieldState(self.grid, self.values.copy(), spec)


def _require_finite(state: FieldState):
    if not np.all(np.isfinite(state.values.view(np.float64))):
        raise ValueError("non-finite field")


def quadrature_lp(state: FieldState, p: float) -> float:
    """L^p norm by grid quadrature: (h^dim * sum |u|^p)^(1/p)."""
    if not np.isfinite(p) or p < 1:
        raise ValueError("p must be finite and >= 1")
    _require_finite(state)
    s = np.sum(np.abs(state.values) ** p)
    return float((state.grid.cell_volume * s) ** (1.0 / p))


def mass(state: FieldState) -> float:
    """M(u) = ||u||_{L^2}^2."""
    _require_finite(state)
    return float(state.grid.cell_volume * np.sum(np.abs(state.values) ** 2))


def gradient_norm_sq(state: FieldState) -> float:
    """||grad u||_{L^2}^2 via the spectral symbol |xi|^2."""
    _require_finite(state)
    g = state.grid
    uh2 = np.abs(state.spectral) ** 2
    return float(g.cell_volume / g.total_points * np.sum(g.laplacian_symbol * uh2))


def weighted_variance_quadrature(state: FieldState) -> float:
    """Variance V(u) = integral |x|^2 |u|^2 dx with x in [-L/2, L/2)."""
    _require_finite(state)
    g = state.grid
    return float(g.cell_volume * np.sum(g.radius_sq * np.abs(state.values) ** 2))


def apply_dealias(state: FieldState) -> FieldState:
    """Zero every spectral coefficient outside the retained band (idempotent)."""
    g = state.grid
    if g.dealias_fraction >= 1.0:
        return state
    spec = state.spectral * g.dealias_mask
    return FieldState.from_spectral(g, spec)


def boundary_mass_fraction(state: FieldState, shell: float = 0.1) -> float:
    """Mass fraction in the outer `shell` of the box (torus health diagnostic).

    The outer region is where max_i |x_i| / (L_i/2) > 1 - shell.  Values that
    are not tiny mean the torus truncation of R^n is no longer trustworthy.
    """
    g = state.grid
    outer = np.zeros(g.shape, dtype=bool)
    for x, L in zip(g.coords, g.extent):
        outer |= np.abs(x) > (1.0 - shell) * (L / 2.0)
    total = np.sum(np.abs(state.values) ** 2)
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(state.values[outer]) ** 2) / total)


def spectral_tail_fraction(state: FieldState, inner: float = 0.75) -> float:
    """Spectral mass fraction in the outer part of the retained band.

    Tail modes are retained modes with some |xi_i| above `inner` times the
    band limit.  A large value means the collapse is no longer resolved.
    """
    g = state.grid
    uh2 = np.abs(state.spectral) ** 2
    tail = np.zeros(g.shape, dtype=bool)
    for axis, (k, N) in enumerate(zip(g.mode_indices, g.points)):
        cut = g.dealias_fraction * (N / 2.0)
        sel = np.abs(k) > inner * cut
        shape = [1] * g.dim
        shape[axis] = N
        tail |= sel.reshape(shape)
    tail &= g.dealias_mask
    total = np.sum(uh2[g.dealias_mask])
    if total == 0.0:
        return 0.0
    return float(np.sum(uh2[tail]) / total)
