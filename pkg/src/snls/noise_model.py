"""Covariance operator phi, Wiener increment sampling, and noise functionals.

The operator acts diagonally on the real trigonometric basis of the torus:
for each unordered mode pair {m, -m} the basis holds sqrt(2/L^d) cos(xi x)
and sqrt(2/L^d) sin(xi x) (the constant 1/sqrt(L^d) for m = 0), and phi
multiplies both by the amplitude lambda_m >= 0.  A convolution kernel is the
same thing with lambda read off its Fourier multiplier.  Every scalar
functional used by the bounds is a straightforward sum/quadrature over the
sampled basis fields, so the discrete constants are exactly the ones the
sampler realizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec

__all__ = [
    "CovarianceSpec",
    "NoiseConstants",
    "NoiseSampler",
    "noise_constants",
    "sample_increment_real",
    "sample_increment_complex",
    "gaussian_spectrum_amplitudes",
    "make_rng",
]


def make_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream keyed by (master_seed, index); bitwise reproducible."""
    key = np.array([np.uint64(index), np.uint64(master_seed)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _canonical_mode(mode) -> tuple:
    if np.isscalar(mode):
        mode = (int(mode),)
    return tuple(int(m) for m in mode)


def _pair_representative(mode: tuple) -> tuple:
    """One representative per {m, -m} pair: first nonzero component positive."""
    for m in mode:
        if m > 0:
            return mode
        if m < 0:
            return tuple(-c for c in mode)
    return mode


@dataclass(frozen=True)
class CovarianceSpec:
    """Spatial covariance of the driving noise.

    kind 'fourier_diagonal': amplitudes maps integer mode tuples to
    lambda >= 0 (the +/-m pair shares one amplitude).  kind 'physical_kernel':
    kernel holds samples of a real even convolution kernel K(x - y) on the
    grid; its Fourier multiplier must be nonnegative.  scale multiplies every
    amplitude, so all quadratic functionals pick up scale^2.
    """

    kind: str
    amplitudes: dict = field(default_factory=dict)
    kernel: np.ndarray | None = None
    scale: float = 1.0
    # kernel multipliers below this relative level are treated as zero; the
    # boundary truncation of a sampled kernel leaves a tail at ~1e-10
    kernel_floor: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("fourier_diagonal", "physical_kernel"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("scale must be >= 0")
        if self.kind == "fourier_diagonal":
            amps = {}
            for mode, lam in self.amplitudes.items():
                lam = float(lam)
                if lam < 0:
                    raise ValueError("amplitudes must be nonnegative")
                rep = _pair_representative(_canonical_mode(mode))
                if rep in amps and abs(amps[rep] - lam) > 1e-14 * max(1.0, lam):
                    raise ValueError(f"conflicting amplitudes for mode pair {rep}")
                amps[rep] = lam
            object.__setattr__(self, "amplitudes", amps)
        elif self.kernel is None:
            raise ValueError("physical_kernel spec needs kernel samples")

    def with_scale(self, scale: float) -> "CovarianceSpec":
        return CovarianceSpec(self.kind, dict(self.amplitudes),
                              None if self.kernel is None else self.kernel.copy(),
                              scale, self.kernel_floor)

    def mode_amplitudes(self, grid: GridSpec) -> dict:
        """Resolved {pair representative mode: scaled amplitude} on this grid."""
        if self.kind == "fourier_diagonal":
            return {m: self.scale * lam for m, lam in self.amplitudes.items() if lam > 0}
        kernel = np.asarray(self.kernel, dtype=float)
        if kernel.shape != grid.shape:
            raise ValueError("kernel shape does not match grid")
        # Multiplier of u -> integral K(x-y) u(y) dy on the torus.  The kernel is
        # sampled on centered coordinates; the DFT phase from the half-shift is
        # removed by evaluating against the even extension (take the real part).
        mult = grid.cell_volume * np.real(
            np.fft.fftn(np.fft.ifftshift(kernel))
        )
        tol = self.kernel_floor * float(np.max(np.abs(mult)))
        if np.min(mult) < -tol:
            raise ValueError("kernel multiplier is not nonnegative")
        amps = {}
        kmesh = np.meshgrid(*grid.mode_indices, indexing="ij")
        flat = [k.ravel() for k in kmesh]
        mvals = mult.ravel()
        for i in range(grid.total_points):
            lam = mvals[i]
            if lam <= tol:
                continue
            mode = tuple(int(k[i]) for k in flat)
            rep = _pair_representative(mode)
            amps[rep] = self.scale * float(lam)
        return amps


@dataclass(frozen=True)
class NoiseConstants:
    """All scalar functionals of phi entering the bounds (see module docstring)."""

    hs00: float            # ||phi||^2 Hilbert-Schmidt L2 -> L2
    hs01: float            # ||phi||^2 Hilbert-Schmidt L2 -> H1
    F_phi: np.ndarray      # sum_k (phi e_k)^2, a field
    f1_phi: np.ndarray     # sum_k |grad(phi e_k)|^2, a field
    M_phi: float           # sup_x f1_phi
    C_phi_interp: float    # ||phi||_{01}^{n s/(2s+2)} ||phi||_{00}^{(2-(n-2)s)/(2s+2)}
    C_rad_2s2: float       # sum_k ||phi e_k||^2_{L^{2 sigma + 2}}
    C_phi_Sigma: float     # sum_k ||x phi e_k||^2_{L^2}
    C_phi_1: float         # sum_k ||grad(phi e_k)||^2_{L^2}
    C_phi_2: float         # Im sum_k int phi e_k  x . grad(conj phi e_k)


class NoiseSampler:
    """Precomputed basis fields for repeated increment draws on one grid."""

    def __init__(self, spec: CovarianceSpec, grid: GridSpec):
        self.spec = spec
        self.grid = grid
        amps = spec.mode_amplitudes(grid)
        self._validate_band(amps, grid)
        fields = []
        grads = []
        weights = []
        vol = float(np.prod(grid.extent))
        coords = grid.coords
        for mode in sorted(amps):
            lam = amps[mode]
            xi = np.array([2.0 * np.pi * m / L for m, L in zip(mode, grid.extent)])
            phase = np.zeros(grid.shape)
            for c, x in zip(xi, coords):
                phase = phase + c * x
            if all(m == 0 for m in mode):
                fields.append(np.full(grid.shape, vol**-0.5))
                grads.append(np.zeros((grid.dim,) + grid.shape))
                weights.append(lam)
            else:
                amp = (2.0 / vol) ** 0.5
                cosf, sinf = amp * np.cos(phase), amp * np.sin(phase)
                fields.append(cosf)
                grads.append(np.stack([-c * sinf for c in xi]))
                weights.append(lam)
                fields.append(sinf)
                grads.append(np.stack([c * cosf for c in xi]))
                weights.append(lam)
        self.basis = np.array(fields) if fields else np.zeros((0,) + grid.shape)
        self.basis_grad = (
            np.array(grads) if grads else np.zeros((0, grid.dim) + grid.shape)
        )
        self.weights = np.asarray(weights)
        self.n_basis = len(weights)

    @staticmethod
    def _validate_band(amps, grid):
        for mode in amps:
            for m, N, f in zip(mode, grid.points, (grid.dealias_fraction,) * grid.dim):
                if abs(m) > f * (N / 2.0) + 1e-9:
                    raise ValueError("covariance exceeds spectral band")

    def sample_real(self, dt: float, rng: np.random.Generator) -> np.ndarray:
        """One real increment Delta W = sqrt(dt) sum_k lambda_k g_k e_k."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_basis == 0:
            return np.zeros(self.grid.shape)
        g = rng.standard_normal(self.n_basis)
        coeff = np.sqrt(dt) * self.weights * g
        return np.tensordot(coeff, self.basis, axes=(0, 0))

    def sample_complex(self, dt: float, rng: np.random.Generator) -> np.ndarray:
        """Complex increment: independent Re/Im, each with amplitude / sqrt(2).

        Normalized so that E ||Delta W||_{L^2}^2 = hs00 * dt, which is what the
        additive mass identity  E M(u(t)) = M(u_0) + t ||phi||^2  requires.
        """
        re = self.sample_real(dt, rng) / np.sqrt(2.0)
        im = self.sample_real(dt, rng) / np.sqrt(2.0)
        return re + 1j * im

    def constants(self, sigma: float) -> NoiseConstants:
        g = self.grid
        h = g.cell_volume
        lam2 = self.weights**2
        F_phi = np.tensordot(lam2, self.basis**2, axes=(0, 0))
        gsq = np.sum(self.basis_grad**2, axis=1)
        f1_phi = np.tensordot(lam2, gsq, axes=(0, 0))
        l2 = h * np.sum(self.basis**2, axis=tuple(range(1, 1 + g.dim)))
        grad_l2 = h * np.sum(gsq, axis=tuple(range(1, 1 + g.dim)))
        hs00 = float(np.sum(lam2 * l2))
        C1 = float(np.sum(lam2 * grad_l2))
        hs01 = hs00 + C1
        p = 2.0 * sigma + 2.0
        lp = (h * np.sum(np.abs(self.basis) ** p, axis=tuple(range(1, 1 + g.dim)))) ** (2.0 / p)
        c_rad = float(np.sum(lam2 * lp))
        xsq = g.radius_sq
        sig = h * np.sum(xsq * self.basis**2, axis=tuple(range(1, 1 + g.dim)))
        c_sigma = float(np.sum(lam2 * sig))
        # Basis fields are real, so Im int phi e_k x.grad(phi e_k) vanishes exactly.
        c2 = 0.0
        n = g.dim
        c_interp = hs01 ** (n * sigma / (2.0 * p)) * hs00 ** ((2.0 - (n - 2) * sigma) / (2.0 * p))
        return NoiseConstants(
            hs00=hs00, hs01=hs01, F_phi=F_phi, f1_phi=f1_phi,
            M_phi=float(np.max(f1_phi)) if f1_phi.size else 0.0,
            C_phi_interp=float(c_interp) if hs00 > 0 else 0.0,
            C_rad_2s2=c_rad, C_phi_Sigma=c_sigma, C_phi_1=C1, C_phi_2=c2,
        )


def noise_constants(spec: CovarianceSpec, grid: GridSpec, sigma: float) -> NoiseConstants:
    """All scalar functionals of phi on this grid (see NoiseConstants)."""
    return NoiseSampler(spec, grid).constants(sigma)


def sample_increment_real(spec: CovarianceSpec, grid: GridSpec, dt: float,
                          rng: np.random.Generator) -> np.ndarray:
    return NoiseSampler(spec, grid).sample_real(dt, rng)


def sample_increment_complex(spec: CovarianceSpec, grid: GridSpec, dt: float,
                             rng: np.random.Generator) -> np.ndarray:
    return NoiseSampler(spec, grid).sample_complex(dt, rng)


def gaussian_spectrum_amplitudes(grid: GridSpec, strength: float, width: float,
                                 k_max: int) -> dict:
    """Named profile: lambda_m = strength * exp(-|xi_m|^2 width^2 / 2), |m_i| <= k_max."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    amps = {}
    for mode in np.ndindex(*[2 * k_max + 1] * grid.dim):
        m = tuple(mi - k_max for mi in mode)
        xi2 = sum((2.0 * np.pi * mi / L) ** 2 for mi, L in zip(m, grid.extent))
        rep = _pair_representative(m)
        amps[rep] = strength * float(np.exp(-0.5 * xi2 * width**2))
    return amps
