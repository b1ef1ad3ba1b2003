"""Single-trajectory time integration.

One step advances the Strang-split deterministic core and then the noise
substep.  Sign conventions follow the dynamics  i u_t - (Lap u + |u|^2s u) = 0,
under which the soliton is u(t, x) = e^{-i t} Q(x):

  * nonlinear half step:  u <- u exp(-i |u|^2s dt/2)      (exact phase flow)
  * linear full step:     uhat <- uhat exp(+i |xi|^2 dt)
  * multiplicative noise: u <- u exp(-i dW(x))            (Stratonovich-exact;
    the Ito correction -(1/2) F_phi u dt is contained in the exponential and
    must not be added again)
  * additive noise:       u <- u - i dW

The multiplicative substep is a pointwise unimodular multiplication, so the
discrete mass is conserved to rounding, which is the structural counterpart
of the a.s. mass conservation of the Stratonovich equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import FieldState, apply_dealias, mass, spectral_tail_fraction
from .ground_state import GroundState
from .noise_model import CovarianceSpec, NoiseSampler, make_rng
from .observables import ObservableSample, observe

__all__ = [
    "AdaptSpec",
    "StoppingThresholds",
    "GroundStateRefs",
    "SimConfig",
    "TerminalStatus",
    "TrajectoryRecord",
    "step_deterministic",
    "step_multiplicative",
    "step_additive",
    "run_trajectory",
    "STOPPING_TIME_NAMES",
]

STOPPING_TIME_NAMES = (
    "tau_delta_energy",    # sup H(u) M0^a >= delta_e H(Q) M(Q)^a
    "tau_delta_mass",      # ||u|| >= delta_m ||Q||
    "tau_delta_gradient",  # downward: X(t) <= delta_g x*
    "tau_A",               # H(u) >= A H(Q)
    "tau_tilde_N",         # ||grad u|| >= N
    "sigma_gamma",         # H(u) M0^a >= gamma H(Q) M(Q)^a
    "sigma_0",             # H(u) <= 0
    "omega_mass_exit",     # ||u|| > lambda ||Q||  (mass containment tracker)
)


@dataclass(frozen=True)
class AdaptSpec:
    """Halve dt when ||grad u||^2 grows by growth_factor since the last change."""

    growth_factor: float = 2.0
    dt_min: float = 1e-6

    def to_dict(self):
        return {"growth_factor": self.growth_factor, "dt_min": self.dt_min}


@dataclass(frozen=True)
class StoppingThresholds:
    """Threshold parameters of the tracked stopping times; None disables a tracker."""

    delta_energy: float | None = None
    delta_mass: float | None = None
    delta_gradient: float | None = None
    gamma: float | None = None
    A_energy: float | None = None
    lam: float | None = None

    def to_dict(self):
        return {
            "delta_energy": self.delta_energy, "delta_mass": self.delta_mass,
            "delta_gradient": self.delta_gradient, "gamma": self.gamma,
            "A_energy": self.A_energy, "lam": self.lam,
        }


@dataclass(frozen=True)
class GroundStateRefs:
    """The ground-state scalars the trackers compare against."""

    mass: float
    energy: float
    grad_sq: float
    alpha: float | None
    x_star: float | None

    @classmethod
    def from_ground_state(cls, gs: GroundState):
        return cls(mass=gs.mass, energy=gs.energy, grad_sq=gs.grad_sq,
                   alpha=gs.alpha, x_star=gs.x_star)

    def to_dict(self):
        return {"mass": self.mass, "energy": self.energy, "grad_sq": self.grad_sq,
                "alpha": self.alpha, "x_star": self.x_star}


_CRIT_SIGMA = {1: 2.0, 2: 1.0, 3: 2.0 / 3.0, 4: 0.5}


def _sigma_in_admissible_range(n: int, sigma: float) -> bool:
    crit = _CRIT_SIGMA.get(n)
    if crit is not None and abs(sigma - crit) < 1e-12:
        return True
    if n in (1, 2):
        return sigma > 2.0 / n
    if n in (3, 4):
        return 2.0 / n < sigma < 2.0 / (n - 2)
    if n == 5:
        return 0.5 <= sigma < 2.0 / 3.0
    return False


@dataclass(frozen=True)
class SimConfig:
    n: int
    sigma: float
    noise_type: str  # none | multiplicative | additive
    dt0: float
    T_end: float
    grad_threshold: float          # blow-up detector N on ||grad u||
    record_stride: int = 1
    adapt: AdaptSpec | None = None
    thresholds: StoppingThresholds = field(default_factory=StoppingThresholds)
    gs_refs: GroundStateRefs | None = None
    tail_fraction_max: float = 0.10
    allow_conditional_regime: bool = False
    disable_nonlinearity: bool = False  # test hook: free Schroedinger evolution

    def __post_init__(self):
        if self.noise_type not in ("none", "multiplicative", "additive"):
            raise ValueError(f"unknown noise_type {self.noise_type!r}")
        if not 0.0 < self.dt0 < self.T_end:
            raise ValueError("need 0 < dt0 < T_end")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.grad_threshold <= 0:
            raise ValueError("grad_threshold must be positive")
        if not self.allow_conditional_regime and not _sigma_in_admissible_range(self.n, self.sigma):
            raise ValueError(
                "sigma outside the admissible critical/intercritical ranges; "
                "set allow_conditional_regime=True to run anyway"
            )

    @property
    def alpha_or_zero(self) -> float:
        if self.gs_refs is not None and self.gs_refs.alpha is not None:
            return self.gs_refs.alpha
        return 0.0


@dataclass(frozen=True)
class TerminalStatus:
    kind: str                 # survived | blownup | failed
    time: float
    reason: str | None = None

    def to_dict(self):
        return {"kind": self.kind, "time": self.time, "reason": self.reason}


@dataclass
class TrajectoryRecord:
    samples: list
    status: TerminalStatus
    hit_times: dict
    seed: object
    dt_final: float
    config_hash: str | None = None

    def sample_arrays(self):
        """Column arrays keyed by observable name, for aggregation."""
        keys = self.samples[0].to_dict().keys() if self.samples else []
        return {k: np.array([s.to_dict()[k] for s in self.samples]) for k in keys}

    def to_summary_dict(self):
        return {
            "status": self.status.to_dict(),
            "hit_times": dict(self.hit_times),
            "seed": list(self.seed) if isinstance(self.seed, tuple) else self.seed,
            "dt_final": self.dt_final,
            "n_samples": len(self.samples),
            "config_hash": self.config_hash,
        }


def _nonlinear_phase(values: np.ndarray, sigma: float, dt_half: float) -> np.ndarray:
    # |u|^(2 sigma) as exp(sigma log |u|^2) with a floor, robust for fractional sigma
    abs2 = np.maximum(values.real**2 + values.imag**2, 1e-300)
    power = np.exp(sigma * np.log(abs2))
    return values * np.exp(-1j * dt_half * power)


def step_deterministic(u: FieldState, dt: float, sigma: float,
                       dealias: bool = True, skip_nonlinear: bool = False) -> FieldState:
    """One Strang step of the deterministic flow (see module docstring)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = u.grid
    vals = u.values
    if not skip_nonlinear:
        vals = _nonlinear_phase(vals, sigma, dt / 2.0)
    spec = np.fft.fftn(vals)
    spec *= np.exp(1j * g.laplacian_symbol * dt)
    if dealias and not skip_nonlinear and g.dealias_fraction < 1.0:
        spec *= g.dealias_mask
    vals = np.fft.ifftn(spec)
    if not skip_nonlinear:
        vals = _nonlinear_phase(vals, sigma, dt / 2.0)
        out = FieldState(g, vals)
        if dealias and g.dealias_fraction < 1.0:
            out = apply_dealias(out)
        return out
    return FieldState(g, vals, spec)


def step_multiplicative(u: FieldState, dW: np.ndarray) -> FieldState:
    """Exact Stratonovich substep u <- u exp(-i dW) for a real increment."""
    dW = np.asarray(dW)
    if np.iscomplexobj(dW) and np.max(np.abs(dW.imag)) > 0:
        raise ValueError("multiplicative increment must be real")
    return u.with_values(u.values * np.exp(-1j * dW.real))


def step_additive(u: FieldState, dW: np.ndarray) -> FieldState:
    """Additive substep u <- u - i dW (from i du = dW on the noise flow)."""
    return u.with_values(u.values - 1j * np.asarray(dW, dtype=complex))


class _StoppingTrackers:
    """First-crossing detection on the recorded samples."""

    def __init__(self, cfg: SimConfig):
        self.hits = {name: None for name in STOPPING_TIME_NAMES}
        refs = cfg.gs_refs
        th = cfg.thresholds
        alpha = cfg.alpha_or_zero
        self._checks = []
        if refs is not None:
            me_q = refs.energy * refs.mass**alpha
            if th.delta_energy is not None:
                lim = th.delta_energy * me_q
                self._checks.append(("tau_delta_energy", lambda s: s.me_product >= lim))
            if th.gamma is not None:
                lim = th.gamma * me_q
                self._checks.append(("sigma_gamma", lambda s: s.me_product >= lim))
            if th.delta_mass is not None:
                lim = th.delta_mass**2 * refs.mass
                self._checks.append(("tau_delta_mass", lambda s: s.mass >= lim))
            if th.lam is not None:
                lim = th.lam**2 * refs.mass
                self._checks.append(("omega_mass_exit", lambda s: s.mass > lim))
            if th.A_energy is not None:
                lim = th.A_energy * refs.energy
                self._checks.append(("tau_A", lambda s: s.energy >= lim))
            if th.delta_gradient is not None and refs.x_star is not None:
                lim = th.delta_gradient * refs.x_star
                self._checks.append(("tau_delta_gradient", lambda s: s.X <= lim))
        self._checks.append(("sigma_0", lambda s: s.energy <= 0.0))
        nsq = cfg.grad_threshold**2
        self._checks.append(("tau_tilde_N", lambda s: s.grad_sq >= nsq))

    def update(self, sample: ObservableSample):
        for name, pred in self._checks:
            if self.hits[name] is None and pred(sample):
                self.hits[name] = sample.t


def run_trajectory(config: SimConfig, u0: FieldState, spec: CovarianceSpec | None,
                   seed) -> TrajectoryRecord:
    """Integrate one path to T_end, blow-up, or failure.

    Deterministic given (config, u0, spec, seed): the noise stream is a
    counter-based generator keyed by the seed, so reruns are bitwise identical.
    """
    rng = None
    sampler = None
    if config.noise_type != "none":
        if spec is None:
            raise ValueError("noise_type set but no covariance spec given")
        sampler = NoiseSampler(spec, u0.grid)
        if isinstance(seed, tuple):
            rng = make_rng(seed[0], seed[1])
        else:
            rng = make_rng(int(seed), 0)

    m0 = mass(u0)
    alpha = config.alpha_or_zero
    grad0 = observe(u0, 0.0, m0, alpha, config.sigma).grad_sq
    if grad0 >= config.grad_threshold**2:
        raise ValueError("grad_threshold must exceed the initial gradient norm")

    trackers = _StoppingTrackers(config)
    samples: list[ObservableSample] = []
    u = u0
    t = 0.0
    dt = config.dt0
    grad_ref = max(grad0, 1e-300)
    status = None
    step = 0

    def record(state, time):
        s = observe(state, time, m0, alpha, config.sigma)
        samples.append(s)
        trackers.update(s)
        return s

    record(u, 0.0)
    while t < config.T_end - 1e-12 * config.T_end:
        dt_step = min(dt, config.T_end - t)
        try:
            u = step_deterministic(u, dt_step, config.sigma,
                                   skip_nonlinear=config.disable_nonlinearity)
            if config.noise_type == "multiplicative":
                u = step_multiplicative(u, sampler.sample_real(dt_step, rng))
            elif config.noise_type == "additive":
                u = step_additive(u, sampler.sample_complex(dt_step, rng))
        except (FloatingPointError, ValueError):
            status = TerminalStatus("failed", t, "overflow")
            break
        t += dt_step
        step += 1
        if not np.all(np.isfinite(u.values.view(np.float64))):
            reason = "unresolved" if (config.adapt and dt <= config.adapt.dt_min) else "overflow"
            status = TerminalStatus("failed", t, reason)
            break
        if step % config.record_stride == 0 or t >= config.T_end - 1e-12:
            s = record(u, t)
            if s.grad_sq >= config.grad_threshold**2:
                status = TerminalStatus("blownup", t)
                break
            if spectral_tail_fraction(u) > config.tail_fraction_max:
                status = TerminalStatus("blownup", t, "spectral tail")
                break
            if config.adapt is not None and s.grad_sq > config.adapt.growth_factor * grad_ref:
                if dt > config.adapt.dt_min:
                    dt = max(dt / 2.0, config.adapt.dt_min)
                grad_ref = s.grad_sq
    if status is None:
        status = TerminalStatus("survived", config.T_end)
    return TrajectoryRecord(samples=samples, status=status, hit_times=trackers.hits,
                            seed=seed if isinstance(seed, tuple) else int(seed),
                            dt_final=dt)
