"""Stochastic particle engine for the diffusively driven inelastic gas.

Each step splits the dynamics into a Brownian bath kick (exact
Euler-Maruyama form of the Laplacian forcing), a majorant-rate collision
sweep (Poisson candidate count, acceptance |u|/U_max, uniform scattering
direction) and an optional momentum recentering.  All randomness comes
from counter-based Philox streams keyed by (seed, step, substream), so a
run is bit-reproducible from its configuration alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dissipation import DissipationSpec, dissipation_functional, psi_e
from .errors import ConfigError, InputError, MajorantViolation, TimeStepError
from .restitution import RestitutionModel

_STREAM_BATH = 0
_STREAM_COLLIDE = 1
_STREAM_INIT = 2
_STREAM_DIAG = 3

SNAPSHOT_MAGIC = "GSTEADY1"


def _stream(seed: int, step: int, substream: int) -> np.random.Generator:
    """Counter-based generator for one (step, substream) slot."""
    return np.random.Generator(np.random.Philox(key=[seed, (step << 2) | substream]))


@dataclass
class EngineConfig:
    n: int
    dt: float
    mu: float
    seed: int = 0
    recenter: bool = True
    umax_factor: float = 2.0
    max_steps: int = 20000
    window: int = 200
    tol: float = 0.01
    sample_every: int = 10
    diss_pairs: int = 100_000
    umax_override: float | None = None  # test hook; 0 disables collisions

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("need at least 2 particles")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.mu < 0.0:
            raise ConfigError("bath strength mu must be non-negative")
        if self.umax_factor < 1.0:
            raise ConfigError("umax_factor must be at least 1")
        if self.window < 2 or self.sample_every < 1:
            raise ConfigError("invalid steady-detection window")


@dataclass
class Ensemble:
    """N equal-weight velocities plus the simulation clock and counters."""

    velocities: np.ndarray
    t: float = 0.0
    step_count: int = 0
    n_candidates: int = 0
    n_collisions: int = 0
    bath_energy: float = 0.0
    collision_loss: float = 0.0
    recenter_energy: float = 0.0
    collision_prob_ema: float = 0.0

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    def energy(self) -> float:
        v = self.velocities
        return float(np.einsum("ij,ij->", v, v))

    def accept_ratio(self) -> float:
        if self.n_candidates == 0:
            return 1.0
        return self.n_collisions / self.n_candidates


@dataclass
class InitialCondition:
    kind: str  # maxwellian | bimodal | uniform_ball
    t0: float = 1.0
    v0: float = 1.0
    radius: float = 1.0


@dataclass
class SteadyReport:
    temperature: float
    moments: dict
    diss_estimate: float
    tail_a: float
    tail_value: float
    tail_max_share: float
    steps: int
    converged: bool
    accept_ratio: float
    slope: float
    series: list = field(default_factory=list, repr=False)

SERIES_COLUMNS = ("step", "t", "m1", "m3_2", "m2", "m3",
                  "diss_estimate", "accept_ratio")


def initial_ensemble(config: EngineConfig, init: InitialCondition) -> Ensemble:
    """Build a centered initial ensemble from its specification."""
    rng = _stream(config.seed, 0, _STREAM_INIT)
    n = config.n
    if init.kind == "maxwellian":
        vel = rng.normal(0.0, math.sqrt(init.t0), size=(n, 3))
    elif init.kind == "bimodal":
        half = n // 2
        vel = np.zeros((n, 3))
        vel[:half, 0] = init.v0
        vel[half:, 0] = -init.v0
        vel += rng.normal(0.0, 1e-3 * abs(init.v0), size=(n, 3))
    elif init.kind == "uniform_ball":
        raw = rng.normal(size=(n, 3))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        vel = init.radius * raw * rng.random(n)[:, None] ** (1.0 / 3.0)
    else:
        raise ConfigError(f"unknown init.kind {init.kind!r}")
    vel -= vel.mean(axis=0)
    if init.kind == "maxwellian":
        # Pin the empirical temperature exactly at t0.
        m1 = float(np.mean(np.einsum("ij,ij->i", vel, vel)))
        vel *= math.sqrt(3.0 * init.t0 / m1)
    return Ensemble(velocities=np.ascontiguousarray(vel, dtype=np.float64))


def step(ens: Ensemble, config: EngineConfig, model: RestitutionModel) -> Ensemble:
    """Advance the ensemble by one time step in place."""
    vel = ens.velocities
    n = ens.n
    dt = config.dt

    if config.mu > 0.0:
        rng = _stream(config.seed, ens.step_count, _STREAM_BATH)
        kick = rng.normal(0.0, math.sqrt(2.0 * config.mu * dt), size=vel.shape)
        before = float(np.einsum("ij,ij->", vel, vel))
        vel += kick
        ens.bath_energy += float(np.einsum("ij,ij->", vel, vel)) - before

    if config.umax_override is not None:
        umax = config.umax_override
    else:
        vmax = math.sqrt(float(np.max(np.einsum("ij,ij->i", vel, vel))))
        umax = config.umax_factor * 2.0 * vmax
    accepted = 0
    if umax > 0.0:
        rng = _stream(config.seed, ens.step_count, _STREAM_COLLIDE)
        m = int(rng.poisson((n - 1) * umax * dt / 2.0))
        if m > 0:
            ii = rng.integers(0, n, size=m)
            jj = rng.integers(0, n - 1, size=m)
            jj = jj + (jj >= ii)
            accept_u = rng.random(m)
            raw = rng.normal(size=(m, 3))
            norms = np.linalg.norm(raw, axis=1, keepdims=True)
            sigma = raw / np.maximum(norms, 1e-300)
            accepted, loss, violated = _kernels.apply_collisions(
                vel, ii.astype(np.int64), jj.astype(np.int64), accept_u,
                sigma, umax, model._code, model.e0, model.a, model.gamma,
                model.lambda_scale)
            if violated:
                raise MajorantViolation(
                    "pairwise speed exceeded U_max; increase umax_factor")
            ens.n_candidates += m
            ens.n_collisions += accepted
            ens.collision_loss += loss
        if not np.all(np.isfinite(vel)):
            raise TimeStepError("non-finite velocity; check dt and mu")

    ens.collision_prob_ema = (0.9 * ens.collision_prob_ema
                              + 0.1 * (2.0 * accepted / n))
    if ens.step_count > 20 and ens.collision_prob_ema > 0.2:
        raise TimeStepError(
            f"per-particle collision probability per step "
            f"{ens.collision_prob_ema:.3f} exceeds 0.2; reduce dt")

    if config.recenter:
        mean = vel.mean(axis=0)
        ens.recenter_energy -= n * float(mean @ mean)
        vel -= mean

    ens.t += dt
    ens.step_count += 1
    return ens


def _fit_slope(ts: np.ndarray, ys: np.ndarray) -> float:
    t0 = ts - ts.mean()
    denom = float(t0 @ t0)
    if denom == 0.0:
        return 0.0
    return float(t0 @ (ys - ys.mean())) / denom


def run_to_steady(config: EngineConfig, model: RestitutionModel,
                  init: InitialCondition):
    """Iterate steps until the energy slope over the trailing window is flat.

    Returns (ensemble, report).  Non-convergence within max_steps yields a
    report with converged=False rather than an exception.
    """
    ens = initial_ensemble(config, init)
    spec = DissipationSpec(model)
    series: list[tuple] = []
    low_accept_warned = False
    converged = False
    slope = math.nan

    while ens.step_count < config.max_steps:
        step(ens, config, model)
        if ens.step_count % config.sample_every != 0:
            continue
        vel = ens.velocities
        sq = np.einsum("ij,ij->i", vel, vel)
        m1 = float(np.mean(sq))
        row = (ens.step_count, ens.t, m1,
               float(np.mean(sq ** 1.5)), float(np.mean(sq ** 2)),
               float(np.mean(sq ** 3)),
               dissipation_functional(
                   vel, lambda r2: psi_e(spec, r2),
                   n_pairs=None if ens.n * (ens.n - 1) // 2 <= config.diss_pairs
                   else config.diss_pairs,
                   rng=_stream(config.seed, ens.step_count, _STREAM_DIAG)),
               ens.accept_ratio())
        series.append(row)
        ratio = ens.accept_ratio()
        if (not low_accept_warned and ens.n_candidates > 1000 and ratio < 0.05):
            warnings.warn(f"majorant acceptance ratio {ratio:.3f} below 0.05; "
                          "umax_factor is wasting candidates", RuntimeWarning)
            low_accept_warned = True
        if len(series) >= config.window:
            tail = series[-config.window:]
            ts = np.array([r[1] for r in tail])
            m1s = np.array([r[2] for r in tail])
            slope = _fit_slope(ts, m1s)
            span = ts[-1] - ts[0]
            if abs(slope) * span < config.tol * float(np.mean(m1s)):
                converged = True
                break

    window = series[-config.window:] if series else []
    arr = np.array(window) if window else np.zeros((0, len(SERIES_COLUMNS)))
    means = arr.mean(axis=0) if len(arr) else np.full(len(SERIES_COLUMNS), np.nan)
    sq = np.einsum("ij,ij->i", ens.velocities, ens.velocities)
    m1_now = float(np.mean(sq))
    tail_a = 0.1 * m1_now ** -0.75 if m1_now > 0 else 0.0
    weights = np.exp(tail_a * sq ** 0.75)
    tail_value = float(np.mean(weights))
    tail_share = float(np.max(weights) / np.sum(weights))
    report = SteadyReport(
        temperature=float(means[2]) / 3.0,
        moments={1.0: float(means[2]), 1.5: float(means[3]),
                 2.0: float(means[4]), 3.0: float(means[5])},
        diss_estimate=float(means[6]),
        tail_a=tail_a,
        tail_value=tail_value,
        tail_max_share=tail_share,
        steps=ens.step_count,
        converged=converged,
        accept_ratio=ens.accept_ratio(),
        slope=slope,
        series=series,
    )
    return ens, report


def save_snapshot(path, ens: Ensemble) -> None:
    """Header line plus raw little-endian float64 velocities."""
    header = f"{SNAPSHOT_MAGIC} N={ens.n} t={ens.t!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(ens.velocities, dtype="<f8").tobytes())


def load_snapshot(path) -> Ensemble:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if not header or header[0] != SNAPSHOT_MAGIC:
            raise InputError("not a gsteady snapshot")
        fields = dict(item.split("=", 1) for item in header[1:])
        n = int(fields["N"])
        t = float(fields["t"])
        data = np.frombuffer(fh.read(24 * n), dtype="<f8").reshape(n, 3)
    return Ensemble(velocities=data.copy(), t=t)
