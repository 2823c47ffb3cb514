"""Correspondence between the physical problem (e, mu) and the rescaled
problem (e_lambda, lambda^gamma).

The dictionary is mu = lambda^{3+gamma}; velocities rescale by 1/lambda
so that moments transform as m_p -> lambda^{-2p} m_p.  The equivalence is
probed statistically by running both sides to steadiness over seed
replicas and comparing moment means.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .dsmc import EngineConfig, Ensemble, InitialCondition, run_to_steady
from .errors import InputError
from .restitution import RestitutionModel, rescale


@dataclass(frozen=True)
class ScalePair:
    lam: float
    gamma: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise InputError("lambda must lie in (0, 1]")
        if not math.isclose(self.mu, self.lam ** (3.0 + self.gamma),
                            rel_tol=1e-15, abs_tol=0.0):
            raise InputError("mu must equal lambda^(3+gamma)")


def pair_from_lambda(lam: float, gamma: float) -> ScalePair:
    return ScalePair(lam=lam, gamma=gamma, mu=lam ** (3.0 + gamma))


def lambda_from_mu(mu: float, gamma: float) -> ScalePair:
    """Invert the bath-strength dictionary mu = lambda^(3+gamma)."""
    if not 0.0 < mu <= 1.0:
        raise InputError("mu must lie in (0, 1]")
    lam = mu ** (1.0 / (3.0 + gamma))
    return ScalePair(lam=lam, gamma=gamma, mu=lam ** (3.0 + gamma))


def rescale_ensemble(ens: Ensemble, lam: float) -> Ensemble:
    """Divide every velocity by lam; clock and counters are preserved."""
    if lam <= 0.0:
        raise InputError("rescale factor must be positive")
    return dataclasses.replace(ens, velocities=ens.velocities / lam)


@dataclass(frozen=True)
class EquivalenceReport:
    lam: float
    z_scores: dict
    moments_physical: dict
    moments_rescaled: dict
    all_converged: bool


def _moment_vector(vel: np.ndarray, ps=(1.0, 2.0, 3.0)) -> np.ndarray:
    sq = np.einsum("ij,ij->i", vel, vel)
    return np.array([np.mean(sq ** p) for p in ps])


def scaling_equivalence_test(config_base: EngineConfig, model: RestitutionModel,
                             lam: float, seeds, init_t0: float = 1.0,
                             p_set=(1.0, 2.0, 3.0)) -> EquivalenceReport:
    """Compare steady moments of the two equivalent formulations.

    Side A runs the physical problem with bath lambda^{3+gamma} and
    rescales the steady ensemble by lambda; side B runs the rescaled
    model with bath lambda^gamma.  Per-moment two-sample z-scores over
    the seed replicas are returned.
    """
    if not 0.0 < lam <= 1.0:
        raise InputError("lambda must lie in (0, 1]")
    gamma = model.gamma
    mu_a = lam ** (3.0 + gamma)
    mu_b = lam ** gamma
    mom_a, mom_b = [], []
    ok = True
    for seed in seeds:
        # Physical side: speeds are smaller by lam, so stretch dt to keep
        # the per-step collision budget comparable.
        cfg_a = dataclasses.replace(config_base, mu=mu_a, seed=int(seed),
                                    dt=config_base.dt / lam)
        ens_a, rep_a = run_to_steady(
            cfg_a, model, InitialCondition("maxwellian", t0=lam * lam * init_t0))
        ok = ok and rep_a.converged
        mom_a.append(_moment_vector(rescale_ensemble(ens_a, lam).velocities, p_set))

        cfg_b = dataclasses.replace(config_base, mu=mu_b, seed=int(seed) + 7919)
        model_b = rescale(model, lam) if lam < 1.0 else model
        ens_b, rep_b = run_to_steady(
            cfg_b, model_b, InitialCondition("maxwellian", t0=init_t0))
        ok = ok and rep_b.converged
        mom_b.append(_moment_vector(ens_b.velocities, p_set))

    a = np.array(mom_a)
    b = np.array(mom_b)
    nrep = len(seeds)
    z = {}
    for k, p in enumerate(p_set):
        se = math.sqrt(a[:, k].var(ddof=1) / nrep + b[:, k].var(ddof=1) / nrep)
        z[float(p)] = float((a[:, k].mean() - b[:, k].mean()) / se) if se > 0 else 0.0
    return EquivalenceReport(
        lam=lam, z_scores=z,
        moments_physical={float(p): float(a[:, k].mean()) for k, p in enumerate(p_set)},
        moments_rescaled={float(p): float(b[:, k].mean()) for k, p in enumerate(p_set)},
        all_converged=ok)
