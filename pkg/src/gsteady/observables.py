"""Moment, tail, and Maxwellian-distance estimators over ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.stats import maxwell

from .errors import InputError

DEFAULT_P_SET = (1.0, 1.5, 2.0, 3.0)


def _velocities(ensemble) -> np.ndarray:
    vel = getattr(ensemble, "velocities", ensemble)
    vel = np.asarray(vel, dtype=float)
    if vel.ndim != 2 or vel.shape[1] != 3 or vel.shape[0] == 0:
        raise InputError("expected a non-empty (N, 3) velocity array")
    return vel


@dataclass(frozen=True)
class MomentReport:
    moments: dict
    temperature: float


@dataclass(frozen=True)
class TailReport:
    a: float
    value: float
    max_share: float


@dataclass(frozen=True)
class MaxwellianDistance:
    d_moment: float
    d_hist: float


def moments(ensemble, p_set=DEFAULT_P_SET) -> MomentReport:
    """Empirical moments m_p = (1/N) sum |v_i|^{2p}; temperature = m_1 / 3."""
    vel = _velocities(ensemble)
    sq = np.einsum("ij,ij->i", vel, vel)
    mom = {float(p): float(np.mean(sq ** p)) for p in p_set}
    m1 = mom.get(1.0, float(np.mean(sq)))
    return MomentReport(moments=mom, temperature=m1 / 3.0)


def tail_integral(ensemble, a: float) -> TailReport:
    """Empirical mean of exp(a |v|^{3/2}) with a single-sample share flag."""
    if a < 0.0:
        raise InputError("tail rate must be non-negative")
    vel = _velocities(ensemble)
    speeds = np.sqrt(np.einsum("ij,ij->i", vel, vel))
    weights = np.exp(a * speeds ** 1.5)
    total = float(np.sum(weights))
    return TailReport(a=a, value=total / len(weights),
                      max_share=float(np.max(weights)) / total)


def default_tail_rate(ensemble, base: float = 0.1) -> float:
    """Tail rate scaled so a * RMS^{3/2} = base, avoiding sample domination."""
    vel = _velocities(ensemble)
    m1 = float(np.mean(np.einsum("ij,ij->i", vel, vel)))
    return base * m1 ** -0.75 if m1 > 0 else 0.0


def maxwell_moment(theta: float, p: float) -> float:
    """m_p of the temperature-theta Maxwellian: (2 theta)^p Gamma(p+3/2)/Gamma(3/2)."""
    return (2.0 * theta) ** p * gamma_fn(p + 1.5) / gamma_fn(1.5)


def maxwellian_distance(ensemble, theta: float, p_set=DEFAULT_P_SET,
                        n_bins: int = 64) -> MaxwellianDistance:
    """Two surrogate distances to the temperature-theta Maxwellian.

    d_moment sums relative moment deviations over p_set; d_hist is the L1
    distance between the empirical speed histogram (64 bins on [0, 5 sqrt
    theta] plus overflow) and the exact Maxwell speed law.
    """
    if theta <= 0.0:
        raise InputError("temperature must be positive")
    vel = _velocities(ensemble)
    sq = np.einsum("ij,ij->i", vel, vel)
    d_m = sum(abs(float(np.mean(sq ** p)) - maxwell_moment(theta, p))
              / maxwell_moment(theta, p) for p in p_set)
    edges = np.linspace(0.0, 5.0 * np.sqrt(theta), n_bins + 1)
    counts, _ = np.histogram(np.sqrt(sq), bins=edges)
    p_emp = np.append(counts / len(sq), 1.0 - counts.sum() / len(sq))
    cdf = maxwell.cdf(edges, scale=np.sqrt(theta))
    p_exact = np.append(np.diff(cdf), 1.0 - cdf[-1])
    return MaxwellianDistance(d_moment=float(d_m),
                              d_hist=float(np.sum(np.abs(p_emp - p_exact))))
