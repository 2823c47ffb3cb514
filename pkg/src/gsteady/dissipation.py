"""Energy dissipation potential, its quasi-elastic limit and the
pairwise dissipation functional.

The central object is the potential
    Psi_e(r) = (r^{3/2} / 2) * int_0^1 (1 - e(sqrt(r) z)^2) z^3 dz
whose pair integral against f x f gives the energy dissipation rate.
Its rescalings zeta_lam(r^2) = lam^{-(3+gamma)} Psi_e(lam^2 r^2) converge
pointwise to the closed form zeta_0(r^2) = a/(4+gamma) * r^{3+gamma},
which fixes the temperature of the quasi-elastic limit Maxwellian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from .errors import InputError
from .restitution import RestitutionModel, eval_e


@dataclass(frozen=True)
class DissipationSpec:
    """Quadrature setup for Psi_e built on a restitution model."""

    model: RestitutionModel
    n_z: int = 64
    a: float = field(init=False)
    gamma: float = field(init=False)
    _z: np.ndarray = field(init=False, repr=False)
    _wz: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_z < 8:
            raise InputError("Psi_e quadrature needs at least 8 nodes")
        object.__setattr__(self, "a", self.model.a)
        object.__setattr__(self, "gamma", self.model.gamma)
        z, w = np.polynomial.legendre.leggauss(self.n_z)
        object.__setattr__(self, "_z", 0.5 * (z + 1.0))
        object.__setattr__(self, "_wz", 0.5 * w)


def psi_e(spec: DissipationSpec, r):
    """Energy dissipation potential at squared relative speed r."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0.0):
        raise InputError("psi_e argument must be non-negative")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    speeds = np.sqrt(arr)[..., None] * spec._z
    e = eval_e(spec.model, speeds)
    out = 0.5 * arr ** 1.5 * np.sum((1.0 - e * e) * spec._z ** 3 * spec._wz,
                                    axis=-1)
    return float(out[0]) if scalar else out


def zeta_lambda(spec: DissipationSpec, lam: float, r2):
    """Rescaled potential lam^{-(3+gamma)} Psi_e(lam^2 r^2)."""
    if not 0.0 < lam <= 1.0:
        raise InputError("lambda must lie in (0, 1]")
    g = spec.gamma
    return lam ** (-(3.0 + g)) * psi_e(spec, lam * lam * np.asarray(r2, dtype=float))


def zeta_zero(a: float, gamma: float, r2):
    """Quasi-elastic limit of zeta_lambda: a/(4+gamma) * r^{3+gamma}."""
    return a / (4.0 + gamma) * np.asarray(r2, dtype=float) ** (0.5 * (3.0 + gamma))


def dissipation_functional(velocities, zeta, n_pairs: int | None = None,
                           rng: np.random.Generator | None = None,
                           exact_threshold: int = 2000) -> float:
    """Unbiased pairwise estimate of the double integral f f zeta(|v-v*|^2).

    All N(N-1)/2 pairs are enumerated for small ensembles; larger ones use
    n_pairs uniformly sampled unordered pairs (default 10^6).  The i == j
    diagonal of the population functional vanishes because zeta(0) = 0,
    leaving the (N-1)/N prefactor on the unordered-pair mean.
    """
    vel = np.asarray(velocities, dtype=float)
    if vel.ndim != 2 or vel.shape[1] != 3:
        raise InputError("velocities must have shape (N, 3)")
    n = vel.shape[0]
    if n == 0:
        raise InputError("empty ensemble")
    if n == 1:
        return 0.0
    if n <= exact_threshold and n_pairs is None:
        diff = vel[:, None, :] - vel[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        iu = np.triu_indices(n, k=1)
        mean = float(np.mean(zeta(r2[iu])))
    else:
        m = 1_000_000 if n_pairs is None else int(n_pairs)
        if rng is None:
            rng = np.random.default_rng(0)
        ii = rng.integers(0, n, size=m)
        jj = rng.integers(0, n - 1, size=m)
        jj = jj + (jj >= ii)
        diff = vel[ii] - vel[jj]
        mean = float(np.mean(zeta(np.einsum("ij,ij->i", diff, diff))))
    return (n - 1) / n * mean


@dataclass(frozen=True)
class ThetaResult:
    """Limit temperature by the Gaussian-moment oracle and by the printed
    closed form; the two normalizations disagree and both are reported."""

    theta: float
    theta_paper_formula: float
    method: str = "closed-form-oracle"


def maxwell_relative_speed_moment(theta: float, q: float) -> float:
    """E|V - V*|^q for independent isotropic Gaussians of temperature theta."""
    return (4.0 * theta) ** (0.5 * q) * gamma_fn(0.5 * (q + 3.0)) / gamma_fn(1.5)


def theta_limit(a: float, gamma: float) -> ThetaResult:
    """Temperature of the quasi-elastic limit Maxwellian.

    Solves 6 = a/(4+gamma) * E|V - V*|^{3+gamma} in closed form.  The
    printed-formula variant uses the prefactor 2^{3/2} and the moment of
    pi^{-3/2} exp(-|v|^2/2); it is reported for comparison only.
    """
    if a <= 0.0 or gamma <= 0.0:
        raise InputError("theta_limit requires a > 0 and gamma > 0")
    q = 3.0 + gamma
    theta = 0.25 * (6.0 * (4.0 + gamma) * gamma_fn(1.5)
                    / (a * gamma_fn(0.5 * (6.0 + gamma)))) ** (2.0 / q)
    m_q = 4.0 / np.sqrt(np.pi) * 2.0 ** (0.5 * (q + 1.0)) * gamma_fn(0.5 * (q + 3.0))
    theta_paper = (6.0 * (4.0 + gamma) / (a * 2.0 ** 1.5 * m_q)) ** (2.0 / q)
    return ThetaResult(theta=float(theta), theta_paper_formula=float(theta_paper))


def gaussian_pair_average(zeta, theta: float, n_nodes: int = 100) -> float:
    """E[zeta(|V - V*|^2)] for independent Gaussians of temperature theta.

    Gauss-Laguerre quadrature over the chi-square law of |V - V*|^2 / (4 theta).
    """
    x, w = np.polynomial.laguerre.laggauss(n_nodes)
    dens = 2.0 / np.sqrt(np.pi) * np.sqrt(x)
    return float(np.sum(w * dens * zeta(4.0 * theta * x)))


def steady_temperature_ansatz(spec: DissipationSpec, lam: float,
                              bracket: tuple[float, float] = (1e-3, 1e3)) -> float:
    """Finite-lambda steady temperature under a Gaussian closure.

    Solves 6 = E_T[zeta_lambda(|V - V*|^2)] for the temperature T of a
    Maxwellian ansatz; tends to the theta_limit oracle as lam -> 0.
    """
    def balance(t):
        return gaussian_pair_average(lambda r2: zeta_lambda(spec, lam, r2), t) - 6.0

    return float(brentq(balance, *bracket, xtol=1e-12, rtol=1e-12))
