"""Post-collision velocity maps and angular averaging over the sphere.

Two equivalent parametrizations of a binary inelastic collision are
implemented: the scattering-direction form (sigma) and the impact-direction
form (n-hat).  Both conserve momentum exactly and dissipate kinetic energy
according to the velocity-dependent restitution law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .restitution import RestitutionModel, beta, eval_e

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class AngularQuadrature:
    """Gauss-Legendre nodes in cos(theta) plus a trapezoid rule in azimuth."""

    n_s: int = 64
    n_phi: int = 32
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_s < 2:
            raise InputError("angular quadrature needs at least 2 nodes")
        if self.n_phi < 1:
            raise InputError("azimuthal rule needs at least 1 node")
        nodes, weights = np.polynomial.legendre.leggauss(self.n_s)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


def _check_unit(vec: np.ndarray, name: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (3,):
        raise InputError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(vec) - 1.0) > UNIT_TOL:
        raise InputError(f"{name} must be a unit vector (tol {UNIT_TOL})")
    return vec


def post_collision_sigma(v, vstar, sigma, model: RestitutionModel):
    """Post-collision velocities in the scattering-direction parametrization."""
    v = np.asarray(v, dtype=float)
    vstar = np.asarray(vstar, dtype=float)
    sigma = _check_unit(sigma, "sigma")
    u = v - vstar
    un = float(np.linalg.norm(u))
    if un == 0.0:
        return v.copy(), vstar.copy()
    s = float(np.clip(u @ sigma / un, -1.0, 1.0))
    impact = un * np.sqrt(0.5 * (1.0 - s))
    b = beta(model, impact)
    h = 0.5 * b * (u - un * sigma)
    return v - h, vstar + h


def post_collision_nhat(v, vstar, nhat, model: RestitutionModel):
    """Post-collision velocities in the impact-direction parametrization."""
    v = np.asarray(v, dtype=float)
    vstar = np.asarray(vstar, dtype=float)
    nhat = _check_unit(nhat, "nhat")
    u = v - vstar
    un_n = float(u @ nhat)
    if un_n == 0.0:
        return v.copy(), vstar.copy()
    e = eval_e(model, abs(un_n))
    h = 0.5 * (1.0 + e) * un_n * nhat
    return v - h, vstar + h


def energy_loss(v, vstar, sigma, model: RestitutionModel) -> float:
    """Kinetic energy dissipated by a single collision (non-negative)."""
    v = np.asarray(v, dtype=float)
    vstar = np.asarray(vstar, dtype=float)
    sigma = _check_unit(sigma, "sigma")
    u = v - vstar
    un = float(np.linalg.norm(u))
    if un == 0.0:
        return 0.0
    s = float(np.clip(u @ sigma / un, -1.0, 1.0))
    impact = un * np.sqrt(0.5 * (1.0 - s))
    e = eval_e(model, impact)
    return 0.25 * un * un * (1.0 - s) * (1.0 - e * e)


def _orthonormal_frame(uhat: np.ndarray):
    pick = np.array([1.0, 0.0, 0.0])
    if abs(uhat[0]) > 0.9:
        pick = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(uhat, pick)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(uhat, e1)
    return e1, e2


def post_collision_grid(v, vstar, model: RestitutionModel,
                        quad: AngularQuadrature):
    """Post-collision velocities on the full sigma quadrature grid.

    Returns (vp, vps, w) with vp, vps of shape (n_s, n_phi, 3) and weights
    w of shape (n_s,) normalized so that sum(w) / n_phi == 1, i.e. the pair
    (w, uniform azimuth) integrates the isotropic kernel 1/(4 pi) d sigma.
    """
    v = np.asarray(v, dtype=float)
    vstar = np.asarray(vstar, dtype=float)
    u = v - vstar
    un = float(np.linalg.norm(u))
    if un == 0.0:
        raise InputError("angular grid undefined for zero relative velocity")
    uhat = u / un
    e1, e2 = _orthonormal_frame(uhat)
    s = quad.nodes
    w = 0.5 * quad.weights
    phi = 2.0 * np.pi * np.arange(quad.n_phi) / quad.n_phi
    sin_t = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
    # sigma[i, j] = s_i uhat + sin_i (cos phi_j e1 + sin phi_j e2)
    sigma = (s[:, None, None] * uhat
             + sin_t[:, None, None] * (np.cos(phi)[None, :, None] * e1
                                       + np.sin(phi)[None, :, None] * e2))
    impact = un * np.sqrt(0.5 * (1.0 - s))
    b = np.asarray(beta(model, impact))
    h = 0.5 * b[:, None, None] * (u - un * sigma)
    return v - h, vstar + h, w


def angular_average(psi, v, vstar, model: RestitutionModel,
                    quad: AngularQuadrature | None = None):
    """Isotropic sphere average of psi(v') + psi(v'*) - psi(v) - psi(v*).

    psi must accept an array of shape (..., 3) and return shape (...) or
    (..., k); the average is taken with the uniform kernel 1/(4 pi).
    """
    if quad is None:
        quad = AngularQuadrature()
    v = np.asarray(v, dtype=float)
    vstar = np.asarray(vstar, dtype=float)
    if np.array_equal(v, vstar):
        return np.zeros_like(np.asarray(psi(v)))
    vp, vps, w = post_collision_grid(v, vstar, model, quad)
    vals = np.asarray(psi(vp)) + np.asarray(psi(vps))
    # Average: Gauss-Legendre in cos(theta), uniform in azimuth.
    avg = np.tensordot(w, vals.mean(axis=1), axes=(0, 0))
    return avg - np.asarray(psi(v)) - np.asarray(psi(vstar))
