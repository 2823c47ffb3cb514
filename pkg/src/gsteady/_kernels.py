"""Scalar restitution evaluation and the sequential collision kernel.

Compiled with numba when available; a pure-python fallback keeps the
package importable everywhere (set GSTEADY_DISABLE_NUMBA=1 to force it,
e.g. when debugging the kernel).
"""

import math
import os

import numpy as np

try:
    if os.environ.get("GSTEADY_DISABLE_NUMBA", "").lower() in {"1", "true", "yes"}:
        raise ImportError("numba disabled by environment")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


KIND_CONSTANT = 0
KIND_POWER_LAW = 1
KIND_VISCOELASTIC = 2

# Exponent of the viscoelastic impact-speed dependence, e + a r^{1/5} e^{3/5} = 1.
_VISCO_EXP = 0.2


@njit(cache=True)
def eval_e_scalar(kind, e0, a, gamma, lam, r):
    """Restitution coefficient at impact speed r (lam pre-scales r)."""
    r = lam * r
    if kind == KIND_CONSTANT:
        return e0
    if kind == KIND_POWER_LAW:
        return 1.0 / (1.0 + a * r ** gamma)
    # Viscoelastic implicit law.  With y = e^{1/5} the equation becomes the
    # quintic y^5 + c y^3 = 1, c = a r^{1/5}: increasing and convex on y > 0,
    # so Newton from y = 1 decreases monotonically onto the root.
    if r == 0.0:
        return 1.0
    c = a * r ** _VISCO_EXP
    y = 1.0
    for _ in range(200):
        g = y * y * y * (y * y + c) - 1.0
        dg = y * y * (5.0 * y * y + 3.0 * c)
        step = g / dg
        y -= step
        if abs(step) < 1e-15:
            break
    return y ** 5


@njit(cache=True)
def eval_e_array(kind, e0, a, gamma, lam, r, out):
    for i in range(r.shape[0]):
        out[i] = eval_e_scalar(kind, e0, a, gamma, lam, r[i])
    return out


@njit(cache=True)
def apply_collisions(vel, idx_i, idx_j, accept_u, sigma, umax,
                     kind, e0, a, gamma, lam):
    """Thin candidate pairs and apply accepted collisions in order.

    Mutates vel in place.  Returns (accepted, energy_loss, violated) where
    violated = 1 flags a pair whose relative speed exceeded umax.
    """
    accepted = 0
    loss = 0.0
    for k in range(idx_i.shape[0]):
        i = idx_i[k]
        j = idx_j[k]
        ux = vel[i, 0] - vel[j, 0]
        uy = vel[i, 1] - vel[j, 1]
        uz = vel[i, 2] - vel[j, 2]
        un = math.sqrt(ux * ux + uy * uy + uz * uz)
        if un > umax:
            return accepted, loss, 1
        if un <= 0.0 or accept_u[k] * umax >= un:
            continue
        sx = sigma[k, 0]
        sy = sigma[k, 1]
        sz = sigma[k, 2]
        s = (ux * sx + uy * sy + uz * sz) / un
        if s > 1.0:
            s = 1.0
        elif s < -1.0:
            s = -1.0
        impact = un * math.sqrt(0.5 * (1.0 - s))
        e = eval_e_scalar(kind, e0, a, gamma, lam, impact)
        b = 0.5 * (1.0 + e)
        hx = 0.5 * b * (ux - un * sx)
        hy = 0.5 * b * (uy - un * sy)
        hz = 0.5 * b * (uz - un * sz)
        vel[i, 0] -= hx
        vel[i, 1] -= hy
        vel[i, 2] -= hz
        vel[j, 0] += hx
        vel[j, 1] += hy
        vel[j, 2] += hz
        loss += 0.25 * un * un * (1.0 - s) * (1.0 - e * e)
        accepted += 1
    return accepted, loss, 0


def eval_e_vec(kind, e0, a, gamma, lam, r):
    """Vectorized restitution evaluation for float arrays."""
    r = np.ascontiguousarray(r, dtype=np.float64)
    flat = r.ravel()
    if kind == KIND_CONSTANT:
        return np.full(r.shape, e0)
    if kind == KIND_POWER_LAW:
        return (1.0 / (1.0 + a * (lam * r) ** gamma)).reshape(r.shape)
    out = np.empty_like(flat)
    eval_e_array(kind, e0, a, gamma, lam, flat, out)
    return out.reshape(r.shape)
