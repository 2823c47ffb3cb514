"""Restitution-coefficient families and their rescalings.

Three families are provided: a constant coefficient, a power-law form
e(r) = 1/(1 + a r^gamma) and the viscoelastic implicit law
e + a r^{1/5} e^{3/5} = 1.  All share the small-impact behaviour
e(r) = 1 - a r^gamma + O(r^gamma_bar) and may be pre-composed with a
scale factor, e_lam(r) = e(lam * r).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError

CONSTANT = "constant"
POWER_LAW = "power_law"
VISCOELASTIC = "viscoelastic"

_KIND_CODES = {
    CONSTANT: _kernels.KIND_CONSTANT,
    POWER_LAW: _kernels.KIND_POWER_LAW,
    VISCOELASTIC: _kernels.KIND_VISCOELASTIC,
}

VISCO_GAMMA = 0.2
VISCO_GAMMA_BAR = 0.4


@dataclass(frozen=True)
class RestitutionModel:
    """Immutable description of a restitution law e(.).

    gamma_bar is the second-order exponent of the small-impact expansion;
    it defaults to 2*gamma for the power law and 2/5 for viscoelastic.
    """

    kind: str
    e0: float = 1.0
    a: float = 1.0
    gamma: float = VISCO_GAMMA
    gamma_bar: float | None = None
    lambda_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise InputError(f"unknown restitution kind {self.kind!r}")
        if self.kind == CONSTANT and not 0.0 < self.e0 <= 1.0:
            raise InputError("constant restitution requires e0 in (0, 1]")
        if self.kind != CONSTANT and self.a <= 0.0:
            raise InputError("restitution coefficient a must be positive")
        if self.kind == POWER_LAW and not 0.0 < self.gamma <= 1.0:
            raise InputError("power-law exponent gamma must lie in (0, 1]")
        if self.kind == VISCOELASTIC and self.gamma != VISCO_GAMMA:
            object.__setattr__(self, "gamma", VISCO_GAMMA)
        if not 0.0 < self.lambda_scale <= 1.0:
            raise InputError("lambda_scale must lie in (0, 1]")
        if self.gamma_bar is None:
            bar = VISCO_GAMMA_BAR if self.kind == VISCOELASTIC else 2.0 * self.gamma
            object.__setattr__(self, "gamma_bar", bar)
        elif self.gamma_bar <= self.gamma:
            raise InputError("gamma_bar must exceed gamma")

    @property
    def _code(self) -> int:
        return _KIND_CODES[self.kind]


def constant(e0: float) -> RestitutionModel:
    return RestitutionModel(kind=CONSTANT, e0=e0)


def power_law(a: float, gamma: float) -> RestitutionModel:
    return RestitutionModel(kind=POWER_LAW, a=a, gamma=gamma)


def viscoelastic(a: float) -> RestitutionModel:
    return RestitutionModel(kind=VISCOELASTIC, a=a)


def elastic() -> RestitutionModel:
    return constant(1.0)


def eval_e(model: RestitutionModel, r):
    """Restitution coefficient at impact speed r (scalar or array)."""
    arr = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise InputError("impact speed must be finite and non-negative")
    out = _kernels.eval_e_vec(model._code, model.e0, model.a, model.gamma,
                              model.lambda_scale, arr)
    if np.isscalar(r) or arr.ndim == 0:
        return float(np.asarray(out).item())
    return out


def beta(model: RestitutionModel, r):
    """Momentum-transfer fraction (1 + e(r)) / 2, in (1/2, 1]."""
    e = eval_e(model, r)
    return 0.5 * (1.0 + e)


def theta(model: RestitutionModel, r):
    """The mapping r -> r e(r), strictly increasing for admissible laws."""
    return np.asarray(r, dtype=float) * eval_e(model, r)


def rescale(model: RestitutionModel, lam: float) -> RestitutionModel:
    """Model evaluating r -> e(lam * r); rescales compose multiplicatively."""
    if not 0.0 < lam <= 1.0:
        raise InputError("rescale factor must lie in (0, 1]")
    return dataclasses.replace(model, lambda_scale=model.lambda_scale * lam)


def ell_gamma(model: RestitutionModel, grid) -> float:
    """Grid supremum of (1 - e(r)) / r^gamma (finite for admissible laws)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InputError("ell_gamma needs a non-empty grid")
    if np.any(grid <= 0.0):
        raise InputError("ell_gamma grid entries must be positive")
    return float(np.max((1.0 - eval_e(model, grid)) / grid ** model.gamma))


def implicit_residual(model: RestitutionModel, r) -> float:
    """Residual of the viscoelastic implicit equation at the returned root."""
    if model.kind != VISCOELASTIC:
        raise InputError("implicit_residual applies to the viscoelastic law")
    rr = model.lambda_scale * np.asarray(r, dtype=float)
    e = eval_e(model, r)
    return e + model.a * rr ** VISCO_GAMMA * e ** 0.6 - 1.0


def log_grid(lo: float = 1e-8, hi: float = 1e8, n: int = 1000) -> np.ndarray:
    """Log-spaced evaluation grid used by the grid-based invariant checks."""
    return np.logspace(math.log10(lo), math.log10(hi), n)
