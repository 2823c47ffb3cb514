"""Property batteries behind the `verify` CLI subcommand.

Each check returns a (name, margin, passed) row; margins are oriented so
that non-negative means the property holds with room to spare.
"""

from __future__ import annotations

import numpy as np

from . import maps, povzner, restitution
from .dissipation import (DissipationSpec, gaussian_pair_average, psi_e,
                          theta_limit, zeta_lambda, zeta_zero)
from .kinematics import (AngularQuadrature, angular_average, energy_loss,
                         post_collision_nhat, post_collision_sigma)
from .restitution import (RestitutionModel, constant, elastic, eval_e,
                          power_law, rescale, viscoelastic)


def _models() -> dict[str, RestitutionModel]:
    return {
        "constant_0.3": constant(0.3),
        "constant_0.8": constant(0.8),
        "power_law": power_law(1.0, 0.2),
        "viscoelastic": viscoelastic(1.0),
    }


def check_restitution(n_grid: int = 1000):
    rows = []
    grid = restitution.log_grid(n=n_grid)
    for name, model in _models().items():
        e = eval_e(model, grid)
        rows.append((f"monotone_e[{name}]", float(np.min(e[:-1] - e[1:])), True))
        th = grid * e
        rows.append((f"increasing_theta[{name}]", float(np.min(np.diff(th))), True))
        rows.append((f"range[{name}]",
                     float(min(np.min(e), 1.0 + 1e-15 - np.max(e))), True))
    for name in ("power_law", "viscoelastic"):
        model = _models()[name]
        small = np.logspace(-6, -2, 200)
        gap = np.abs(eval_e(model, small) - (1.0 - model.a * small ** model.gamma))
        ratio = np.max(gap / small ** model.gamma_bar)
        rows.append((f"small_r_expansion[{name}]", float(10.0 - ratio), ratio < 10.0))
    visc = _models()["viscoelastic"]
    res = np.max(np.abs(restitution.implicit_residual(visc, grid)))
    rows.append(("implicit_residual", float(1e-10 - res), res < 1e-10))
    return [(n, m, m >= 0 and ok) for n, m, ok in rows]


def check_kinematics(n_draws: int = 1000, seed: int = 5):
    rng = np.random.default_rng(seed)
    rows = []
    worst_mom = 0.0
    worst_equiv = 0.0
    worst_loss = 0.0
    model = viscoelastic(1.0)
    for _ in range(n_draws):
        v, vstar = rng.normal(size=3), rng.normal(size=3)
        nhat = rng.normal(size=3)
        nhat /= np.linalg.norm(nhat)
        u = v - vstar
        un = np.linalg.norm(u)
        if un == 0:
            continue
        uhat = u / un
        sigma = uhat - 2.0 * (uhat @ nhat) * nhat
        sigma /= np.linalg.norm(sigma)
        vp, vps = post_collision_sigma(v, vstar, sigma, model)
        worst_mom = max(worst_mom, float(np.max(np.abs(vp + vps - v - vstar))))
        vp2, vps2 = post_collision_nhat(v, vstar, nhat, model)
        worst_equiv = max(worst_equiv,
                          float(np.max(np.abs(vp - vp2))),
                          float(np.max(np.abs(vps - vps2))))
        loss = energy_loss(v, vstar, sigma, model)
        worst_loss = min(worst_loss, loss)
    rows.append(("momentum_conservation", 1e-12 - worst_mom, worst_mom < 1e-12))
    rows.append(("parametrization_equivalence", 1e-12 - worst_equiv,
                 worst_equiv < 1e-12))
    rows.append(("energy_loss_nonnegative", -worst_loss, worst_loss >= 0.0))
    return rows


def check_dissipation_bridge(n_pairs: int = 100, seed: int = 7):
    """Micro/macro consistency: |u| <dE>_sigma = -2 Psi_e(|u|^2)."""
    rng = np.random.default_rng(seed)
    quad = AngularQuadrature(n_s=64)
    rows = []
    for name, model in _models().items():
        spec = DissipationSpec(model)
        worst = 0.0
        for _ in range(n_pairs):
            v, vstar = rng.normal(size=3), rng.normal(size=3)
            un = float(np.linalg.norm(v - vstar))
            lhs = un * float(angular_average(
                lambda w: np.einsum("...k,...k->...", w, w), v, vstar, model, quad))
            ref = -2.0 * psi_e(spec, un * un)
            if ref != 0.0:
                worst = max(worst, abs(lhs - ref) / abs(ref))
        rows.append((f"dissipation_bridge[{name}]", 1e-6 - worst, worst < 1e-6))
    return rows


def check_maps(n_grid: int = 1000, seed: int = 11):
    rng = np.random.default_rng(seed)
    rows = []
    grid = np.logspace(-6, 4, n_grid)
    for name, model in _models().items():
        bundle = maps.MapBundle(model)
        eta = np.array([maps.eta_e(bundle, r) for r in grid])
        rows.append((f"eta_sandwich[{name}]",
                     float(min(np.min(eta - grid / 2), np.min(grid - eta))), True))
        alpha = np.array([maps.alpha_e(bundle, s) for s in grid])
        rows.append((f"alpha_sandwich[{name}]",
                     float(min(np.min(alpha - grid), np.min(2 * grid - alpha))), True))
        rt = np.array([maps.alpha_e(bundle, maps.eta_e(bundle, r)) for r in grid])
        worst = float(np.max(np.abs(rt - grid) / np.maximum(1.0, grid)))
        rows.append((f"alpha_eta_roundtrip[{name}]", 1e-10 - worst, worst < 1e-10))
        jac = np.array([maps.jacobian_Je(bundle, r) for r in grid])
        rows.append((f"jacobian_universal_bound[{name}]",
                     float(min(np.min(jac - 0.125), np.min(1.0 - jac))) + 1e-9,
                     bool(np.all(jac >= 0.125 - 1e-9) and np.all(jac <= 1.0 + 1e-9))))
    # Cone map roundtrip and Jacobian.
    worst_rt = 0.0
    worst_jac = 0.0
    for _ in range(200):
        sigma = rng.normal(size=3)
        sigma /= np.linalg.norm(sigma)
        u = rng.normal(size=3)
        uhat = u / np.linalg.norm(u)
        if uhat @ sigma <= -0.9:
            continue
        w = maps.phi_sigma(u, sigma)
        back = maps.varphi_sigma(w, sigma)
        worst_rt = max(worst_rt, float(np.max(np.abs(back - u)))
                       / max(1.0, float(np.linalg.norm(u))))
        det = maps.numerical_jacobian(lambda x: maps.phi_sigma(x, sigma), u)
        worst_jac = max(worst_jac, abs(det - (1.0 + uhat @ sigma) / 8.0))
    rows.append(("cone_roundtrip", 1e-10 - worst_rt, worst_rt < 1e-10))
    rows.append(("cone_jacobian", 1e-6 - worst_jac, worst_jac < 1e-6))
    return [(n, m, (m >= 0 if ok is True else ok)) for n, m, ok in rows]


def check_dissipation(seed: int = 13, n_mc: int = 200_000):
    rng = np.random.default_rng(seed)
    rows = []
    model = power_law(1.0, 0.2)
    spec = DissipationSpec(model)
    grid = np.logspace(-4, 4, 400)
    vals = psi_e(spec, grid)
    rows.append(("psi_nondecreasing", float(np.min(np.diff(vals))), True))
    second = np.diff(np.diff(vals))
    rows.append(("psi_convex_loggrid", float(np.min(second) + 1e-9 * np.max(vals)),
                 bool(np.min(second) >= -1e-9 * np.max(vals))))
    # Pointwise limit of zeta_lambda.
    gaps = [abs(zeta_lambda(spec, lam, 1.0) - zeta_zero(1.0, 0.2, 1.0))
            for lam in (0.5, 0.1, 0.01)]
    rows.append(("zeta_limit_monotone", float(min(np.diff([-g for g in gaps]))),
                 gaps[0] > gaps[1] > gaps[2]))
    # Monte Carlo self-consistency of the limit temperature.
    for g in (0.2, 0.5, 1.0):
        res = theta_limit(1.0, g)
        v = rng.normal(0.0, np.sqrt(res.theta), size=(n_mc, 3))
        w = rng.normal(0.0, np.sqrt(res.theta), size=(n_mc, 3))
        r = np.linalg.norm(v - w, axis=1)
        est = 1.0 / (4.0 + g) * float(np.mean(r ** (3.0 + g)))
        rows.append((f"theta_mc[gamma={g}]", 0.02 - abs(est / 6.0 - 1.0),
                     abs(est / 6.0 - 1.0) < 0.02))
    quad_check = gaussian_pair_average(
        lambda r2: zeta_zero(1.0, 0.2, r2), theta_limit(1.0, 0.2).theta)
    rows.append(("theta_quadrature", 1e-6 - abs(quad_check - 6.0),
                 abs(quad_check - 6.0) < 1e-6))
    return [(n, m, (m >= 0 if ok is True else ok)) for n, m, ok in rows]


def check_povzner(n_pairs: int = 500, seed: int = 17):
    rng = np.random.default_rng(seed)
    quad = AngularQuadrature(n_s=32, n_phi=16)
    rows = []
    for name, model in _models().items():
        for p in (2.0, 3.0):
            _, norms = povzner.battery(p, model, n_pairs, rng, quad)
            worst = float(np.min(norms))
            rows.append((f"povzner_margin[p={p:g},{name}]", worst + 1e-9,
                         worst >= -1e-9))
    # Gain-term upper bound (restitution independent).
    worst = np.inf
    for _ in range(200):
        v, vstar = rng.normal(size=3), rng.normal(size=3)
        for model in _models().values():
            gap = (povzner.gain_upper_bound(v, vstar, 2.0)
                   - povzner.gain_term(v, vstar, 2.0, model, quad))
            e_tot = float(v @ v + vstar @ vstar)
            worst = min(worst, gap / e_tot ** 2)
    rows.append(("gain_upper_bound[p=2]", float(worst) + 1e-9, worst >= -1e-9))
    return rows


SUITES = {
    "maps": (check_maps,),
    "povzner": (check_povzner,),
    "dissipation": (check_dissipation,),
    "fast": (check_restitution, check_kinematics, check_dissipation_bridge,
             check_maps, check_povzner),
    "all": (check_restitution, check_kinematics, check_dissipation_bridge,
            check_maps, check_dissipation, check_povzner),
}


def run_suite(name: str):
    if name not in SUITES:
        raise KeyError(name)
    rows = []
    for check in SUITES[name]:
        if name == "fast" and check is check_povzner:
            rows.extend(check(n_pairs=100))
        elif name == "fast" and check is check_maps:
            rows.extend(check(n_grid=200))
        else:
            rows.extend(check())
    return rows
