import numpy as np
import pytest

from gsteady.dissipation import DissipationSpec, psi_e
from gsteady.errors import InputError
from gsteady.kinematics import (AngularQuadrature, angular_average,
                                energy_loss, post_collision_nhat,
                                post_collision_sigma)
from gsteady.restitution import constant, elastic, viscoelastic

from conftest import random_unit

V = np.array([1.0, 0.0, 0.0])
VSTAR = np.array([-1.0, 0.0, 0.0])


def test_quadrature_invariants():
    quad = AngularQuadrature(n_s=16, n_phi=8)
    assert np.sum(quad.weights) == pytest.approx(2.0, abs=1e-13)
    with pytest.raises(InputError):
        AngularQuadrature(n_s=1)
    with pytest.raises(InputError):
        AngularQuadrature(n_phi=0)


def test_grazing_no_change():
    vp, vps = post_collision_sigma(V, VSTAR, np.array([1.0, 0.0, 0.0]),
                                   viscoelastic(1.0))
    np.testing.assert_array_equal(vp, V)
    np.testing.assert_array_equal(vps, VSTAR)


def test_elastic_head_on_exchange():
    vp, vps = post_collision_sigma(V, VSTAR, np.array([-1.0, 0.0, 0.0]),
                                   elastic())
    np.testing.assert_allclose(vp, VSTAR, atol=1e-15)
    np.testing.assert_allclose(vps, V, atol=1e-15)


def test_inelastic_head_on():
    sigma = np.array([-1.0, 0.0, 0.0])
    model = constant(0.5)
    vp, vps = post_collision_sigma(V, VSTAR, sigma, model)
    np.testing.assert_allclose(vp, [-0.5, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(vps, [0.5, 0.0, 0.0], atol=1e-15)
    assert energy_loss(V, VSTAR, sigma, model) == pytest.approx(1.5, rel=1e-14)


def test_equal_velocities_unchanged():
    v = np.array([0.3, -0.2, 1.0])
    vp, vps = post_collision_sigma(v, v, np.array([0.0, 0.0, 1.0]), elastic())
    np.testing.assert_array_equal(vp, v)
    np.testing.assert_array_equal(vps, v)
    assert energy_loss(v, v, np.array([0.0, 0.0, 1.0]), constant(0.3)) == 0.0


def test_nhat_grazing():
    nhat = np.array([0.0, 1.0, 0.0])  # orthogonal to u
    vp, vps = post_collision_nhat(V, VSTAR, nhat, constant(0.5))
    np.testing.assert_array_equal(vp, V)
    np.testing.assert_array_equal(vps, VSTAR)


def test_non_unit_vector_rejected():
    with pytest.raises(InputError):
        post_collision_sigma(V, VSTAR, np.array([1.0, 1.0, 0.0]), elastic())
    with pytest.raises(InputError):
        post_collision_nhat(V, VSTAR, np.array([0.0, 0.0, 1.0 + 1e-9]),
                            elastic())
    with pytest.raises(InputError):
        energy_loss(V, VSTAR, np.array([2.0, 0.0, 0.0]), elastic())


def test_momentum_and_equivalence(models, rng):
    for model in models.values():
        v = rng.normal(size=(2500, 3))
        vstar = rng.normal(size=(2500, 3))
        nhat = random_unit(rng, 2500)
        for k in range(2500):
            u = v[k] - vstar[k]
            un = np.linalg.norm(u)
            uhat = u / un
            sigma = uhat - 2.0 * (uhat @ nhat[k]) * nhat[k]
            sigma /= np.linalg.norm(sigma)
            vp, vps = post_collision_sigma(v[k], vstar[k], sigma, model)
            assert np.max(np.abs(vp + vps - v[k] - vstar[k])) < 1e-12
            vp2, vps2 = post_collision_nhat(v[k], vstar[k], nhat[k], model)
            assert np.max(np.abs(vp - vp2)) < 1e-12
            assert np.max(np.abs(vps - vps2)) < 1e-12


def test_energy_loss_matches_velocity_difference(models, rng):
    for model in models.values():
        for _ in range(200):
            v, vstar = rng.normal(size=3), rng.normal(size=3)
            sigma = random_unit(rng)
            vp, vps = post_collision_sigma(v, vstar, sigma, model)
            direct = (v @ v + vstar @ vstar) - (vp @ vp + vps @ vps)
            loss = energy_loss(v, vstar, sigma, model)
            assert loss >= 0.0
            scale = max(1.0, abs(loss))
            assert abs(loss - direct) < 1e-10 * scale


def test_angular_average_mass_and_momentum():
    quad = AngularQuadrature()
    v, vstar = np.array([0.4, -1.0, 2.0]), np.array([1.1, 0.2, -0.3])
    model = viscoelastic(1.0)
    mass = angular_average(lambda w: np.ones(w.shape[:-1]), v, vstar, model, quad)
    assert abs(mass) < 1e-12
    mom = angular_average(lambda w: w, v, vstar, model, quad)
    assert np.max(np.abs(mom)) < 1e-12


def test_dissipation_bridge(models, rng):
    """|u| times the sphere average of the energy change equals -2 Psi(|u|^2)."""
    quad = AngularQuadrature(n_s=64)
    for model in models.values():
        spec = DissipationSpec(model)
        for _ in range(100):
            v, vstar = rng.normal(size=3), rng.normal(size=3)
            un = float(np.linalg.norm(v - vstar))
            lhs = un * float(angular_average(
                lambda w: np.einsum("...k,...k->...", w, w),
                v, vstar, model, quad))
            ref = -2.0 * psi_e(spec, un * un)
            if model.kind == "constant" and model.e0 == 1.0:
                assert abs(lhs) < 1e-12
            else:
                assert lhs == pytest.approx(ref, rel=1e-6)
