import dataclasses

import numpy as np
import pytest

from gsteady.dsmc import EngineConfig, InitialCondition, initial_ensemble
from gsteady.errors import InputError
from gsteady.observables import moments
from gsteady.restitution import power_law
from gsteady.scaling import (ScalePair, lambda_from_mu, pair_from_lambda,
                             rescale_ensemble, scaling_equivalence_test)


def test_scale_pair_invariant():
    pair = pair_from_lambda(0.5, 1.0)
    assert pair.mu == pytest.approx(0.5 ** 4, rel=1e-15)
    with pytest.raises(InputError):
        ScalePair(lam=0.5, gamma=1.0, mu=0.99 * 0.5 ** 4)
    with pytest.raises(InputError):
        pair_from_lambda(1.5, 1.0)


def test_lambda_from_mu():
    assert lambda_from_mu(1.0, 0.2).lam == 1.0
    assert lambda_from_mu(2.0 ** -4, 1.0).lam == pytest.approx(0.5, rel=1e-15)
    lam = 0.37
    back = lambda_from_mu(pair_from_lambda(lam, 0.2).mu, 0.2).lam
    assert back == pytest.approx(lam, rel=1e-14)
    with pytest.raises(InputError):
        lambda_from_mu(0.0, 0.2)
    with pytest.raises(InputError):
        lambda_from_mu(2.0, 0.2)


def test_rescale_ensemble_moments():
    cfg = EngineConfig(n=3000, dt=0.01, mu=0.1, seed=4)
    ens = initial_ensemble(cfg, InitialCondition("maxwellian", t0=1.0))
    lam = 0.25
    scaled = rescale_ensemble(ens, lam)
    m_orig = moments(ens).moments
    m_scaled = moments(scaled).moments
    for p in (1.0, 1.5, 2.0, 3.0):
        assert m_scaled[p] == pytest.approx(lam ** (-2 * p) * m_orig[p],
                                            rel=1e-12)
    assert scaled.t == ens.t
    # Composition and identity.
    twice = rescale_ensemble(rescale_ensemble(ens, 0.5), 0.5)
    np.testing.assert_array_equal(twice.velocities,
                                  rescale_ensemble(ens, 0.25).velocities)
    np.testing.assert_array_equal(rescale_ensemble(ens, 1.0).velocities,
                                  ens.velocities)
    with pytest.raises(InputError):
        rescale_ensemble(ens, 0.0)


def test_equivalence_smoke_lambda_one():
    cfg = EngineConfig(n=1500, dt=0.02, mu=1.0, seed=0, max_steps=1500,
                       window=40, sample_every=5, diss_pairs=5000, tol=0.02)
    model = power_law(1.0, 0.2)
    rep = scaling_equivalence_test(cfg, model, 1.0, seeds=range(3),
                                   init_t0=1.0)
    assert rep.all_converged
    assert set(rep.z_scores) == {1.0, 2.0, 3.0}
    for z in rep.z_scores.values():
        assert np.isfinite(z)
        assert abs(z) < 6.0
    for p in (1.0, 2.0, 3.0):
        assert rep.moments_physical[p] == pytest.approx(
            rep.moments_rescaled[p], rel=0.2)
    with pytest.raises(InputError):
        scaling_equivalence_test(cfg, model, 1.5, seeds=range(2))
