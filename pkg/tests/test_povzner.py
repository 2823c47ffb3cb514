import numpy as np
import pytest

from gsteady import povzner
from gsteady.dissipation import DissipationSpec, psi_e
from gsteady.errors import InputError
from gsteady.kinematics import AngularQuadrature
from gsteady.restitution import elastic, viscoelastic

QUAD = AngularQuadrature(n_s=32, n_phi=16)


def test_case_constants():
    for p in (2.0, 3.0):
        case = povzner.PovznerCase(p)
        assert case.a_const == 2.0 ** (p - 1.0)
        assert case.k_const * 2.0 ** (p - 2.0) == pytest.approx(5.0 / 96.0)
        assert case.a_const > 0.0 and case.k_const > 0.0
    with pytest.raises(InputError):
        povzner.PovznerCase(0.5)
    with pytest.raises(InputError):
        povzner.check_inequality([1.0, 0, 0], [0, 1.0, 0], 1.5, elastic())


def test_p1_is_dissipation_bridge(models, rng):
    """The p = 1 angular kernel equals -2 Psi(|u|^2)/|u|."""
    for model in models.values():
        spec = DissipationSpec(model)
        for _ in range(20):
            v, vstar = rng.normal(size=3), rng.normal(size=3)
            un = float(np.linalg.norm(v - vstar))
            val = povzner.angular_kernel(v, vstar, 1.0, model,
                                         AngularQuadrature(n_s=64))
            ref = -2.0 * psi_e(spec, un * un) / un
            if model.kind == "constant" and model.e0 == 1.0:
                assert abs(val) < 1e-12
            else:
                assert val == pytest.approx(ref, rel=1e-6)


def test_elastic_p1_zero(rng):
    v, vstar = rng.normal(size=3), rng.normal(size=3)
    assert abs(povzner.angular_kernel(v, vstar, 1.0, elastic(), QUAD)) < 1e-12


def test_elastic_antipodal_p2():
    """For v* = -v the center of mass vanishes: elastically |v'| = |v| on the
    whole sphere, so the kernel value is exactly 0 (the quadrature must agree
    with this 1-D reduction to tight tolerance)."""
    v = np.array([1.3, -0.4, 0.2])
    val = povzner.angular_kernel(v, -v, 2.0, elastic(), QUAD)
    assert abs(val) <= 1e-8
    assert val <= 1e-8  # never above the symmetry-reduced value


def test_zero_pair_margin():
    z = np.zeros(3)
    assert povzner.angular_kernel(z, z, 2.0, elastic(), QUAD) == 0.0
    assert povzner.check_inequality(z, z, 2.0, elastic(), QUAD) == 0.0


def test_margins_battery(models, rng):
    for model in models.values():
        for p in (2.0, 3.0):
            margins, norms = povzner.battery(p, model, 400, rng, QUAD)
            assert norms.shape == (400,)
            assert np.min(norms) >= -1e-9


def test_batch_matches_per_pair(models, rng):
    v = rng.normal(size=(15, 3))
    vstar = rng.normal(size=(15, 3))
    for model in models.values():
        batch = povzner._batch_kernel(v, vstar, 3.0, model, QUAD)
        ref = [povzner.angular_kernel(v[k], vstar[k], 3.0, model, QUAD)
               for k in range(15)]
        np.testing.assert_allclose(batch, ref, rtol=1e-10, atol=1e-10)


def test_gain_upper_bound(models, rng):
    for _ in range(100):
        v, vstar = rng.normal(size=3), rng.normal(size=3)
        for model in models.values():
            for p in (2.0, 3.0):
                gain = povzner.gain_term(v, vstar, p, model, QUAD)
                bound = povzner.gain_upper_bound(v, vstar, p)
                e_tot = float(v @ v + vstar @ vstar)
                assert gain <= bound + 1e-9 * e_tot ** p


def test_refit_k_positive(rng):
    k = povzner.refit_k(2.0, viscoelastic(1.0), 50, rng, QUAD)
    assert k > 0.0
    # The printed constant must not exceed the refit headroom.
    assert povzner.PovznerCase(2.0).k_const <= k
