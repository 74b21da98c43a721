import math

import numpy as np
import pytest

from lamtorus.limit import compare_with_full_system, integrate_limit, steepening_check
from lamtorus.ode import ModelParams


def test_initial_state():
    tr = integrate_limit(2, 1.0, 1e-3)
    st = tr.state(0)
    assert (st.t, st.xi, st.rho, st.phi) == (0.0, 0.0, 0.0, 0.0)
    assert tr.first_integral[0] == 1.0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_conservation(n):
    tr = integrate_limit(n, 50.0, 1e-4)
    assert np.max(np.abs(tr.first_integral - 1.0)) <= 1e-9
    assert tr.sin_phi[-1] >= 0.999
    assert np.all(tr.rho > -1)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_monotone_steepening(n):
    tr = integrate_limit(n, 50.0, 1e-3)
    assert np.all(np.diff(tr.sin_phi) >= -1e-15)
    assert tr.tanh_bound_holds()


def test_xi_bounded_for_n_at_least_3():
    for n in (3, 5):
        tr = integrate_limit(n, 50.0, 1e-3)
        i25 = int(round(25.0 / 1e-3))
        assert tr.xi[-1] - tr.xi[i25] <= 2e-2
        assert tr.xi[-1] < 2.0


def test_xi_grows_logarithmically_for_n2():
    # for n = 2, cos(phi) = 1/(1 + rho) ~ 1/t, so xi(50) - xi(25) tends to ln 2
    tr = integrate_limit(2, 50.0, 1e-3)
    i25 = int(round(25.0 / 1e-3))
    assert tr.xi[-1] - tr.xi[i25] == pytest.approx(math.log(2), abs=0.01)


def test_bad_inputs():
    with pytest.raises(ValueError):
        integrate_limit(1, 1.0, 1e-3)
    with pytest.raises(ValueError):
        integrate_limit(2, -1.0, 1e-3)
    with pytest.raises(ValueError):
        compare_with_full_system(0.1, ModelParams(2, 1.0), 5.0)


def test_deviation_first_order():
    p = ModelParams(2, 1.0)
    d1 = compare_with_full_system(1e-3, p, 5.0)
    d2 = compare_with_full_system(5e-4, p, 5.0)
    assert 1.33 <= d1 / d2 <= 3.0


def test_deviation_smaller_at_lambda_zero():
    for n in (2, 3):
        d0 = compare_with_full_system(1e-3, ModelParams(n, 0.0), 5.0)
        d1 = compare_with_full_system(1e-3, ModelParams(n, 1.0), 5.0)
        assert d0 < d1
    a = compare_with_full_system(1e-3, ModelParams(2, 0.0), 5.0)
    b = compare_with_full_system(5e-4, ModelParams(2, 0.0), 5.0)
    assert a / b > 3.0  # second order when the lambda term is absent


def test_deviation_reflexive():
    p = ModelParams(3, 1.0)
    assert compare_with_full_system(1e-3, p, 2.0) == compare_with_full_system(1e-3, p, 2.0)


@pytest.mark.parametrize("n,lam", [(2, 1.0), (3, 1.0), (5, 2.0)])
def test_steepening_full_system(n, lam):
    rp, T = steepening_check(1e-3, ModelParams(n, lam))
    assert T > 0
    assert rp > 0.8
