import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mainproblem import elements as el
from mainproblem import secular
from mainproblem.errors import ResonanceError
from mainproblem.theory import NearResonanceWarning, dnorm

FIELD = el.DEFAULT_FIELD
MU = FIELD.mu
DAY = 86400.0


def momenta(n, seed):
    """Random (L, G, H) away from the critical inclination."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(6800, 30000, n)
    e = rng.uniform(0.001, 0.7, n)
    s2 = rng.uniform(0.02, 0.98, n)
    s2 = np.where(np.abs(5 * s2 - 4) < 0.1, s2 - 0.2, s2)
    c = np.sqrt(1 - s2) * rng.choice([-1, 1], n)
    L = np.sqrt(MU * a)
    G = L * np.sqrt(1 - e * e)
    return L, G, G * c


def _perturbation(order):
    def k(y):
        b = el.kepler_basis(y, MU)
        return dnorm.secular_hamiltonian(order, b, FIELD) - dnorm.new_hamiltonian(0, b, FIELD)

    return jax.jit(k)


def _fd(fn, x, i, h):
    def at(k):
        y = x.copy()
        y[i] += k * h
        return float(fn(jnp.asarray(y)))

    return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_rates_are_gradients_of_reduced_hamiltonian(order):
    # Fourth-order central differences of the perturbation part; the Kepler
    # part contributes exactly n to the rate of ell.
    k = _perturbation(order)
    L, G, H = momenta(200, order)
    worst = 0.0
    for Li, Gi, Hi in zip(L, G, H):
        x = np.array([0.3, 0.2, 0.1, Li, Gi, Hi])
        n = MU**2 / Li**3
        dL, dG, dH = (_fd(k, x, i, 1e-3 * Gi) for i in (3, 4, 5))
        nF, ng, nh = secular.frequencies(Li, Gi, Hi, order)
        scale = abs(dL) + abs(dG)  # size of the perturbation of each rate
        worst = max(worst, abs(nF - n - dL - dG) / scale, abs(ng - dG) / scale, abs(nh - dH) / scale)
    assert worst < 1e-8


def test_first_order_matches_classical_rates():
    L, G, H = momenta(100, 7)
    for Li, Gi, Hi in zip(L, G, H):
        n = MU**2 / Li**3
        eta, c = Gi / Li, Hi / Gi
        k = FIELD.J2 * (FIELD.Re / (Gi * Gi / MU)) ** 2
        nF, ng, nh = secular.frequencies(Li, Gi, Hi, 1)
        n_ell = n * (1 + 0.75 * k * eta * (3 * c * c - 1))
        assert nF - ng == pytest.approx(n_ell, rel=1e-12)
        assert ng == pytest.approx(0.75 * n * k * (5 * c * c - 1), rel=1e-12, abs=1e-12 * n * k)
        assert nh == pytest.approx(-1.5 * n * k * c, rel=1e-12)


def test_keplerian_limit():
    field = FIELD.replace(J2=0.0)
    L, G, H = momenta(1, 3)
    for order in (1, 2, 3):
        nF, ng, nh = secular.frequencies(L[0], G[0], H[0], order, field)
        assert (nF, ng, nh) == (MU**2 / L[0] ** 3, 0.0, 0.0)


def test_frozen_perigee_at_critical_inclination():
    L = math.sqrt(MU * 7000.0)
    G = 0.99 * L
    H = G * math.sqrt(0.2)
    with pytest.warns(NearResonanceWarning):
        nF, ng, nh = secular.frequencies(L, G, H, 1)
    assert abs(ng) < 1e-12 * abs(nh)
    with pytest.warns(NearResonanceWarning):
        secular.frequencies(L, G, H, 2)
    with pytest.raises(ResonanceError):
        secular.frequencies(L, G, H, 3)


def test_order_validation():
    with pytest.raises(ValueError):
        secular.frequencies(5e4, 4e4, 1e4, 4)


# -- Secular propagation ----------------------------------------------------


def make_state(order=3, e=0.2):
    x = el.keplerian_to_delaunay(np.array([8000.0, e, 0.9, 0.4, 1.2, 2.0]), MU)
    return secular.SecularState.from_delaunay(x, order, epoch=100.0), x


def test_epoch_is_identity():
    sec, x = make_state()
    q = secular.propagate_secular(sec, 100.0)
    np.testing.assert_array_equal(q, el.delaunay_to_semi_equinoctial(x))


def test_quarter_turn_of_eccentricity_vector():
    sec, _ = make_state()
    q = secular.propagate_secular(sec, sec.epoch + 0.5 * math.pi / sec.ng)
    assert q[1] == pytest.approx(-sec.S0, abs=1e-14)
    assert q[2] == pytest.approx(sec.C0, abs=1e-14)


def test_linear_angles_and_constant_momenta():
    sec, _ = make_state()
    t = sec.epoch + np.linspace(0, 30 * DAY, 7)
    q = secular.propagate_secular(sec, t)
    np.testing.assert_allclose(q[:, 0], sec.F0 + sec.nF * (t - sec.epoch), rtol=1e-15)
    np.testing.assert_allclose(q[:, 4], sec.h0 + sec.nh * (t - sec.epoch), rtol=1e-15)
    assert np.all(q[:, 3] == sec.L) and np.all(q[:, 5] == sec.H)


@given(st.floats(0.0, 0.9), st.floats(0.0, 30 * DAY))
def test_eccentricity_is_conserved(e, t):
    sec, _ = make_state(e=e)
    q = secular.propagate_secular(sec, sec.epoch + t)
    assert abs(math.hypot(q[1], q[2]) - sec.eccentricity) < 1e-14


def test_state_validation():
    sec, _ = make_state()
    with pytest.raises(ValueError):
        secular.SecularState(0.0, 0.0, 0.8, 0.8, sec.L, 0.0, 0.1, 1.0, 0.0, 0.0, 3)
    with pytest.raises(ValueError):
        secular.SecularState(0.0, 0.0, 0.1, 0.1, sec.L, 0.0, 2 * sec.L, 1.0, 0.0, 0.0, 3)
    with pytest.raises(ValueError):
        secular.SecularState(0.0, 0.0, 0.1, 0.1, sec.L, 0.0, 0.1, math.nan, 0.0, 0.0, 3)
    assert sec.G == pytest.approx(sec.L * math.sqrt(1 - sec.eccentricity**2), rel=1e-15)
    assert set(sec.as_dict()) >= {"F0", "C0", "S0", "nF", "ng", "nh", "order"}
