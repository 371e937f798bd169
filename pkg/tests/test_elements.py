import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mainproblem import elements as el
from mainproblem.errors import DegeneratePartialsError, SingularChartError

MU = el.DEFAULT_FIELD.mu

ecc = st.floats(1e-6, 0.9)
inc = st.floats(math.radians(1), math.radians(179))
angle = st.floats(-math.pi, math.pi)
sma = st.floats(6600.0, 50000.0)


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), 1.0))


def delaunay(a, e, i, h, g, ell):
    return el.keplerian_to_delaunay(np.array([a, e, i, h, g, ell]), MU)


# -- Kepler's equation ------------------------------------------------------


def test_kepler_examples():
    assert el.solve_kepler(0.7, 0.0) == pytest.approx(0.7, abs=1e-15)
    assert el.solve_kepler(0.0, 0.73) == 0.0
    # Reference root from bisection on E - 0.1 sin E - 1.
    lo, hi = 1.0, 1.1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mid - 0.1 * math.sin(mid) - 1.0 < 0 else (lo, mid)
    assert el.solve_kepler(1.0, 0.1) == pytest.approx(lo, abs=1e-12)
    assert round(float(el.solve_kepler(1.0, 0.1)), 5) == 1.08860


@given(st.floats(-50.0, 50.0), st.floats(0.0, 0.99))
def test_kepler_residual(ell, e):
    E = el.solve_kepler(ell, e)
    assert abs(E - e * math.sin(E) - ell) <= 1e-14 * max(1.0, abs(ell) / math.pi)


@given(st.floats(-20.0, 20.0), st.floats(0.0, 0.95))
def test_kepler_jax_matches_numpy(ell, e):
    E = float(el.kepler_eccentric(jnp.asarray(ell), jnp.asarray(e)))
    assert E == pytest.approx(float(el.solve_kepler(ell, e)), abs=1e-13)


def test_kepler_rejects_bad_input():
    with pytest.raises(ValueError):
        el.solve_kepler(1.0, 1.0)
    with pytest.raises(ValueError):
        el.solve_kepler(float("nan"), 0.1)


def test_kepler_is_continuous_in_ell():
    ell = np.linspace(-20, 20, 4001)
    E = el.solve_kepler(ell, 0.73)
    assert np.all(np.diff(E) > 0)


# -- Anomalies --------------------------------------------------------------


def test_anomaly_examples():
    f, r, phi = el.true_from_eccentric(2.1, 0.0)
    assert f == pytest.approx(2.1) and phi == pytest.approx(0.0, abs=1e-15)
    f, r, phi = el.true_from_eccentric(0.0, 0.73, 24460.0)
    assert r == pytest.approx(24460 * 0.27) and round(r, 1) == 6604.2
    f, _, _ = el.true_from_eccentric(math.pi, 0.5)
    assert f == pytest.approx(math.pi)


@given(st.floats(-30, 30), st.floats(0.0, 0.9))
def test_anomaly_round_trip(E, e):
    f, _, _ = el.true_from_eccentric(E, e)
    assert el.eccentric_from_true(f, e) == pytest.approx(E, abs=1e-12)
    ell = E - e * math.sin(E)
    assert el.mean_from_true(f, e) == pytest.approx(ell, abs=1e-12)


def test_equation_of_center_has_no_jumps():
    E = np.linspace(-30, 30, 20001)
    _, _, phi = el.true_from_eccentric(E, 0.73)
    assert np.max(np.abs(np.diff(phi))) < 0.05


# -- Charts -----------------------------------------------------------------


def test_keplerian_to_delaunay_prisma():
    k = el.KeplerianElements.from_degrees(6878.137, 0.001, 97.42, 168.162, 20, 30)
    d = el.convert(k, "delaunay")
    L = math.sqrt(MU * 6878.137)
    assert d.L == pytest.approx(L, rel=1e-15)
    assert d.G == pytest.approx(L * math.sqrt(1 - 1e-6), rel=1e-15)
    assert d.H == pytest.approx(d.G * math.cos(math.radians(97.42)), rel=1e-14)


def test_circular_equatorial_semi_equinoctial():
    k = el.KeplerianElements(7000.0, 0.0, 0.0, 0.0, 0.0, 0.3)
    q = el.convert(k, "semi_equinoctial")
    assert q.C == 0.0 and q.S == 0.0


def test_gto_round_trip_through_cartesian():
    k = el.KeplerianElements.from_degrees(24460, 0.73, 30, 170.1, 280, 0)
    d = el.convert(k, "delaunay")
    back = el.convert(el.convert(d, "cartesian"), "delaunay")
    x, y = d.as_array(), back.as_array()
    assert rel(el.wrap_angle(y[:3] - x[:3]), 0 * x[:3]) < 1e-11
    assert rel(y[3:], x[3:]) < 1e-11


@given(sma, ecc, inc, angle, angle, angle)
def test_delaunay_polar_nodal_round_trip(a, e, i, h, g, ell):
    x = delaunay(a, e, i, h, g, ell)
    P = el.delaunay_to_polar_nodal(x, MU)
    y = el.polar_nodal_to_delaunay(P, MU)
    assert rel(y[3:], x[3:]) < 1e-11
    # ell and g are individually conditioned like 1/e; their sum and the
    # eccentricity vector are not.
    assert abs(el.wrap_angle((y[0] + y[1]) - (x[0] + x[1]))) < 1e-11
    assert abs(el.wrap_angle(y[2] - x[2])) < 1e-11
    assert e * abs(el.wrap_angle(y[1] - x[1])) < 1e-11


@given(sma, ecc, inc, angle, angle, angle)
def test_polar_nodal_cartesian_round_trip(a, e, i, h, g, ell):
    P = el.delaunay_to_polar_nodal(delaunay(a, e, i, h, g, ell), MU)
    Q = el.cartesian_to_polar_nodal(el.polar_nodal_to_cartesian(P))
    assert rel(Q[[0, 3, 4, 5]], P[[0, 3, 4, 5]]) < 1e-11
    assert np.max(np.abs(el.wrap_angle(Q[1:3] - P[1:3]))) < 1e-11


@given(sma, ecc, inc, angle, angle, angle)
def test_semi_equinoctial_round_trip(a, e, i, h, g, ell):
    x = delaunay(a, e, i, h, g, ell)
    y, circular = el.semi_equinoctial_to_delaunay(el.delaunay_to_semi_equinoctial(x))
    assert not circular
    assert rel(y[3:], x[3:]) < 1e-11
    assert np.max(np.abs(el.wrap_angle(y[:3] - x[:3]))) < 1e-11 / min(1.0, e)


@given(sma, ecc, inc, angle, angle, angle)
def test_keplerian_round_trip(a, e, i, h, g, ell):
    k = np.array([a, e, i, h, g, ell])
    back = el.delaunay_to_keplerian(el.keplerian_to_delaunay(k, MU), MU)
    assert back[0] == pytest.approx(a, rel=1e-13)
    # G stores e only through 1 - e^2, so e itself is good to about eps / e.
    assert abs(back[1] - e) <= 1e-11 * e + 5e-16 / e
    assert back[2] == pytest.approx(i, abs=1e-11)


def test_convert_validates_and_routes():
    k = el.KeplerianElements.from_degrees(7000, 0.1, 50, 10, 20, 30, kind=el.AnomalyKind.TRUE)
    d = el.convert(k, el.DelaunayState)
    f = el.true_from_eccentric(el.solve_kepler(d.ell, d.eccentricity), d.eccentricity).f
    assert el.wrap_angle(f - math.radians(30)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        el.convert(k, "equinoctial")


def test_singular_charts():
    circular = el.PolarNodalState(7000.0, 0.3, 0.2, 0.0, math.sqrt(MU * 7000.0), 0.5 * math.sqrt(MU * 7000.0))
    with pytest.raises(SingularChartError):
        el.convert(circular, "delaunay")
    equatorial = el.CartesianState([7000.0, 0, 0], [0, 7.5, 0])
    with pytest.raises(SingularChartError):
        el.convert(equatorial, "polar_nodal")


def test_state_validation():
    with pytest.raises(ValueError):
        el.DelaunayState(0, 0, 0, 1.0, 1.5, 0.1)
    with pytest.raises(ValueError):
        el.KeplerianElements(7000, 1.2, 0.1, 0, 0, 0)
    with pytest.raises(ValueError):
        el.GravityField(J2=-1e-3)
    assert el.DelaunayState(7.0, -7.0, 4.0, 2.0, 1.0, 0.5).ell == pytest.approx(7.0 - 2 * math.pi)


# -- Partials ---------------------------------------------------------------


_basis_batch = jax.jit(jax.vmap(el._basis_vector, in_axes=(0, None)))


def _fd_partials(x):
    """Fourth-order central differences of every basis function; rows follow BASIS_NAMES."""
    e2 = (x[3] - x[4]) * (x[3] + x[4]) / x[3] ** 2
    s2 = (x[4] - x[5]) * (x[4] + x[5]) / x[4] ** 2
    # e and sin(i) vary on the scales L - G and G - |H|, so the momentum step follows them.
    step = np.where(np.arange(6) < 3, 1e-4, 1e-3 * min(1.0, e2, s2) * x[3])
    d = np.diag(step)
    pts = np.concatenate([x + 2 * d, x + d, x - d, x - 2 * d])
    v = np.asarray(_basis_batch(jnp.asarray(pts), MU)).reshape(4, 6, -1)
    return ((-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * step[:, None])).T


def test_partials_against_finite_differences():
    rng = np.random.default_rng(7)
    n = 1000
    k = np.column_stack([
        rng.uniform(6600, 40000, n), rng.uniform(0.005, 0.9, n), rng.uniform(0.02, 3.12, n),
        rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n),
    ])
    xs = el.keplerian_to_delaunay(k, MU)
    jac = np.asarray(jax.vmap(el._basis_jacobian, in_axes=(0, None))(jnp.asarray(xs), MU))
    scale = np.where(np.arange(6) < 3, 1.0, xs[:, 3:4])  # compare d/d(ln L)-like quantities
    worst = 0.0
    for x, d, sc in zip(xs, jac, scale):
        fd = _fd_partials(x)
        err = np.abs(d - fd) * sc
        worst = max(worst, float(np.max(err / np.max(np.abs(d) * sc, axis=1, keepdims=True))))
        assert np.all(d[:, 1] == 0.0) and np.all(d[:, 2] == 0.0)
    assert worst < 1e-6


def test_partials_examples():
    x = delaunay(7000.0, 0.2, 0.5, 0.0, 0.0, 1.1)
    t = el.partials_at(el.DelaunayState.from_array(x))
    assert t["a"][1][3] == pytest.approx(2 * x[3] / MU, rel=1e-15)
    fd = _fd_partials(x)[el.BASIS_NAMES.index("f"), 0]
    assert t["f"][1][0] == pytest.approx(fd, rel=1e-6)
    nearly = el.partials_at(el.DelaunayState.from_array(delaunay(7000.0, 1e-7, 0.5, 0.0, 0.0, 1.1)))
    assert nearly["f"][1][0] == pytest.approx(1.0, abs=1e-6)


def test_degenerate_partials():
    L = math.sqrt(MU * 7000.0)
    t = el.partials_at(el.DelaunayState(0.3, 0.1, 0.2, L, L, 0.5 * L))
    with pytest.raises(DegeneratePartialsError):
        t["f"]
    value, d = t["a"]
    assert value == pytest.approx(7000.0)
    assert np.all(np.isfinite(d))
