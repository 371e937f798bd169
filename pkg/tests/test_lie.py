import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mainproblem import elements as el
from mainproblem import lie
from mainproblem.errors import ResonanceError
from mainproblem.theory import dnorm, gnorm

FIELD = el.DEFAULT_FIELD
MU = FIELD.mu
STAGES = (lie.Normalization.GNORM, lie.Normalization.DNORM)
ELL, G_, H_, L_, GG, HH = (lie.StateFunction.coordinate(i) for i in range(6))
K00 = lie.StateFunction.from_basis("kepler", gnorm.kepler_term)
SMA = lie.StateFunction.from_basis("a", lambda b, f: b.a)
RADIUS = lie.StateFunction.from_basis("r", lambda b, f: b.r)
ECC_SIN = lie.StateFunction.from_basis("e sin f", lambda b, f: b.e * jnp.sin(b.f + b.g) * jnp.cos(b.h))


def random_states(n, seed, e_range=(0.001, 0.7), a_range=(6800, 30000), i_range=(0.1, 1.0)):
    rng = np.random.default_rng(seed)
    k = np.column_stack([
        rng.uniform(*a_range, n), rng.uniform(*e_range, n), rng.uniform(*i_range, n),
        rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n),
    ])
    return el.keplerian_to_delaunay(k, MU)


states = st.builds(
    lambda a, e, i, h, g, ell: el.keplerian_to_delaunay(np.array([a, e, i, h, g, ell]), MU),
    st.floats(6800, 30000), st.floats(0.01, 0.7), st.floats(0.1, 1.0),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
)


# -- Brackets ---------------------------------------------------------------


def test_canonical_pairs():
    x = random_states(1, 0)[0]
    assert lie.poisson_bracket(ELL, L_, x) == 1.0
    assert lie.poisson_bracket(L_, ELL, x) == -1.0
    assert lie.poisson_bracket(G_, GG, x) == 1.0
    assert lie.poisson_bracket(ELL, GG, x) == 0.0


def test_bracket_with_kepler_term_is_mean_motion():
    x = random_states(1, 1)[0]
    n = MU**2 / x[3] ** 3
    assert lie.poisson_bracket(ELL, K00, x) == pytest.approx(n, rel=1e-14)


@pytest.mark.parametrize("stage", STAGES)
def test_polar_momentum_commutes_with_generators(stage):
    xs = jnp.asarray(random_states(20, 2))
    for w in lie.generators(stage, FIELD):
        pb = jax.vmap(lie.bracket(lambda y: y[5], w))(xs)
        assert np.all(np.asarray(pb) == 0.0)


@settings(max_examples=30)
@given(states)
def test_bracket_antisymmetry(x):
    ab = lie.poisson_bracket(SMA, ECC_SIN, x)
    ba = lie.poisson_bracket(ECC_SIN, SMA, x)
    assert ab == pytest.approx(-ba, rel=1e-12, abs=1e-300)


@settings(max_examples=30)
@given(states)
def test_bracket_leibniz(x):
    prod = lie.StateFunction("r e sin f", lambda y, f: RADIUS.fn(y, f) * ECC_SIN.fn(y, f))
    lhs = lie.poisson_bracket(prod, SMA, x)
    rhs = RADIUS(x) * lie.poisson_bracket(ECC_SIN, SMA, x) + ECC_SIN(x) * lie.poisson_bracket(RADIUS, SMA, x)
    scale = abs(float(RADIUS(x) * lie.poisson_bracket(ECC_SIN, SMA, x))) + abs(float(ECC_SIN(x) * lie.poisson_bracket(RADIUS, SMA, x)))
    assert abs(lhs - float(rhs)) <= 1e-10 * scale


def test_state_function_gradient_matches_finite_differences():
    x = random_states(1, 3, e_range=(0.1, 0.5))[0]
    grad = np.asarray(jax.grad(lambda y: RADIUS.fn(y, FIELD))(jnp.asarray(x)))
    for i in range(6):
        step = 1e-5 if i < 3 else 1e-5 * x[3]
        up, dn = x.copy(), x.copy()
        up[i] += step
        dn[i] -= step
        fd = (float(RADIUS(up)) - float(RADIUS(dn))) / (2 * step)
        assert fd == pytest.approx(grad[i], rel=1e-6, abs=1e-6 * np.max(np.abs(grad * np.r_[1, 1, 1, x[3:]])) / (1 if i < 3 else x[3]))


# -- Deprit triangle --------------------------------------------------------


def test_first_order_transform_of_sma():
    # {a; W1} = -(2L/mu) dW1/dl with {f; g} = f_q g_p - f_p g_q.
    xs = jnp.asarray(random_states(100, 4))
    w1 = lie.generators(lie.Normalization.GNORM, FIELD, 1)[0]
    first = lie.lie_triangle([lambda y: SMA.fn(y, FIELD)], [w1], 1)[1]
    got = np.asarray(jax.jit(jax.vmap(first))(xs))
    dwdl = np.asarray(jax.vmap(jax.grad(w1))(xs))[:, 0]
    want = -2.0 * np.asarray(xs[:, 3]) / MU * dwdl
    eps = 0.25 * FIELD.J2 * (FIELD.Re / 6800.0) ** 2
    scale = np.maximum(np.abs(want), eps * np.asarray(xs[:, 3]) ** 2 / MU)  # near zeros of the correction
    assert np.max(np.abs(got - want) / scale) < 1e-12
    # The same number through the public scalar interface.
    x = np.asarray(xs[0])
    value = lie.deprit_transform(SMA, lie.Normalization.GNORM, 1, lie.Direction.DIRECT, x)
    assert value == pytest.approx(float(SMA(x)) + want[0], rel=1e-14)


def test_transform_orders_and_polar_momentum():
    x = random_states(1, 5)[0]
    for stage in STAGES:
        assert lie.deprit_transform(SMA, stage, 0, lie.Direction.DIRECT, x) == float(SMA(x))
        for m in (1, 2, 3):
            for direction in lie.Direction:
                assert lie.deprit_transform(HH, stage, m, direction, x) == x[5]


def test_hamiltonian_transform_reaches_new_hamiltonian():
    x = random_states(1, 6)[0]
    b = el.kepler_basis(jnp.asarray(x), MU)
    want = sum(float(gnorm.new_hamiltonian(m, b, FIELD)) / math.factorial(m) for m in range(4))
    got = lie.deprit_transform(lie.HAMILTONIAN, lie.Normalization.GNORM, 3, lie.Direction.DIRECT, x)
    assert got == pytest.approx(want, rel=1e-15)


def test_transform_guard():
    L = math.sqrt(MU * 7000.0)
    G = 0.99 * L
    x = np.array([0.1, 0.2, 0.3, L, G, G * math.sqrt(0.2)])
    with pytest.raises(ResonanceError):
        lie.deprit_transform(SMA, lie.Normalization.GNORM, 1, lie.Direction.DIRECT, x)


# -- Plans and corrections ---------------------------------------------------


def test_plan_validation():
    assert lie.TransformPlan(2, lie.Direction.INVERSE).stages == STAGES
    assert lie.TransformPlan(2).stages == STAGES[::-1]
    with pytest.raises(ValueError):
        lie.TransformPlan(4)
    with pytest.raises(ValueError):
        lie.TransformPlan(1, lie.Direction.INVERSE, stages=STAGES[::-1])
    only = lie.TransformPlan(1, lie.Direction.DIRECT, stages=(lie.Normalization.GNORM,))
    assert only.stages == (lie.Normalization.GNORM,)


def test_zero_oblateness_is_identity():
    field = FIELD.replace(J2=0.0)
    s = el.DelaunayState.from_array(random_states(1, 7)[0], el.Stage.DOUBLE_PRIME)
    for direction in lie.Direction:
        out = lie.correct_state(s, lie.TransformPlan(3, direction), field)
        assert np.array_equal(out.as_array(), s.as_array())


def test_correct_state_tags_stage():
    s = el.DelaunayState.from_array(random_states(1, 8)[0], el.Stage.DOUBLE_PRIME)
    out = lie.correct_state(s, lie.TransformPlan(2, lie.Direction.DIRECT))
    assert out.stage is el.Stage.ORIGINAL
    back = lie.correct_state(out, lie.TransformPlan(2, lie.Direction.INVERSE))
    assert back.stage is el.Stage.DOUBLE_PRIME


def _relative(y, x):
    ang = np.abs(el.wrap_angle(y[:, :3] - x[:, :3]))
    mom = np.abs(y[:, 3:] - x[:, 3:]) / x[:, 3:4]
    return np.maximum(ang.max(axis=1), mom.max(axis=1))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_direct_inverts_inverse(order):
    xs = random_states(1000, 10 + order, e_range=(0.01, 0.7))
    xs[:, :3] += 2 * np.pi * np.array([3, -2, 5])  # angles far from the principal range
    plan = lie.TransformPlan(order, lie.Direction.INVERSE)
    mean = lie.apply_plan(plan, xs, FIELD)
    back = lie.apply_plan(lie.TransformPlan(order), mean, FIELD)
    assert np.array_equal(mean[:, 5], xs[:, 5]) and np.array_equal(back[:, 5], xs[:, 5])
    assert np.max(np.abs(back[:, :3] - xs[:, :3])) < 1e-9  # no spurious whole turns
    # The inverse is solved on the polar-nodal chart; the ell and g of a
    # low-eccentricity orbit individually carry its round-off times 1/e.
    e = np.sqrt(1 - (xs[:, 4] / xs[:, 3]) ** 2)
    err = _relative(back, xs)
    assert np.max(err * np.minimum(e, 1.0)) < 1e-11
    assert np.max(np.abs(el.wrap_angle(back[:, 0] + back[:, 1] - xs[:, 0] - xs[:, 1]))) < 1e-11


def test_near_circular_states_invert():
    xs = random_states(200, 20, e_range=(1e-4, 2e-3))
    for inversion in lie.Inversion:
        plan = lie.TransformPlan(3, lie.Direction.INVERSE, inversion=inversion)
        mean = lie.apply_plan(plan, xs, FIELD)
        assert np.all(np.isfinite(mean))


def test_series_and_fixed_point_inverse_agree_to_next_order():
    xs = random_states(100, 30, e_range=(0.05, 0.3), a_range=(7000, 9000))
    eps = 0.25 * FIELD.J2 * (FIELD.Re / 7000.0) ** 2
    diffs = []
    for order in (1, 2, 3):
        fixed = lie.apply_plan(lie.TransformPlan(order, lie.Direction.INVERSE), xs, FIELD)
        series = lie.apply_plan(
            lie.TransformPlan(order, lie.Direction.INVERSE, inversion=lie.Inversion.SERIES), xs, FIELD
        )
        diffs.append(np.max(np.abs(series[:, 3:5] - fixed[:, 3:5]) / xs[:, 3:4]))
    assert diffs[0] < 100 * eps**2
    for lo, hi in zip(diffs[1:], diffs[:-1]):
        assert lo < 100 * eps * hi


def test_canonical_invariance_improves_with_order():
    # |K(x) - sum eps^m/m! K0m(inverse(x))| shrinks by about J2 per order.
    xs = random_states(50, 40, e_range=(0.01, 0.2), a_range=(6800, 8000))
    K = np.array([float(lie.original_hamiltonian(jnp.asarray(x), FIELD)) for x in xs])
    res = []
    for S in (1, 2, 3):
        mean = lie.apply_plan(lie.TransformPlan(S, lie.Direction.INVERSE, inversion=lie.Inversion.SERIES), xs, FIELD)
        kk = jax.vmap(lambda y: dnorm.secular_hamiltonian(S, el.kepler_basis(y, MU), FIELD))(jnp.asarray(mean))
        res.append(np.max(np.abs(K - np.asarray(kk)) / np.abs(K)))
    for lo, hi in zip(res[1:], res[:-1]):
        assert FIELD.J2 / 30 < lo / hi < 30 * FIELD.J2
