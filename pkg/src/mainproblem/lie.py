"""Lie-transform machinery on the Delaunay chart.

Phase-space functions are plain jax-traceable callables of the Delaunay array
``x = (ell, g, h, L, G, H)``.  The Poisson bracket ``{A; B}`` is the
derivative of A along the Hamiltonian vector field of B, computed in forward
mode, so brackets nest to any depth and stay exact (no finite differences).

Periodic corrections are applied to the polar-nodal coordinate functions over
the Delaunay chart, which carry no eccentricity divisors, and then converted
back.  Inverse corrections solve the truncated direct map by fixed-point
iteration.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import jax
import jax.numpy as jnp
import numpy as np

from . import elements as el
from .elements import DelaunayState, GravityField, Stage
from .errors import InversionError
from .theory import check_resonance, dnorm, gnorm

Fn = Callable[[jax.Array], jax.Array]

INVERSE_TOL = 1e-13
INVERSE_MAXITER = 20
#: Steps below this level that stop improving on the best step so far are
#: accepted as round-off stagnation.
INVERSE_FLOOR = 1e-9


class Normalization(enum.Enum):
    """The two canonical transformations, in the order they are derived."""

    GNORM = "gnorm"  # removes the argument of perigee
    DNORM = "dnorm"  # removes the mean anomaly


class Direction(enum.Enum):
    DIRECT = "direct"  # new (mean) variables -> old (osculating) variables
    INVERSE = "inverse"


class Inversion(enum.Enum):
    """How the inverse corrections are computed."""

    FIXED_POINT = "fixed_point"  # exact inverse of the truncated direct map
    SERIES = "series"  # inverse Lie series truncated at the same order


# --------------------------------------------------------------------------
# State functions and brackets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StateFunction:
    """A named phase-space function ``fn(x, field)`` of the Delaunay array."""

    name: str
    fn: Callable[[jax.Array, GravityField], jax.Array]

    def __call__(self, state, field: GravityField = el.DEFAULT_FIELD):
        x = state.as_array() if isinstance(state, DelaunayState) else state
        return self.fn(jnp.asarray(x, dtype=float), field)

    @classmethod
    def from_basis(cls, name: str, fn) -> "StateFunction":
        """Wrap ``fn(basis, field)``, where basis is an :class:`~mainproblem.elements.KeplerBasis`."""
        return cls(name, lambda x, field: fn(el.kepler_basis(x, field.mu), field))

    @classmethod
    def coordinate(cls, index: int) -> "StateFunction":
        names = ("ell", "g", "h", "L", "G", "H")
        return cls(names[index], lambda x, field: x[..., index])


def hamiltonian_field(w: Fn) -> Fn:
    """The vector field (dW/dp, -dW/dq) of a scalar function w(x)."""

    def vf(x):
        grad = jax.grad(w)(x)
        return jnp.concatenate([grad[3:], -grad[:3]])

    return vf


def bracket(a: Fn, b: Fn) -> Fn:
    """``{a; b} = sum(da/dq db/dp - da/dp db/dq)``; ``a`` may be vector valued."""
    vf = hamiltonian_field(b)

    def pb(x):
        return jax.jvp(a, (x,), (vf(x),))[1]

    return pb


def poisson_bracket(fa: StateFunction, fb: StateFunction, state, field: GravityField = el.DEFAULT_FIELD) -> float:
    x = jnp.asarray(state.as_array() if isinstance(state, DelaunayState) else state, dtype=float)
    pb = bracket(lambda y: fa.fn(y, field), lambda y: fb.fn(y, field))
    return float(pb(x))


def _sum(fns: Sequence[Fn | None]) -> Fn | None:
    live = [f for f in fns if f is not None]
    if not live:
        return None
    if len(live) == 1:
        return live[0]
    return lambda x: functools.reduce(lambda u, v: u + v, (f(x) for f in live))


def _scaled(c: float, f: Fn | None) -> Fn | None:
    if f is None or c == 0:
        return None
    return f if c == 1 else (lambda x: c * f(x))


def lie_triangle(terms: Sequence[Fn | None], generators: Sequence[Fn], order: int) -> list[Fn | None]:
    """Deprit's recursion ``F(n,q) = F(n+1,q-1) + sum C(n,m) {F(n-m,q-1); W(m+1)}``.

    ``terms[n]`` is F(n,0) (missing or None means zero); ``generators[m]`` is
    W(m+1).  Returns ``[F(0,0), ..., F(0,order)]``, None standing for zero.
    """
    memo: dict[tuple[int, int], Fn | None] = {}

    def F(n, q):
        if (n, q) not in memo:
            if q == 0:
                memo[n, q] = terms[n] if n < len(terms) else None
            else:
                parts = [F(n + 1, q - 1)]
                for m in range(min(n + 1, len(generators))):
                    prev = F(n - m, q - 1)
                    if prev is not None:
                        parts.append(_scaled(math.comb(n, m), bracket(prev, generators[m])))
                memo[n, q] = _sum(parts)
        return memo[n, q]

    return [F(0, q) for q in range(order + 1)]


def series(terms: Sequence[Fn | None]) -> Fn:
    """``sum F(0,k) / k!`` from the output of :func:`lie_triangle`."""
    live = [(k, f) for k, f in enumerate(terms) if f is not None]

    def total(x):
        return functools.reduce(
            lambda u, v: u + v, (f(x) / math.factorial(k) for k, f in live)
        )

    return total


# --------------------------------------------------------------------------
# Generators and Hamiltonians of each stage, as functions of the array x
# --------------------------------------------------------------------------


def generators(stage: Normalization, field: GravityField, order: int = 3) -> list[Fn]:
    """W_1..W_order of a stage as actual phase-space functions."""
    mu = field.mu
    if stage is Normalization.GNORM:
        return [
            (lambda x, m=m: gnorm.generator(m, el.kepler_basis(x, mu), field))
            for m in range(1, order + 1)
        ]
    return [
        (lambda x, m=m: dnorm.scaled_generator(m, el.kepler_basis(x, mu), field))
        for m in range(1, order + 1)
    ]


def hamiltonian_terms(stage: Normalization, field: GravityField) -> list[Fn]:
    """Terms K(m,0) of the Hamiltonian that a stage starts from."""
    mu = field.mu
    if stage is Normalization.GNORM:
        return [
            lambda x: gnorm.kepler_term(el.kepler_basis(x, mu), field),
            lambda x: gnorm.perturbation(el.kepler_basis(x, mu), field),
        ]
    return [
        (lambda x, m=m: gnorm.new_hamiltonian(m, el.kepler_basis(x, mu), field))
        for m in range(4)
    ]


def original_hamiltonian(x, field: GravityField):
    return gnorm.hamiltonian(el.kepler_basis(x, field.mu), field)


def _polar_nodal(field: GravityField) -> Fn:
    mu = field.mu
    return lambda x: el.delaunay_to_polar_nodal(x, mu)


# --------------------------------------------------------------------------
# Periodic corrections
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformPlan:
    """Which stages to apply, to what order and in which direction."""

    order: int
    direction: Direction = Direction.DIRECT
    stages: tuple[Normalization, ...] | None = None
    inversion: Inversion = Inversion.FIXED_POINT

    def __post_init__(self):
        if not 0 <= self.order <= 3:
            raise ValueError(f"order must lie in 0..3, got {self.order}")
        canonical = (Normalization.GNORM, Normalization.DNORM)
        if self.direction is Direction.DIRECT:
            canonical = canonical[::-1]
        if self.stages is None:
            object.__setattr__(self, "stages", canonical)
        elif tuple(self.stages) != tuple(s for s in canonical if s in self.stages):
            raise ValueError(f"stages must follow the sequence {[s.value for s in canonical]}")


def _realign(x, ref):
    """Shift the angles of x by whole turns so that they sit next to ref."""
    x = np.array(x, dtype=float)
    x[..., :3] -= el.TWO_PI * np.round((x[..., :3] - ref[..., :3]) / el.TWO_PI)
    return x


def _split_turns(x):
    """Angles reduced to (-pi, pi] and the whole turns removed, so that the
    corrections work at full precision on long unwrapped arcs."""
    x = np.array(x, dtype=float)
    turns = el.TWO_PI * np.round(x[:, :3] / el.TWO_PI)
    x[:, :3] -= turns
    return x, turns


def polar_nodal_correction(stage: Normalization, order: int, field: GravityField) -> Fn:
    """The map y -> P(x(y)) - P(y) of the truncated direct transformation of a stage."""
    coords = _polar_nodal(field)
    terms = lie_triangle([coords], generators(stage, field, order), order)
    return series([None] + terms[1:])


#: Batches are padded to a multiple of this size so that each kernel compiles once.
CHUNK = 512


@functools.lru_cache(maxsize=None)
def _correction_kernel(stage: Normalization, order: int, field: GravityField):
    corr = polar_nodal_correction(stage, order, field)
    coords = _polar_nodal(field)

    def both(y):
        return coords(y), corr(y)

    return jax.jit(jax.vmap(both))


def _batched(kernel, arr):
    """Run a vmapped kernel over an (N, 6) array in fixed-size padded chunks."""
    n = len(arr)
    padded = -(-n // CHUNK) * CHUNK
    buf = np.empty((padded, arr.shape[1]))
    buf[:n] = arr
    buf[n:] = arr[0]
    outs = [kernel(jnp.asarray(buf[i:i + CHUNK])) for i in range(0, padded, CHUNK)]
    if isinstance(outs[0], tuple):
        return tuple(np.concatenate([np.asarray(o[j]) for o in outs])[:n] for j in range(len(outs[0])))
    return np.concatenate([np.asarray(o) for o in outs])[:n]


def _evaluate(stage, order, field, ys):
    """Polar-nodal coordinates and their corrections for an (N, 6) array."""
    return _batched(_correction_kernel(stage, order, field), ys)


def _from_polar_nodal(P, H, ref, mu):
    x = el.polar_nodal_to_delaunay(P, mu)
    x[:, 5] = H  # H is an exact integral of both stages
    return _realign(x, ref)


def direct_map(stage: Normalization, order: int, field: GravityField, ys) -> np.ndarray:
    """Apply the direct correction of one stage to an (N, 6) array of Delaunay states."""
    ys = np.array(np.atleast_2d(ys), dtype=float)
    if order == 0 or field.J2 == 0:
        return ys
    ys, turns = _split_turns(ys)
    P, D = _evaluate(stage, order, field, ys)
    out = _from_polar_nodal(P + D, ys[:, 5], ys, field.mu)
    out[:, :3] += turns
    return out


def inverse_map(
    stage: Normalization,
    order: int,
    field: GravityField,
    xs,
    tol: float = INVERSE_TOL,
    maxiter: int = INVERSE_MAXITER,
) -> np.ndarray:
    """Invert the direct correction of one stage for an (N, 6) array of states.

    Iterates ``y <- chart(P(x) - D(y))`` where D is the polar-nodal correction,
    until the polar-nodal image of y stops moving (relative to r, 1 rad and
    the circular velocity and angular momentum).  Near-circular states reach
    a round-off floor above ``tol``: the Delaunay chart amplifies round-off
    by about 1/e and the correction feeds the ill-conditioned ell - g
    direction back with a gain of about epsilon / e.  A step below
    ``INVERSE_FLOOR`` that no longer halves the best step seen so far
    therefore also counts as converged.  Raises
    :class:`InversionError` if any sample has not converged.
    """
    xs = np.array(np.atleast_2d(xs), dtype=float)
    if order == 0 or field.J2 == 0:
        return xs
    xs, turns = _split_turns(xs)
    mu = field.mu
    target = el.delaunay_to_polar_nodal(xs, mu)
    r, Theta = target[:, 0], target[:, 4]
    scale = np.stack([r, np.ones_like(r), np.ones_like(r), Theta / r, Theta, Theta], axis=1)
    y = xs
    P, D = _evaluate(stage, order, field, y)
    active = np.ones(len(xs), dtype=bool)
    delta = np.full(len(xs), np.inf)
    best = np.full(len(xs), np.inf)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        y_new = _from_polar_nodal(target[idx] - D[idx], xs[idx, 5], xs[idx], mu)
        P_new, D_new = _evaluate(stage, order, field, y_new)
        delta[idx] = np.max(np.abs(P_new - P[idx]) / scale[idx], axis=1)
        y[idx], P[idx], D[idx] = y_new, P_new, D_new
        stalled = (delta[idx] < INVERSE_FLOOR) & (delta[idx] > 0.5 * best[idx])
        best[idx] = np.minimum(best[idx], delta[idx])
        active[idx] = (delta[idx] > tol) & ~stalled
        if not active.any():
            break
    if active.any():
        raise InversionError(
            f"fixed-point inversion did not converge for {int(active.sum())} of {len(xs)} samples "
            f"(worst step {np.nanmax(delta):.3e})"
        )
    y[:, :3] += turns
    return y


@functools.lru_cache(maxsize=None)
def _series_kernel(stage: Normalization, order: int, field: GravityField):
    """Truncated inverse series of the polar-nodal coordinates, z0 -> z.

    With c_k the order-k coefficient of the direct correction expressed over
    the polar-nodal chart, the inverse solves z = z0 - sum(c_k(z)) order by
    order in the small parameter.
    """
    mu = field.mu
    coords = _polar_nodal(field)
    terms = lie_triangle([coords], generators(stage, field, order), order)

    def phi(k):
        fk = terms[k]
        scale = 1.0 / math.factorial(k)
        return lambda z: scale * fk(el.polar_nodal_to_delaunay(z, mu))

    def d(f, z, v):
        return jax.jvp(f, (z,), (v,))[1]

    def inverse(z0):
        phi1 = phi(1)
        z1 = -phi1(z0)
        if order == 1:
            return z0 + z1
        phi2 = phi(2)
        z2 = -phi2(z0) - d(phi1, z0, z1)
        if order == 2:
            return z0 + z1 + z2
        curvature = d(lambda z: d(phi1, z, z1), z0, z1)
        z3 = -phi(3)(z0) - d(phi2, z0, z1) - d(phi1, z0, z2) - 0.5 * curvature
        return z0 + z1 + z2 + z3

    return jax.jit(jax.vmap(inverse))


def inverse_series_map(stage: Normalization, order: int, field: GravityField, xs) -> np.ndarray:
    """Inverse correction of one stage by the inverse Lie series truncated at ``order``.

    Differs from :func:`inverse_map` by terms of order ``order + 1``, which
    carry the small divisors of the neglected higher-order generators.
    """
    xs = np.array(np.atleast_2d(xs), dtype=float)
    if order == 0 or field.J2 == 0:
        return xs
    xs, turns = _split_turns(xs)
    z0 = el.delaunay_to_polar_nodal(xs, field.mu)
    z = _batched(_series_kernel(stage, order, field), z0)
    y = _from_polar_nodal(z, xs[:, 5], xs, field.mu)
    y[:, :3] += turns
    return y


def _guard_states(xs, guard: float):
    xs = np.atleast_2d(xs)
    s2 = (xs[:, 4] - xs[:, 5]) * (xs[:, 4] + xs[:, 5]) / xs[:, 4] ** 2
    for v in np.unique(np.round(s2, 12)):
        check_resonance(v, guard)


def apply_plan(plan: TransformPlan, xs, field: GravityField, guard: float | None = None) -> np.ndarray:
    """Apply all stages of a plan to an (N, 6) array of Delaunay states."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if plan.order and field.J2:
        _guard_states(xs, guard)
    for stage in plan.stages:
        if plan.direction is Direction.DIRECT:
            xs = direct_map(stage, plan.order, field, xs)
        elif plan.inversion is Inversion.SERIES:
            xs = inverse_series_map(stage, plan.order, field, xs)
        else:
            xs = inverse_map(stage, plan.order, field, xs)
    return xs


_TARGET_STAGE = {
    (Direction.DIRECT, Normalization.DNORM): Stage.PRIME,
    (Direction.DIRECT, Normalization.GNORM): Stage.ORIGINAL,
    (Direction.INVERSE, Normalization.GNORM): Stage.PRIME,
    (Direction.INVERSE, Normalization.DNORM): Stage.DOUBLE_PRIME,
}


def correct_state(state: DelaunayState, plan: TransformPlan, field: GravityField = el.DEFAULT_FIELD,
                  guard: float | None = None) -> DelaunayState:
    """Apply a plan to one state and tag the result with its stage."""
    x = apply_plan(plan, state.as_array(), field, guard)[0]
    stage = state.stage
    if plan.stages and plan.order:
        stage = _TARGET_STAGE[plan.direction, plan.stages[-1]]
    return DelaunayState.from_array(x, stage)


def deprit_transform(
    F: StateFunction,
    stage: Normalization,
    order: int,
    direction: Direction,
    state,
    field: GravityField = el.DEFAULT_FIELD,
    guard: float | None = None,
) -> float:
    """Transform a function of the old variables through one stage.

    Direct: the series ``sum F(0,k)(y) / k!`` for k <= order evaluated at the
    new-variable state y, i.e. F expressed in the new variables.  For the
    Hamiltonian pass ``F`` with ``F.name == "hamiltonian"`` to include the
    perturbation terms K(m,0) of the stage.
    Inverse: F evaluated at the state obtained by inverting the stage.
    """
    if not 0 <= order <= 3:
        raise ValueError("order must lie in 0..3")
    x = np.asarray(state.as_array() if isinstance(state, DelaunayState) else state, dtype=float)
    if order and field.J2:
        _guard_states(x, guard)
    if direction is Direction.INVERSE:
        y = inverse_map(stage, order, field, x)[0]
        return float(F(y, field))
    f0 = lambda y: F.fn(y, field)  # noqa: E731
    if F.name == "hamiltonian":
        terms = hamiltonian_terms(stage, field)
    else:
        terms = [f0]
    out = lie_triangle(terms, generators(stage, field, order), order)
    return float(series(out)(jnp.asarray(x)))


HAMILTONIAN = StateFunction("hamiltonian", original_hamiltonian)
