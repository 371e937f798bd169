"""Orbital-element charts of the Kepler problem and the conversions between them.

Units are km, km/s, rad and s throughout.  The array-level converters take the
six coordinates of a chart on the last axis and accept either numpy arrays or
jax arrays, so the same code serves the vectorized ephemeris pipeline and the
differentiable basis used by the perturbation theory.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import jax
import jax.numpy as jnp
import numpy as np

from .errors import (
    DegeneratePartialsError,
    KeplerConvergenceError,
    SingularChartError,
)

jax.config.update("jax_enable_x64", True)

TWO_PI = 2.0 * math.pi

#: Below this eccentricity the argument of perigee is undefined.
CIRCULAR_LIMIT = 1e-9
#: Below this sin(I) the node is undefined.
EQUATORIAL_LIMIT = 1e-9

KEPLER_TOL = 1e-14
KEPLER_MAXITER = 50


@dataclass(frozen=True)
class GravityField:
    """Central body of the J2 main problem."""

    mu: float = 398600.4415
    Re: float = 6378.1363
    J2: float = 1.08262617e-3

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.Re > 0:
            raise ValueError(f"Re must be positive, got {self.Re}")
        if not 0 <= self.J2 < 0.1:
            raise ValueError(f"J2 must lie in [0, 0.1), got {self.J2}")

    def replace(self, **changes) -> "GravityField":
        return GravityField(**{**self.__dict__, **changes})


DEFAULT_FIELD = GravityField()


class Stage(enum.Enum):
    """Which side of the canonical transformations a Delaunay state lives on."""

    ORIGINAL = "original"
    PRIME = "prime"
    DOUBLE_PRIME = "double_prime"


class AnomalyKind(enum.Enum):
    MEAN = "mean"
    ECCENTRIC = "eccentric"
    TRUE = "true"


def wrap_angle(x):
    """Reduce angles to the interval (-pi, pi]."""
    xp = _ns(x)
    return x - TWO_PI * xp.ceil((x - math.pi) / TWO_PI)


def _ns(*arrays):
    return jnp if any(isinstance(a, jax.Array) for a in arrays) else np


# --------------------------------------------------------------------------
# State types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DelaunayState:
    ell: float
    g: float
    h: float
    L: float
    G: float
    H: float
    stage: Stage = Stage.ORIGINAL

    def __post_init__(self):
        if not (0 < self.G <= self.L * (1 + 1e-15)):
            raise ValueError(f"need 0 < G <= L, got G={self.G}, L={self.L}")
        if not abs(self.H) <= self.G * (1 + 1e-15):
            raise ValueError(f"need |H| <= G, got H={self.H}, G={self.G}")
        for name in ("ell", "g", "h"):
            object.__setattr__(self, name, float(wrap_angle(float(getattr(self, name)))))

    def as_array(self) -> np.ndarray:
        return np.array([self.ell, self.g, self.h, self.L, self.G, self.H])

    @classmethod
    def from_array(cls, x, stage: Stage = Stage.ORIGINAL) -> "DelaunayState":
        x = np.asarray(x, dtype=float)
        return cls(*(float(v) for v in x[:6]), stage=stage)

    @property
    def eccentricity(self) -> float:
        return math.sqrt(max((self.L - self.G) * (self.L + self.G), 0.0)) / self.L

    @property
    def sin2_inclination(self) -> float:
        return (self.G - self.H) * (self.G + self.H) / self.G**2


@dataclass(frozen=True)
class KeplerianElements:
    a: float
    e: float
    inc: float
    raan: float
    argp: float
    anomaly: float
    kind: AnomalyKind = AnomalyKind.MEAN

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"semimajor axis must be positive, got {self.a}")
        if not 0 <= self.e < 1:
            raise ValueError(f"eccentricity must lie in [0, 1), got {self.e}")
        if not 0 <= self.inc <= math.pi:
            raise ValueError(f"inclination must lie in [0, pi], got {self.inc}")

    @classmethod
    def from_degrees(cls, a, e, inc, raan, argp, anomaly, kind=AnomalyKind.MEAN):
        r = math.radians
        return cls(a, e, r(inc), r(raan), r(argp), r(anomaly), kind)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.e, self.inc, self.raan, self.argp, self.anomaly])


@dataclass(frozen=True)
class PolarNodalState:
    r: float
    theta: float
    nu: float
    R: float
    Theta: float
    N: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("radius must be positive")
        if not self.Theta > 0:
            raise ValueError("angular momentum must be positive")
        if not abs(self.N) <= self.Theta * (1 + 1e-15):
            raise ValueError("need |N| <= Theta")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.nu, self.R, self.Theta, self.N])


@dataclass(frozen=True)
class CartesianState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        vel = np.asarray(self.velocity, dtype=float)
        if pos.shape[-1] != 3 or vel.shape != pos.shape:
            raise ValueError("position and velocity must be 3-vectors of equal shape")
        if np.any(np.linalg.norm(pos, axis=-1) == 0):
            raise ValueError("position must be nonzero")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity], axis=-1)

    @classmethod
    def from_array(cls, y) -> "CartesianState":
        y = np.asarray(y, dtype=float)
        return cls(y[..., :3], y[..., 3:6])


@dataclass(frozen=True)
class SemiEquinoctialState:
    """Mean argument of latitude, nodal eccentricity vector, and the momenta L, H."""

    F: float
    C: float
    S: float
    L: float
    h: float
    H: float

    def __post_init__(self):
        if not self.C**2 + self.S**2 < 1:
            raise ValueError("need C^2 + S^2 < 1")
        if not self.L > 0:
            raise ValueError("L must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.F, self.C, self.S, self.L, self.h, self.H])


# --------------------------------------------------------------------------
# Kepler's equation
# --------------------------------------------------------------------------


def solve_kepler(ell, e):
    """Eccentric anomaly E with E - e sin E = ell, in the same revolution as ell.

    Newton iteration from ``ell + e sin ell``; a step that leaves the bracket
    ``[ell - e, ell + e]`` (which always contains the root) is replaced by
    bisection.  Raises :class:`KeplerConvergenceError` if any element has not
    converged after 50 iterations.
    """
    ell = np.asarray(ell, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any((e < 0) | (e >= 1)):
        raise ValueError("eccentricity must lie in [0, 1)")
    if not np.all(np.isfinite(ell)):
        raise ValueError("mean anomaly must be finite")
    ell_w = wrap_angle(ell)
    ell_w, e = np.broadcast_arrays(ell_w, e)
    lo = ell_w - e
    hi = ell_w + e
    E = ell_w + e * np.sin(ell_w)
    done = np.zeros(E.shape, dtype=bool)
    for _ in range(KEPLER_MAXITER):
        res = E - e * np.sin(E) - ell_w
        lo = np.where(res < 0, E, lo)
        hi = np.where(res > 0, E, hi)
        step = res / (1.0 - e * np.cos(E))
        trial = E - step
        outside = (trial < lo) | (trial > hi)
        trial = np.where(outside & (hi > lo), 0.5 * (lo + hi), trial)
        E = np.where(done, E, trial)
        done |= np.abs(E - e * np.sin(E) - ell_w) <= 0.25 * KEPLER_TOL
        if done.all():
            break
    residual = np.abs(E - e * np.sin(E) - ell_w)
    if np.any(residual > KEPLER_TOL):
        raise KeplerConvergenceError(
            f"Kepler's equation did not converge: residual {residual.max():.3e}"
        )
    return ell + (E - ell_w)


def _kepler_iterate(ell_w, e):
    lo = ell_w - e
    hi = ell_w + e
    E0 = ell_w + e * jnp.sin(ell_w)

    def body(_, carry):
        E, lo, hi = carry
        res = E - e * jnp.sin(E) - ell_w
        lo = jnp.where(res < 0, E, lo)
        hi = jnp.where(res > 0, E, hi)
        trial = E - res / (1.0 - e * jnp.cos(E))
        outside = (trial < lo) | (trial > hi)
        trial = jnp.where(outside & (hi > lo), 0.5 * (lo + hi), trial)
        # Converged entries stay put.
        return jnp.where(jnp.abs(res) <= 0.25 * KEPLER_TOL, E, trial), lo, hi

    E, _, _ = jax.lax.fori_loop(0, KEPLER_MAXITER, body, (E0, lo, hi))
    return E


@jax.custom_jvp
def kepler_eccentric(ell, e):
    """Differentiable eccentric anomaly for jax code, continuous in ell.

    Derivatives come from implicit differentiation of Kepler's equation,
    so they are exact to all orders rather than differentiated iterations.
    """
    ell_w = ell - TWO_PI * jnp.round(ell / TWO_PI)
    E_w = _kepler_iterate(ell_w, e)
    return ell + (E_w - ell_w)


@kepler_eccentric.defjvp
def _kepler_eccentric_jvp(primals, tangents):
    ell, e = primals
    d_ell, d_e = tangents
    E = kepler_eccentric(ell, e)
    dE = (d_ell + jnp.sin(E) * d_e) / (1.0 - e * jnp.cos(E))
    return E, dE


def _kepler(ell, e):
    if _ns(ell, e) is jnp:
        return kepler_eccentric(ell, e)
    return solve_kepler(ell, e)


class Anomalies(NamedTuple):
    f: object
    r: object
    phi: object


def true_from_eccentric(E, e, a=1.0) -> Anomalies:
    """True anomaly, radius and equation of the center from the eccentric anomaly.

    The true anomaly is advanced from E by a bounded increment, so it winds
    together with E and the equation of the center ``f - ell`` never jumps.
    """
    xp = _ns(E, e)
    eta = xp.sqrt((1.0 - e) * (1.0 + e))
    b = e / (1.0 + eta)
    f = E + 2.0 * xp.arctan(b * xp.sin(E) / (1.0 - b * xp.cos(E)))
    r = a * (1.0 - e * xp.cos(E))
    ell = E - e * xp.sin(E)
    return Anomalies(f, r, f - ell)


def eccentric_from_true(f, e):
    xp = _ns(f, e)
    eta = xp.sqrt((1.0 - e) * (1.0 + e))
    b = e / (1.0 + eta)
    return f - 2.0 * xp.arctan(b * xp.sin(f) / (1.0 + b * xp.cos(f)))


def mean_from_true(f, e):
    xp = _ns(f, e)
    E = eccentric_from_true(f, e)
    return E - e * xp.sin(E)


# --------------------------------------------------------------------------
# Array-level conversions (last axis holds the six coordinates)
# --------------------------------------------------------------------------


def _split(x):
    return tuple(x[..., i] for i in range(6))


def _stack(xp, *cols):
    return xp.stack(cols, axis=-1)


def _ecc(L, G, xp):
    return xp.sqrt(xp.maximum((L - G) * (L + G), 0.0)) / L


def delaunay_to_polar_nodal(x, mu: float):
    """(ell, g, h, L, G, H) -> (r, theta, nu, R, Theta, N)."""
    xp = _ns(x)
    ell, g, h, L, G, H = _split(x)
    a = L * L / mu
    e = _ecc(L, G, xp)
    E = _kepler(ell, e)
    f, r, _ = true_from_eccentric(E, e, a)
    R = mu / G * e * xp.sin(f)
    return _stack(xp, r, f + g, h, R, G, H)


def polar_nodal_to_delaunay(P, mu: float):
    """(r, theta, nu, R, Theta, N) -> (ell, g, h, L, G, H); g = 0 on circular orbits."""
    xp = _ns(P)
    r, theta, nu, R, Theta, N = _split(P)
    p = Theta * Theta / mu
    ecf = p / r - 1.0
    esf = R * Theta / mu
    e = xp.hypot(ecf, esf)
    f = xp.arctan2(esf, ecf)
    inv_a = 2.0 / r - (R * R + (Theta / r) ** 2) / mu
    L = xp.sqrt(mu / inv_a)
    # Keep f on the same winding as theta so that g stays near its source.
    g = wrap_angle(theta - f) if xp is np else theta - f
    f = theta - g
    ell = mean_from_true(f, e)
    return _stack(xp, ell, g, nu, L, Theta, N)


def polar_nodal_to_cartesian(P):
    xp = _ns(P)
    r, theta, nu, R, Theta, N = _split(P)
    c = N / Theta
    s = xp.sqrt(xp.maximum((Theta - N) * (Theta + N), 0.0)) / Theta
    cn, sn = xp.cos(nu), xp.sin(nu)
    ct, st = xp.cos(theta), xp.sin(theta)
    u = (cn * ct - sn * st * c, sn * ct + cn * st * c, st * s)
    w = (-cn * st - sn * ct * c, -sn * st + cn * ct * c, ct * s)
    vt = Theta / r
    return _stack(xp, *(r * ui for ui in u), *(R * ui + vt * wi for ui, wi in zip(u, w)))


def cartesian_to_polar_nodal(Y):
    """Raises :class:`SingularChartError` for equatorial states, where the node is undefined."""
    Y = np.asarray(Y, dtype=float)
    pos, vel = Y[..., :3], Y[..., 3:6]
    r = np.linalg.norm(pos, axis=-1)
    hvec = np.cross(pos, vel)
    Theta = np.linalg.norm(hvec, axis=-1)
    hxy = np.hypot(hvec[..., 0], hvec[..., 1])
    if np.any(hxy < EQUATORIAL_LIMIT * Theta):
        raise SingularChartError("equatorial orbit: the node is undefined")
    nu = np.arctan2(hvec[..., 0], -hvec[..., 1])
    along = pos[..., 0] * np.cos(nu) + pos[..., 1] * np.sin(nu)
    theta = np.arctan2(pos[..., 2] * Theta / hxy, along)
    R = np.einsum("...i,...i->...", pos, vel) / r
    return np.stack([r, theta, nu, R, Theta, hvec[..., 2]], axis=-1)


def keplerian_to_delaunay(k, mu: float):
    """(a, e, I, node, perigee, mean anomaly) -> Delaunay."""
    xp = _ns(k)
    a, e, inc, raan, argp, ell = _split(k)
    L = xp.sqrt(mu * a)
    G = L * xp.sqrt((1.0 - e) * (1.0 + e))
    return _stack(xp, ell, argp, raan, L, G, G * xp.cos(inc))


def delaunay_to_keplerian(x, mu: float):
    xp = _ns(x)
    ell, g, h, L, G, H = _split(x)
    inc = xp.arctan2(xp.sqrt(xp.maximum((G - H) * (G + H), 0.0)), H)
    return _stack(xp, L * L / mu, _ecc(L, G, xp), inc, h, g, ell)


def delaunay_to_semi_equinoctial(x):
    xp = _ns(x)
    ell, g, h, L, G, H = _split(x)
    e = _ecc(L, G, xp)
    return _stack(xp, ell + g, e * xp.cos(g), e * xp.sin(g), L, h, H)


def semi_equinoctial_to_delaunay(q):
    """Inverse of :func:`delaunay_to_semi_equinoctial`.

    Returns the Delaunay array and a boolean mask of samples whose
    eccentricity is below the circular limit; those get g = 0.
    """
    xp = _ns(q)
    F, C, S, L, h, H = _split(q)
    e = xp.hypot(C, S)
    circular = e < CIRCULAR_LIMIT
    g = xp.where(circular, 0.0, xp.arctan2(S, C))
    G = L * xp.sqrt((1.0 - e) * (1.0 + e))
    return _stack(xp, F - g, g, h, L, G, H), circular


# --------------------------------------------------------------------------
# Chart-level conversion
# --------------------------------------------------------------------------

_CHART_OF = {
    DelaunayState: "delaunay",
    KeplerianElements: "keplerian",
    PolarNodalState: "polar_nodal",
    CartesianState: "cartesian",
    SemiEquinoctialState: "semi_equinoctial",
}
_CLASS_OF = {v: k for k, v in _CHART_OF.items()}


def _keplerian_mean(k: KeplerianElements) -> np.ndarray:
    arr = k.as_array()
    if k.kind is AnomalyKind.ECCENTRIC:
        arr[5] = k.anomaly - k.e * math.sin(k.anomaly)
    elif k.kind is AnomalyKind.TRUE:
        arr[5] = mean_from_true(k.anomaly, k.e)
    return arr


def _to_delaunay(state, field: GravityField) -> tuple[np.ndarray, Stage]:
    mu = field.mu
    if isinstance(state, DelaunayState):
        return state.as_array(), state.stage
    if isinstance(state, KeplerianElements):
        return keplerian_to_delaunay(_keplerian_mean(state), mu), Stage.ORIGINAL
    if isinstance(state, SemiEquinoctialState):
        x, circular = semi_equinoctial_to_delaunay(state.as_array())
        if circular:
            raise SingularChartError("near-circular orbit: the argument of perigee is undefined")
        return x, Stage.ORIGINAL
    if isinstance(state, CartesianState):
        state = PolarNodalState(*cartesian_to_polar_nodal(state.as_array()))
    P = state.as_array()
    x = polar_nodal_to_delaunay(P, mu)
    if _ecc(x[3], x[4], np) < CIRCULAR_LIMIT:
        raise SingularChartError("near-circular orbit: the argument of perigee is undefined")
    return x, Stage.ORIGINAL


def convert(state, target, field: GravityField = DEFAULT_FIELD):
    """Convert a state to another chart.

    ``target`` is a chart name (``"delaunay"``, ``"keplerian"``,
    ``"polar_nodal"``, ``"cartesian"``, ``"semi_equinoctial"``) or the state
    class.  Keplerian output uses the mean anomaly.
    """
    if isinstance(target, type):
        target = _CHART_OF[target]
    if target not in _CLASS_OF:
        raise ValueError(f"unknown chart {target!r}")
    source = _CHART_OF[type(state)]
    if source == target:
        return state
    mu = field.mu

    # Polar-nodal and Cartesian convert into each other without the eccentricity.
    if source == "cartesian" and target == "polar_nodal":
        return PolarNodalState(*cartesian_to_polar_nodal(state.as_array()))
    if target == "cartesian" and source in ("polar_nodal", "delaunay", "keplerian", "semi_equinoctial"):
        if source == "polar_nodal":
            P = state.as_array()
        else:
            x, _ = _to_delaunay(state, field)
            P = delaunay_to_polar_nodal(x, mu)
        return CartesianState.from_array(polar_nodal_to_cartesian(P))

    x, stage = _to_delaunay(state, field)
    if target == "delaunay":
        return DelaunayState.from_array(x, stage)
    if target == "keplerian":
        return KeplerianElements(*delaunay_to_keplerian(x, mu).tolist())
    if target == "semi_equinoctial":
        return SemiEquinoctialState(*delaunay_to_semi_equinoctial(x).tolist())
    return PolarNodalState(*delaunay_to_polar_nodal(x, mu).tolist())


# --------------------------------------------------------------------------
# Differentiable basis functions of the Delaunay variables
# --------------------------------------------------------------------------


class KeplerBasis(NamedTuple):
    """Keplerian quantities as functions of (ell, g, h, L, G, H)."""

    ell: object
    g: object
    h: object
    L: object
    G: object
    H: object
    a: object
    e: object
    eta: object
    p: object
    s: object
    c: object
    r: object
    f: object
    E: object
    phi: object
    beta: object  # 1 / (1 + eta)
    n: object


BASIS_NAMES = ("a", "e", "eta", "p", "s", "c", "r", "f", "E", "phi", "beta", "n")
_SINGULAR_AT_CIRCULAR = ("e", "r", "f", "E", "phi")


def kepler_basis(x, mu: float) -> KeplerBasis:
    """Evaluate the basis on a jax array ``x = (ell, g, h, L, G, H)``."""
    ell, g, h, L, G, H = (x[..., i] for i in range(6))
    eta = G / L
    e = jnp.sqrt((L - G) * (L + G)) / L
    c = H / G
    s = jnp.sqrt((G - H) * (G + H)) / G
    a = L * L / mu
    p = G * G / mu
    E = kepler_eccentric(ell, e)
    f, r, phi = true_from_eccentric(E, e, a)
    n = mu * mu / L**3
    return KeplerBasis(ell, g, h, L, G, H, a, e, eta, p, s, c, r, f, E, phi, 1.0 / (1.0 + eta), n)


@dataclass(frozen=True)
class PartialsTable:
    """Values and first partials of the basis functions at one state.

    Rows that are unbounded on a (near-)circular orbit raise
    :class:`DegeneratePartialsError` when accessed; the others stay available.
    """

    values: dict
    partials: dict
    degenerate: frozenset = field(default_factory=frozenset)

    def __getitem__(self, name: str) -> tuple[float, np.ndarray]:
        if name in self.degenerate:
            raise DegeneratePartialsError(f"partials of {name!r} are unbounded at e < {CIRCULAR_LIMIT}")
        return self.values[name], self.partials[name]

    def __contains__(self, name):
        return name in self.values


@jax.jit
def _basis_vector(x, mu):
    b = kepler_basis(x, mu)
    return jnp.stack([getattr(b, k) for k in BASIS_NAMES])


_basis_jacobian = jax.jit(jax.jacfwd(_basis_vector))


def partials_at(state: DelaunayState, field: GravityField = DEFAULT_FIELD) -> PartialsTable:
    """Values and partials d(b)/d(ell, g, h, L, G, H) for every basis function."""
    x = state.as_array()
    if _ecc(x[3], x[4], np) < CIRCULAR_LIMIT:
        # Evaluate on a slightly eccentric neighbour so that the regular rows are finite.
        degenerate = frozenset(_SINGULAR_AT_CIRCULAR)
        x = x.copy()
        x[4] = x[3] * math.sqrt(1.0 - (10 * CIRCULAR_LIMIT) ** 2)
    else:
        degenerate = frozenset()
    vals = np.asarray(_basis_vector(jnp.asarray(x), field.mu))
    jac = np.asarray(_basis_jacobian(jnp.asarray(x), field.mu))
    return PartialsTable(
        values={k: float(v) for k, v in zip(BASIS_NAMES, vals)},
        partials={k: jac[i] for i, k in enumerate(BASIS_NAMES)},
        degenerate=degenerate,
    )
