"""Secular frequencies and closed-form secular motion in semi-equinoctial variables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import DEFAULT_FIELD, GravityField, delaunay_to_semi_equinoctial
from .theory import check_resonance
from .theory.polynomials import horner
from .theory.tables import RATE_LATITUDE, RATE_NODE, RATE_PERIGEE


def _rows(table):
    """{order: [(power of eta, coefficients), ...]}"""
    out: dict[int, list] = {}
    for (m, i), poly in sorted(table.items()):
        out.setdefault(m, []).append((i, poly.floats()))
    return out


_PSI = _rows(RATE_LATITUDE)
_OMEGA = _rows(RATE_PERIGEE)
_NODE = _rows(RATE_NODE)


def _series(rows, eps, d, eta, s2, order):
    total = 0.0
    for m in range(1, order + 1):
        inner = sum(horner(c, s2) * eta**i for i, c in rows[m])
        total = total + (eps / d) ** m * inner
    return total


def frequencies(L, G, H, order: int, field: GravityField = DEFAULT_FIELD, guard: float | None = None):
    """Secular rates (n_F, n_g, n_h) in rad/s of the reduced Hamiltonian truncated at ``order``.

    ``n_F`` is the rate of the mean argument of latitude ``ell + g``.  The
    critical-inclination guard raises only at order 3, where the divisors
    survive; lower orders merely warn inside the warning band.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    n = field.mu**2 / L**3
    if field.J2 == 0:
        return n, 0.0 * n, 0.0 * n
    eta = G / L
    c = H / G
    s2 = (G - H) * (G + H) / (G * G)
    p = G * G / field.mu
    eps = 0.25 * field.J2 * field.Re**2 / p**2
    if np.ndim(s2) == 0:
        check_resonance(s2, guard if order == 3 else 0.0)
    d = 5.0 * s2 - 4.0
    nF = n + n * _series(_PSI, eps, d, eta, s2, order)
    ng = n * _series(_OMEGA, eps, d, eta, s2, order)
    nh = n * c * _series(_NODE, eps, d, eta, s2, order)
    return nF, ng, nh


@dataclass(frozen=True)
class SecularState:
    """Constants of the secular solution, in the double-prime (mean) chart."""

    epoch: float
    F0: float
    C0: float
    S0: float
    L: float
    h0: float
    H: float
    nF: float
    ng: float
    nh: float
    order: int

    def __post_init__(self):
        if not self.C0**2 + self.S0**2 < 1:
            raise ValueError("need C0^2 + S0^2 < 1")
        if not self.L > 0 or not abs(self.H) < self.L:
            raise ValueError("need L > 0 and |H| < L")
        if not all(math.isfinite(v) for v in (self.nF, self.ng, self.nh)):
            raise ValueError("rates must be finite")

    @property
    def eccentricity(self) -> float:
        return math.hypot(self.C0, self.S0)

    @property
    def G(self) -> float:
        e = self.eccentricity
        return self.L * math.sqrt((1.0 - e) * (1.0 + e))

    @classmethod
    def from_delaunay(cls, x, order: int, field: GravityField = DEFAULT_FIELD, epoch: float = 0.0,
                      guard: float | None = None) -> "SecularState":
        """Build from double-prime Delaunay elements (ell, g, h, L, G, H) at ``epoch``."""
        x = np.asarray(x, dtype=float)
        F, C, S, L, h, H = (float(v) for v in delaunay_to_semi_equinoctial(x))
        nF, ng, nh = frequencies(x[3], x[4], x[5], order, field, guard)
        return cls(epoch, F, C, S, L, h, H, float(nF), float(ng), float(nh), order)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def propagate_secular(sec: SecularState, t) -> np.ndarray:
    """Semi-equinoctial secular point(s) (F, C, S, L, h, H) at time(s) t; shape (..., 6)."""
    dt = np.asarray(t, dtype=float) - sec.epoch
    rot = sec.ng * dt
    cr, sr = np.cos(rot), np.sin(rot)
    F = sec.F0 + sec.nF * dt
    C = sec.C0 * cr - sec.S0 * sr
    S = sec.S0 * cr + sec.C0 * sr
    h = sec.h0 + sec.nh * dt
    ones = np.ones_like(dt)
    return np.stack([F, C, S, sec.L * ones, h, sec.H * ones], axis=-1)
