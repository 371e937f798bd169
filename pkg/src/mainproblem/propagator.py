"""End-to-end analytical ephemeris of the J2 problem.

An (S:P) truncation uses secular terms and inverse corrections of order S and
direct periodic corrections of order P <= S.  Fitting maps an osculating
state to mean (double-prime) elements, the secular solution moves those in
closed form, and the direct corrections restore the periodic motion.

Inverse corrections default to the inverse Lie series truncated at order S.
The exact inverse of the truncated direct map (fixed-point iteration) is
available too; the two differ at order S + 1.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from . import elements as el
from . import lie
from .elements import GravityField
from .errors import UsageError
from .oracle import ReferenceTrajectory, conserved
from .secular import SecularState, propagate_secular


@dataclass(frozen=True)
class TruncationSpec:
    S: int
    P: int

    def __post_init__(self):
        if self.S not in (1, 2, 3):
            raise ValueError(f"secular order S must be 1, 2 or 3, got {self.S}")
        if not 0 <= self.P <= self.S:
            raise ValueError(f"direct order P must lie in 0..S, got {self.P}")

    @classmethod
    def parse(cls, text: str) -> "TruncationSpec":
        m = re.fullmatch(r"\s*(\d)\s*:\s*(\d)\s*", text)
        if not m:
            raise ValueError(f"truncation must look like 'S:P', got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self):
        return f"{self.S}:{self.P}"


DEFAULT_SPEC = TruncationSpec(3, 2)


def _osculating_delaunay(initial, field: GravityField) -> np.ndarray:
    """Original Delaunay array of a state in any chart; circular orbits get g = 0."""
    if isinstance(initial, el.DelaunayState):
        return initial.as_array()
    if isinstance(initial, el.CartesianState):
        P = el.cartesian_to_polar_nodal(initial.as_array())
        return el.polar_nodal_to_delaunay(P, field.mu)
    if isinstance(initial, el.PolarNodalState):
        return el.polar_nodal_to_delaunay(initial.as_array(), field.mu)
    return el.convert(initial, "delaunay", field).as_array()


def cartesian_to_delaunay(Y, field: GravityField) -> np.ndarray:
    """(N, 6) Cartesian states to original Delaunay arrays with continuous angles."""
    P = el.cartesian_to_polar_nodal(np.atleast_2d(Y))
    x = el.polar_nodal_to_delaunay(P, field.mu)
    x[:, :3] = np.unwrap(x[:, :3], axis=0)
    return x


DEFAULT_INVERSION = lie.Inversion.SERIES


def mean_elements(xs, order: int, field: GravityField, guard: float | None = None,
                  inversion: lie.Inversion = DEFAULT_INVERSION) -> np.ndarray:
    """Double-prime Delaunay elements of osculating Delaunay arrays (inverse of both stages)."""
    plan = lie.TransformPlan(order, lie.Direction.INVERSE, inversion=lie.Inversion(inversion))
    return lie.apply_plan(plan, xs, field, guard)


@dataclass(frozen=True)
class AnalyticalEphemeris:
    secular: SecularState
    spec: TruncationSpec
    field: GravityField
    direct: lie.TransformPlan
    guard: float | None = None
    inversion: lie.Inversion = DEFAULT_INVERSION

    def mean_delaunay(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Double-prime Delaunay arrays at times t and a mask of near-circular samples."""
        q = np.atleast_2d(propagate_secular(self.secular, np.atleast_1d(t)))
        x, circular = el.semi_equinoctial_to_delaunay(q)
        return x, circular


def fit(initial, spec: TruncationSpec = DEFAULT_SPEC, field: GravityField = el.DEFAULT_FIELD,
        epoch: float = 0.0, guard: float | None = None,
        inversion: lie.Inversion = DEFAULT_INVERSION) -> AnalyticalEphemeris:
    """Initialize the analytical solution from an osculating state in any chart."""
    inversion = lie.Inversion(inversion)
    x = _osculating_delaunay(initial, field)
    mean = mean_elements(x, spec.S, field, guard, inversion)[0]
    sec = SecularState.from_delaunay(mean, spec.S, field, epoch, guard)
    direct = lie.TransformPlan(spec.P, lie.Direction.DIRECT)
    return AnalyticalEphemeris(sec, spec, field, direct, guard, inversion)


@dataclass(frozen=True)
class EphemerisSamples:
    times: np.ndarray
    cartesian: np.ndarray  # (N, 6)
    osculating: np.ndarray  # (N, 6) original Delaunay
    mean: np.ndarray  # (N, 6) double-prime Delaunay
    circular: np.ndarray  # samples whose mean eccentricity is below the circular limit


def ephemeris(eph: AnalyticalEphemeris, t) -> EphemerisSamples:
    """Osculating states of the analytical solution at time(s) t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    mean, circular = eph.mean_delaunay(t)
    osc = lie.apply_plan(eph.direct, mean, eph.field, eph.guard)
    cart = el.polar_nodal_to_cartesian(el.delaunay_to_polar_nodal(osc, eph.field.mu))
    return EphemerisSamples(t, cart, osc, mean, circular)


class Quantity(enum.Enum):
    SMA_RELATIVE = "sma_relative"
    INCLINATION_RELATIVE = "inclination_relative"
    RSS_POSITION = "rss_position"
    RSS_VELOCITY = "rss_velocity"
    ENERGY_RESIDUAL = "energy_residual"


@dataclass(frozen=True)
class ErrorSeries:
    quantity: Quantity
    times: np.ndarray
    values: np.ndarray
    reference_value: float | None = None  # arc mean used as the secular reference

    @property
    def amplitude(self) -> float:
        return float(np.max(np.abs(self.values)))


def secular_series(reference: ReferenceTrajectory, order: int, field: GravityField,
                   guard: float | None = None, inversion: lie.Inversion = DEFAULT_INVERSION) -> np.ndarray:
    """Double-prime Delaunay elements computed from every sample of a reference trajectory."""
    xs = cartesian_to_delaunay(reference.states, field)
    return mean_elements(xs, order, field, guard, inversion)


def rtn_errors(states, reference_states) -> np.ndarray:
    """Radial, along-track and cross-track position differences in the reference's local frame."""
    ref = np.atleast_2d(reference_states)
    diff = np.atleast_2d(states)[:, :3] - ref[:, :3]
    r_hat = ref[:, :3] / np.linalg.norm(ref[:, :3], axis=1)[:, None]
    h = np.cross(ref[:, :3], ref[:, 3:6])
    n_hat = h / np.linalg.norm(h, axis=1)[:, None]
    t_hat = np.cross(n_hat, r_hat)
    return np.stack([np.sum(diff * u, axis=1) for u in (r_hat, t_hat, n_hat)], axis=1)


def error_series(eph: AnalyticalEphemeris, reference: ReferenceTrajectory, quantity, times=None) -> ErrorSeries:
    """Error time series of an ephemeris against a reference trajectory.

    ``sma_relative`` and ``inclination_relative`` apply the inverse corrections
    of order S to each reference sample and report the relative deviation
    from the arithmetic mean of the resulting secular values over the arc.
    The RSS quantities are position (km) and velocity (km/s) differences,
    ``energy_residual`` the relative energy change of the analytical
    trajectory itself.
    """
    quantity = Quantity(quantity)
    if times is not None:
        times = np.asarray(times, dtype=float)
        if times.shape != reference.times.shape or np.any(times != reference.times):
            raise UsageError("requested times do not match the reference time grid")
    t = reference.times
    field = eph.field
    if quantity in (Quantity.SMA_RELATIVE, Quantity.INCLINATION_RELATIVE):
        mean = secular_series(reference, eph.spec.S, field, eph.guard, eph.inversion)
        if quantity is Quantity.SMA_RELATIVE:
            values = mean[:, 3] ** 2 / field.mu
        else:
            values = np.arccos(np.clip(mean[:, 5] / mean[:, 4], -1.0, 1.0))
        ref = float(np.mean(values))
        return ErrorSeries(quantity, t, values / ref - 1.0, ref)
    samples = ephemeris(eph, t)
    if quantity is Quantity.RSS_POSITION:
        values = np.linalg.norm(samples.cartesian[:, :3] - reference.states[:, :3], axis=1)
    elif quantity is Quantity.RSS_VELOCITY:
        values = np.linalg.norm(samples.cartesian[:, 3:] - reference.states[:, 3:], axis=1)
    else:
        energy, _, _ = conserved(samples.cartesian, field)
        values = energy / energy[0] - 1.0
    return ErrorSeries(quantity, t, values)
