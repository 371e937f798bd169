"""Reference solution of the untruncated J2 problem by numerical integration.

The integrator is an adaptive Dormand-Prince 8(5,3) scheme with its
seventh-order dense output, run in extended precision (``np.longdouble``,
64-bit mantissa on x86) with compensated summation of the state and time.
That leaves the truncation error, rather than coefficient or accumulation
round-off, as the dominant error at double-precision tolerances.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import _dop853_tableau as tab
from .elements import (
    DEFAULT_FIELD,
    CartesianState,
    GravityField,
    cartesian_to_polar_nodal,
    delaunay_to_polar_nodal,
    polar_nodal_to_cartesian,
    polar_nodal_to_delaunay,
)
from .errors import AccuracyError, IntegrationError

LD = np.longdouble

DRIFT_LIMIT = 1e-12
TOL_RANGE = (1e-14, 1e-10)
MAX_STEPS = 5_000_000
#: The step controller aims at this fraction of the requested tolerance.
SAFETY = 0.25

_NODES = np.array([LD(v) for v in tab.NODES])
_A = np.zeros((16, 16), dtype=LD)
for _i, _j, _v in tab.MATRIX:
    _A[_i, _j] = LD(_v)
_B = _A[12, :12].copy()
_E3 = np.zeros(13, dtype=LD)
_E3[:12] = _B
for _i, _v in tab.ERROR3_SHIFT:
    _E3[_i] -= LD(_v)
_E5 = np.zeros(13, dtype=LD)
for _i, _v in tab.ERROR5:
    _E5[_i] = LD(_v)
_D = np.zeros((4, 16), dtype=LD)
for _i, _j, _v in tab.DENSE:
    _D[_i, _j] = LD(_v)


def acceleration(y, field: GravityField):
    """Time derivative of the Cartesian state under the J2 potential (any float dtype)."""
    x, yy, z = y[0], y[1], y[2]
    r2 = x * x + yy * yy + z * z
    r = np.sqrt(r2)
    k = -field.mu / (r2 * r)
    f = 1.5 * field.J2 * field.Re * field.Re / r2
    zz = 5.0 * z * z / r2
    planar = k * (1.0 + f * (1.0 - zz))
    return np.array([y[3], y[4], y[5], planar * x, planar * yy, k * (1.0 + f * (3.0 - zz)) * z], dtype=y.dtype)


def conserved(state, field: GravityField = DEFAULT_FIELD):
    """Energy, total angular momentum and its polar component of a Cartesian state.

    The energy is ``v^2/2 - mu/r - (mu/r)(Re/r)^2 J2 (1 - 3 sin^2(lat))/2``.
    Works on a single state or on an (N, 6) array, in any float dtype.
    """
    y = state.as_array() if isinstance(state, CartesianState) else np.asarray(state)
    pos, vel = y[..., :3], y[..., 3:6]
    r2 = np.sum(pos * pos, axis=-1)
    r = np.sqrt(r2)
    sin2 = pos[..., 2] ** 2 / r2
    energy = 0.5 * np.sum(vel * vel, axis=-1) - field.mu / r - field.mu / r * field.Re**2 / r2 * field.J2 * (1.0 - 3.0 * sin2) / 2.0
    h = np.cross(pos, vel)
    return energy, np.sqrt(np.sum(h * h, axis=-1)), h[..., 2]


@dataclass(frozen=True)
class ReferenceTrajectory:
    times: np.ndarray
    states: np.ndarray  # (N, 6) km, km/s
    energy: np.ndarray
    polar_momentum: np.ndarray
    metadata: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> CartesianState:
        return CartesianState.from_array(self.states[i])

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])) / abs(self.energy[0]))

    @property
    def polar_momentum_drift(self) -> float:
        return float(np.max(np.abs(self.polar_momentum - self.polar_momentum[0])) / abs(self.polar_momentum[0]))

    def to_csv(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "y", "z", "vx", "vy", "vz", "energy", "N"])
            for t, s, e, n in zip(self.times, self.states, self.energy, self.polar_momentum):
                w.writerow([_fmt(t), *(_fmt(v) for v in s), _fmt(e), _fmt(n)])
        tmp.replace(path)

    @classmethod
    def from_csv(cls, path, metadata: dict | None = None) -> "ReferenceTrajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1:7], data[:, 7], data[:, 8], dict(metadata or {}))


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _error_norm(K, h, y, y_new, tol):
    scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
    e5 = (_E5 @ K[:13]) / scale
    e3 = (_E3 @ K[:13]) / scale
    n5 = e5 @ e5
    n3 = e3 @ e3
    if n5 == 0 and n3 == 0:
        return LD(0)
    return abs(h) * n5 / np.sqrt((n5 + 0.01 * n3) * 6)


def integrate(
    initial: CartesianState,
    times,
    field: GravityField = DEFAULT_FIELD,
    tol: float = 1e-14,
    t0: float | None = None,
    check_drift: bool = True,
) -> ReferenceTrajectory:
    """Integrate the J2 problem from ``initial`` (at ``t0``, default ``times[0]``).

    ``times`` must be monotone and all on one side of t0.  Samples come from
    the dense-output polynomial of the step that contains them.  Raises
    :class:`IntegrationError` when the step size underflows and
    :class:`AccuracyError` when the relative drift of the energy or of the
    polar angular momentum exceeds 1e-12.
    """
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ValueError(f"tolerance must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or not np.all(np.isfinite(times)):
        raise ValueError("times must be a non-empty 1-D array of finite values")
    t0 = float(times[0]) if t0 is None else float(t0)
    span = times - t0
    direction = 1.0 if span[-1] >= 0 else -1.0
    if np.any(np.diff(times) * direction < 0) or np.any(span * direction < 0):
        raise ValueError("times must be monotone and on one side of t0")

    y = initial.as_array().astype(LD)
    y_comp = np.zeros(6, dtype=LD)
    t = LD(0)
    t_comp = LD(0)
    t_end = LD(float(abs(span[-1])))
    out = np.empty((len(times), 6), dtype=LD)
    targets = [LD(float(abs(s))) for s in span]
    k_out = 0
    while k_out < len(targets) and targets[k_out] == 0:
        out[k_out] = y
        k_out += 1

    sign = LD(direction)

    def rhs(state):
        return sign * acceleration(state, field)

    K = np.empty((16, 6), dtype=LD)
    f = rhs(y)
    r0 = float(np.sqrt(np.sum(y[:3] ** 2)))
    v0 = float(np.sqrt(np.sum(y[3:] ** 2)))
    h = LD(min(0.01 * r0 / v0, float(t_end) if t_end > 0 else 1.0))
    n_accept = n_reject = 0
    tol_ld = LD(tol) * LD(SAFETY)
    while k_out < len(targets):
        if n_accept + n_reject > MAX_STEPS:
            raise IntegrationError("step budget exhausted")
        if t + h > t_end:
            h = t_end - t
        if h <= abs(t) * 1e-18 or h == 0:
            raise IntegrationError(f"step size underflow at t = {float(t):.6g} s")
        K[0] = f
        for s in range(1, 12):
            K[s] = rhs(y + h * (_A[s, :s] @ K[:s]))
        incr = h * (_B @ K[:12])
        y_new = y + incr
        K[12] = rhs(y_new)
        err = _error_norm(K, h, y, y_new, tol_ld)
        if err > 1:
            n_reject += 1
            h *= LD(max(0.2, 0.9 * float(err) ** (-1 / 8)))
            continue
        # Compensated update of the state and of the time.
        inc_c = incr - y_comp
        y_sum = y + inc_c
        y_comp = (y_sum - y) - inc_c
        h_c = h - t_comp
        t_sum = t + h_c
        t_comp = (t_sum - t) - h_c
        t_old, y_old, f_old = t, y, f
        t, y, f = t_sum, y_sum, K[12].copy()
        n_accept += 1
        if k_out < len(targets) and targets[k_out] <= t:
            for s in range(13, 16):
                K[s] = rhs(y_old + h * (_A[s, :s] @ K[:s]))
            dy = y - y_old
            poly = np.empty((7, 6), dtype=LD)
            poly[0] = dy
            poly[1] = h * f_old - dy
            poly[2] = 2 * dy - h * (f + f_old)
            poly[3:] = h * (_D @ K)
            while k_out < len(targets) and targets[k_out] <= t:
                if targets[k_out] == t:
                    out[k_out] = y
                else:
                    x = (targets[k_out] - t_old) / h
                    acc = np.zeros(6, dtype=LD)
                    for i, row in enumerate(poly[::-1]):
                        acc += row
                        acc *= x if i % 2 == 0 else 1 - x
                    out[k_out] = y_old + acc
                k_out += 1
        factor = 10.0 if err == 0 else min(10.0, max(0.2, 0.9 * float(err) ** (-1 / 8)))
        h *= LD(factor)

    energy, _, N = conserved(out, field)
    meta = {
        "method": "DOP853, extended precision, compensated summation",
        "tolerance": tol,
        "accepted_steps": n_accept,
        "rejected_steps": n_reject,
        "function_evaluations": 12 * (n_accept + n_reject) + 1,
        "t0": t0,
    }
    traj = ReferenceTrajectory(
        times=times.copy(),
        states=out.astype(float),
        energy=energy.astype(float),
        polar_momentum=N.astype(float),
        metadata=meta,
    )
    e_drift = float(np.max(np.abs(energy - energy[0])) / abs(energy[0]))
    n_drift = float(np.max(np.abs(N - N[0])) / abs(N[0])) if N[0] != 0 else 0.0
    meta["energy_drift"] = e_drift
    meta["polar_momentum_drift"] = n_drift
    if check_drift:
        if e_drift > DRIFT_LIMIT:
            raise AccuracyError("energy", e_drift, DRIFT_LIMIT)
        if n_drift > DRIFT_LIMIT:
            raise AccuracyError("polar angular momentum", n_drift, DRIFT_LIMIT)
    return traj


def kepler_two_body(initial: CartesianState, times, mu: float) -> np.ndarray:
    """Closed-form two-body propagation through the Delaunay chart (used as a test oracle)."""
    x0 = polar_nodal_to_delaunay(cartesian_to_polar_nodal(initial.as_array()), mu)
    n = mu**2 / x0[3] ** 3
    times = np.asarray(times, dtype=float)
    xs = np.tile(x0, (len(times), 1))
    xs[:, 0] = x0[0] + n * (times - times[0])
    return polar_nodal_to_cartesian(delaunay_to_polar_nodal(xs, mu))


__all__ = ["ReferenceTrajectory", "acceleration", "conserved", "integrate", "kepler_two_body"]
