"""Printed series of both normalizations: tables, evaluators and the resonance guard.

The evaluators below take a :class:`~mainproblem.elements.DelaunayState` and
return floats; :mod:`.gnorm` and :mod:`.dnorm` hold the jax-traceable versions
used by the Lie machinery.
"""

from __future__ import annotations

import json
import warnings

import jax.numpy as jnp

from .. import elements as el
from ..errors import ResonanceError
from . import dnorm, gnorm, tables

DEFAULT_GUARD = 0.02
WARNING_BAND = 0.1


class NearResonanceWarning(RuntimeWarning):
    """The inclination is close to, but not inside, the critical-inclination guard."""


def check_resonance(s2: float, guard: float | None = None) -> float:
    """Return ``|5 s^2 - 4|`` or raise :class:`ResonanceError` when it is below ``guard``."""
    guard = DEFAULT_GUARD if guard is None else guard
    d = abs(5.0 * float(s2) - 4.0)
    if d < guard:
        raise ResonanceError(d, guard)
    if d < WARNING_BAND:
        warnings.warn(
            f"|5 s^2 - 4| = {d:.4g} is inside the warning band {WARNING_BAND}",
            NearResonanceWarning,
            stacklevel=2,
        )
    return d


def _basis(state: el.DelaunayState, field: el.GravityField):
    return el.kepler_basis(jnp.asarray(state.as_array()), field.mu)


def _check_order(m, lo, hi):
    if not lo <= m <= hi:
        raise ValueError(f"order must lie in {lo}..{hi}, got {m}")


def eval_W_gnorm(m: int, state, field=el.DEFAULT_FIELD, guard: float | None = None) -> float:
    """Order-m generator of the perigee-removing transformation, with its integration constant."""
    _check_order(m, 1, 3)
    check_resonance(state.sin2_inclination, guard)
    return float(gnorm.generator(m, _basis(state, field), field))


def eval_K_gnorm(m: int, state, field=el.DEFAULT_FIELD, guard: float | None = None) -> float:
    """Order-m Hamiltonian term after the perigee is removed (epsilon included)."""
    _check_order(m, 0, 3)
    if m >= 2:
        check_resonance(state.sin2_inclination, guard)
    return float(gnorm.new_hamiltonian(m, _basis(state, field), field))


def eval_W_dnorm(m: int, state, field=el.DEFAULT_FIELD, guard: float | None = None, part: str = "all") -> float:
    """Coefficient of epsilon**m in the generator that removes the mean anomaly."""
    _check_order(m, 1, 3)
    if m >= 2:
        check_resonance(state.sin2_inclination, guard)
    return float(dnorm.generator(m, _basis(state, field), part=part))


def eval_K_dnorm(m: int, state, field=el.DEFAULT_FIELD, guard: float | None = None) -> float:
    """Coefficient of epsilon**m in the fully reduced Hamiltonian."""
    _check_order(m, 0, 3)
    if m == 3:
        check_resonance(state.sin2_inclination, guard)
    return float(dnorm.new_hamiltonian(m, _basis(state, field), field))


def epsilon(state, field=el.DEFAULT_FIELD) -> float:
    p = state.G**2 / field.mu
    return 0.25 * field.J2 * field.Re**2 / p**2


def tables_json() -> str:
    """Byte-stable JSON rendering of every table (highest power of s^2 first)."""
    return json.dumps(tables.tables_as_dict(), indent=1, sort_keys=False, ensure_ascii=True) + "\n"


__all__ = [
    "DEFAULT_GUARD",
    "NearResonanceWarning",
    "check_resonance",
    "dnorm",
    "eval_K_dnorm",
    "eval_K_gnorm",
    "eval_W_dnorm",
    "eval_W_gnorm",
    "epsilon",
    "gnorm",
    "tables",
    "tables_json",
]
