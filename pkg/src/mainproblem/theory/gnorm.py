"""Series of the transformation that removes the argument of perigee.

Every function takes a :class:`~mainproblem.elements.KeplerBasis` of jax
arrays and returns the actual phase-space function: the small quantity
``epsilon = J2 Re^2 / (4 p^2)`` is a function of G here and is already
included, so the transformed Hamiltonian reads
``K00 + K01 + K02 / 2 + K03 / 6``.
"""

from __future__ import annotations

import jax.numpy as jnp

from .polynomials import horner
from .tables import GNORM_GENERATOR, GNORM_HAMILTONIAN


def _float_table(table):
    return tuple((key, poly.floats()) for key, poly in sorted(table.items()))


_HAM = {m: _float_table(t) for m, t in GNORM_HAMILTONIAN.items()}
_GEN = {m: _float_table(t) for m, t in GNORM_GENERATOR.items()}

# Prefactors of the periodic part and of the integration constant.
_GEN_SCALE = {2: (32.0, 2, 64.0, 3), 3: (8960.0, 4, 1536.0, 5)}
_HAM_SCALE = {2: (8.0, 2), 3: (32.0, 3)}


def epsilon(b, field):
    return 0.25 * field.J2 * field.Re**2 / b.p**2


def kepler_term(b, field):
    return -0.5 * field.mu / b.a


def perturbation(b, field):
    """The J2 term of the original Hamiltonian in Delaunay variables."""
    s2 = b.s * b.s
    q = field.mu / b.r * (field.Re / b.r) ** 2 * 0.25 * field.J2
    return -q * (2.0 - 3.0 * s2 + 3.0 * s2 * jnp.cos(2.0 * (b.f + b.g)))


def hamiltonian(b, field):
    return kepler_term(b, field) + perturbation(b, field)


def new_hamiltonian(m: int, b, field):
    """Order-m term K0m of the Hamiltonian, free from the argument of perigee."""
    if m == 0:
        return kepler_term(b, field)
    s2 = b.s * b.s
    if m == 1:
        return -field.mu / b.r * (field.Re / b.r) ** 2 * 0.25 * field.J2 * (2.0 - 3.0 * s2)
    if m not in _HAM:
        raise ValueError(f"order must be 0..3, got {m}")
    den, power = _HAM_SCALE[m]
    d = 5.0 * s2 - 4.0
    e2 = b.e * b.e
    q = b.p / b.r
    total = 0.0
    for (j, k), coeffs in _HAM[m]:
        total = total + horner(coeffs, s2) * q**j * e2**k
    eps = epsilon(b, field)
    return eps**m * field.mu / b.r * q * q * 3.0 * s2 / (den * d**power) * total


def generator(m: int, b, field, *, constant: bool = True):
    """Order-m generator W_m, including its integration constant unless ``constant=False``."""
    s2 = b.s * b.s
    d = 5.0 * s2 - 4.0
    e, f, g = b.e, b.f, b.g
    eps = epsilon(b, field)
    if m == 1:
        periodic = -0.5 * eps * b.G * s2 * (
            3.0 * e * jnp.sin(f + 2.0 * g) + 3.0 * jnp.sin(2.0 * f + 2.0 * g) + e * jnp.sin(3.0 * f + 2.0 * g)
        )
        if not constant:
            return periodic
        return periodic + eps * b.G * (15.0 * s2 - 14.0) / (8.0 * d) * s2 * e * e * jnp.sin(2.0 * g)
    if m not in _GEN:
        raise ValueError(f"order must be 1..3, got {m}")
    den, power, cden, cpower = _GEN_SCALE[m]
    periodic = 0.0
    const = 0.0
    for (j, k, l), coeffs in _GEN[m]:
        poly = horner(coeffs, s2) * s2**l
        if k == 0:
            const = const + poly * e ** (2 * (j + l)) * jnp.sin(2.0 * l * g)
        else:
            periodic = periodic + poly * e ** (2 * j + k % 2) * jnp.sin(k * f + 2.0 * l * g)
    scale = eps**m * b.G
    out = scale / (den * d**power) * periodic
    if constant:
        out = out + scale / (cden * d**cpower) * const
    return out
