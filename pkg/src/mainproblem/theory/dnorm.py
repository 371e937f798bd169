"""Series of the transformation that removes the mean anomaly.

The Hamiltonian and generator terms are returned as printed, i.e. as the
coefficients of ``epsilon**m`` with ``epsilon = J2 Re^2 / (4 p^2)``; the fully
reduced Hamiltonian is ``sum(epsilon**m / m! * K0m)``.  :func:`scaled_generator`
and :func:`scaled_hamiltonian` multiply the powers of epsilon back in, which
is what the Lie transform consumes.
"""

from __future__ import annotations

import math

import jax.numpy as jnp

from .gnorm import epsilon, kepler_term
from .polynomials import horner
from .tables import DNORM_CENTER, DNORM_GENERATOR, DNORM_HAMILTONIAN


def _float_table(table):
    return tuple((key, poly.floats()) for key, poly in sorted(table.items()))


_HAM = {m: _float_table(t) for m, t in DNORM_HAMILTONIAN.items()}
_GEN = {m: _float_table(t) for m, t in DNORM_GENERATOR.items()}
_CEN = {m: _float_table(t) for m, t in DNORM_CENTER.items()}


def new_hamiltonian(m: int, b, field):
    """Coefficient of epsilon**m in the fully reduced Hamiltonian (a function of the momenta)."""
    if m == 0:
        return kepler_term(b, field)
    s2 = b.s * b.s
    eta = b.eta
    mu_p = field.mu / b.p
    if m == 1:
        return mu_p * eta**3 * (3.0 * s2 - 2.0)
    if m not in _HAM:
        raise ValueError(f"order must be 0..3, got {m}")
    total = 0.0
    for j, coeffs in _HAM[m]:
        total = total + horner(coeffs, s2) * eta**j
    if m == 2:
        return -0.75 * mu_p * eta**3 * total
    d = 5.0 * s2 - 4.0
    return mu_p * 9.0 * eta**3 / (16.0 * d * d) * total


def generator(m: int, b, *, part: str = "all"):
    """Coefficient of epsilon**m in the generator.

    ``part`` selects the purely periodic terms (``"periodic"``), the terms
    proportional to the equation of the center (``"center"``) or both.
    """
    if part not in ("all", "periodic", "center"):
        raise ValueError(f"unknown part {part!r}")
    s2 = b.s * b.s
    e, f, eta, G = b.e, b.f, b.eta, b.G
    if m == 1:
        periodic = G * (3.0 * s2 - 2.0) * e * jnp.sin(f)
        center = G * (3.0 * s2 - 2.0) * b.phi
    elif m in _GEN:
        d = 5.0 * s2 - 4.0
        psum = 0.0
        for (j, k), coeffs in _GEN[m]:
            eta_power = k if m == 2 else k - 1
            psum = psum + horner(coeffs, s2) * eta**eta_power * e**j * jnp.sin(j * f)
        csum = 0.0
        if m == 2:
            for j, coeffs in _CEN[m]:
                csum = csum + horner(coeffs, s2) * e ** (2 * j)
            periodic = -G * b.beta / (32.0 * d * d) * psum
            center = -0.75 * G * b.phi * csum
        else:
            for (j, k), coeffs in _CEN[m]:
                csum = csum + horner(coeffs, s2) * eta**k * e**j * jnp.cos(j * f)
            periodic = G * b.beta**2 / (128.0 * d**3) * psum
            center = 3.0 * G / (16.0 * d * d) * b.phi * csum
    else:
        raise ValueError(f"order must be 1..3, got {m}")
    if part == "periodic":
        return periodic
    if part == "center":
        return center
    return periodic + center


def scaled_generator(m: int, b, field):
    """The order-m generator as an actual function: epsilon(G)**m times the printed term."""
    return epsilon(b, field) ** m * generator(m, b)


def scaled_hamiltonian(m: int, b, field):
    return epsilon(b, field) ** m * new_hamiltonian(m, b, field)


def secular_hamiltonian(order: int, b, field):
    """Sum of epsilon**m / m! K0m for m = 0..order."""
    eps = epsilon(b, field)
    total = new_hamiltonian(0, b, field)
    for m in range(1, order + 1):
        total = total + eps**m / math.factorial(m) * new_hamiltonian(m, b, field)
    return total
