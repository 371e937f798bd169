"""Exact polynomials in x = sin^2(I) with rational coefficients.

Tables are written in the factored form in which they are usually printed and
expanded once at import.  Evaluation converts the exact coefficients to
floats and uses Horner's rule, so it works on numpy and jax arrays alike.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Poly:
    """Polynomial with :class:`~fractions.Fraction` coefficients, ascending powers."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int | Fraction]):
        c = [Fraction(v) for v in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c) if c else (Fraction(0),)

    @staticmethod
    def _lift(other) -> "Poly":
        return other if isinstance(other, Poly) else Poly([other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (n - len(o.coeffs))
        return Poly([u + v for u, v in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-v for v in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, u in enumerate(self.coeffs):
            for j, v in enumerate(o.coeffs):
                out[i + j] += u * v
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return self.coeffs == self._lift(other).coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def exact(self, x: Fraction | int) -> Fraction:
        """Evaluate with exact rational arithmetic."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    def __call__(self, x):
        return horner(self.floats(), x)

    def descending(self) -> list:
        """Coefficients from the highest power down, integers where exact."""
        return [int(c) if c.denominator == 1 else str(c) for c in reversed(self.coeffs)]


def horner(coeffs: Sequence[float], x):
    """Evaluate ``sum(coeffs[k] * x**k)`` by Horner's rule."""
    acc = coeffs[-1] + 0.0 * x
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


#: The monomial x = s^2, used to spell the tables.
X = Poly([0, 1])
