"""Bicomplex arithmetic in the idempotent representation.

A bicomplex number ``Z = z1 + j z2`` (``z1, z2`` in C(i)) is stored through
its idempotent coefficients ``Z = b1 e + b2 e†`` with ``e = (1 + k)/2`` and
``e† = (1 - k)/2``.  In these coordinates every ring operation acts
coefficientwise, which is why this is the canonical storage.

The array helpers (``to_idempotent``, ``to_cartesian``, ``theta_coefficients``)
work on numpy arrays and are what the function and kernel modules use; the
``BiComplex`` and ``Hyperbolic`` value types are the scalar API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonFiniteValue, ZeroDivisorError

ZERO_DIVISOR_RTOL = 1e-12
CONJUGATIONS = ("star", "dagger", "bar")


def to_idempotent(z1, z2):
    """Cartesian pair ``(z1, z2)`` of ``z1 + j z2`` -> idempotent pair."""
    return z1 - 1j * z2, z1 + 1j * z2


def to_cartesian(b1, b2):
    return 0.5 * (b1 + b2), 0.5j * (b1 - b2)


def conj_coefficients(b1, b2, kind):
    """Apply one of the three conjugations to idempotent coefficients."""
    if kind == "star":
        return np.conj(b1), np.conj(b2)
    if kind == "dagger":
        return b2, b1
    if kind == "bar":
        return np.conj(b2), np.conj(b1)
    raise ValueError(f"unknown conjugation {kind!r}; expected one of {CONJUGATIONS}")


def theta_coefficients(b1, b2):
    """The i<->j automorphism, ``(x1, y1, x2, y2) -> (x1, x2, y1, y2)``."""
    z1, z2 = to_cartesian(b1, b2)
    w1 = np.real(z1) + 1j * np.real(z2)
    w2 = np.imag(z1) + 1j * np.imag(z2)
    return to_idempotent(w1, w2)


def _check_finite(value):
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonFiniteValue(f"non-finite bicomplex coefficient {value!r}")


@dataclass(frozen=True, slots=True)
class BiComplex:
    b1: complex
    b2: complex

    def __post_init__(self):
        b1, b2 = complex(self.b1), complex(self.b2)
        _check_finite(b1)
        _check_finite(b2)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)

    @classmethod
    def from_cartesian(cls, z1: complex, z2: complex) -> "BiComplex":
        return cls(*to_idempotent(complex(z1), complex(z2)))

    @classmethod
    def coerce(cls, value) -> "BiComplex":
        if isinstance(value, BiComplex):
            return value
        if isinstance(value, Hyperbolic):
            return value.as_bicomplex()
        c = complex(value)
        return cls(c, c)

    def to_cartesian(self) -> tuple[complex, complex]:
        return to_cartesian(self.b1, self.b2)

    def components(self) -> tuple[float, float, float, float]:
        """Real cartesian components ``(x1, y1, x2, y2)``."""
        z1, z2 = self.to_cartesian()
        return z1.real, z1.imag, z2.real, z2.imag

    # ring structure
    def __add__(self, other):
        try:
            other = BiComplex.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return BiComplex(self.b1 + other.b1, self.b2 + other.b2)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = BiComplex.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return BiComplex(self.b1 - other.b1, self.b2 - other.b2)

    def __rsub__(self, other):
        return BiComplex.coerce(other) - self

    def __mul__(self, other):
        try:
            other = BiComplex.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return BiComplex(self.b1 * other.b1, self.b2 * other.b2)

    __rmul__ = __mul__

    def __neg__(self):
        return BiComplex(-self.b1, -self.b2)

    def __truediv__(self, other):
        return self * BiComplex.coerce(other).inverse()

    def __rtruediv__(self, other):
        return BiComplex.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        return BiComplex(self.b1**n, self.b2**n)

    def sup(self) -> float:
        """Largest coefficient magnitude; the scale used by tolerances."""
        return max(abs(self.b1), abs(self.b2))

    def is_zero_divisor(self) -> bool:
        """Membership in S0 (zero divisors together with 0)."""
        cutoff = ZERO_DIVISOR_RTOL * (1.0 + self.sup())
        return min(abs(self.b1), abs(self.b2)) < cutoff

    def inverse(self) -> "BiComplex":
        if self.is_zero_divisor():
            raise ZeroDivisorError(f"{self} is a zero divisor")
        return BiComplex(1.0 / self.b1, 1.0 / self.b2)

    def conj(self, kind: str) -> "BiComplex":
        return BiComplex(*conj_coefficients(self.b1, self.b2, kind))

    def modulus_k(self) -> "Hyperbolic":
        return Hyperbolic(abs(self.b1), abs(self.b2))

    def theta(self) -> "BiComplex":
        b1, b2 = theta_coefficients(self.b1, self.b2)
        return BiComplex(complex(b1), complex(b2))

    def j_coefficients(self) -> tuple[complex, complex]:
        """Idempotent coefficients over C(j), read in C(i) through theta.

        Returns ``(a1, a2)`` with ``theta(Z) = a1 e + a2 e†``, i.e. the
        C(j) coefficients of ``Z`` with the unit j relabelled as i.
        """
        t = self.theta()
        return t.b1, t.b2

    def isclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        other = BiComplex.coerce(other)
        scale = atol + rtol * max(self.sup(), other.sup())
        return (self - other).sup() <= scale

    def to_json(self) -> dict:
        return {"b1": [self.b1.real, self.b1.imag], "b2": [self.b2.real, self.b2.imag]}

    def __repr__(self):
        return f"BiComplex(b1={self.b1!r}, b2={self.b2!r})"


@dataclass(frozen=True, slots=True)
class Hyperbolic:
    """Hyperbolic number ``a e + b e†`` with real coefficients."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise NonFiniteValue(f"non-finite hyperbolic coefficient ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def in_d_plus(self) -> bool:
        return self.a >= 0.0 and self.b >= 0.0

    def __add__(self, other):
        if not isinstance(other, Hyperbolic):
            return NotImplemented
        return Hyperbolic(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        if not isinstance(other, Hyperbolic):
            return NotImplemented
        return Hyperbolic(self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        if isinstance(other, Hyperbolic):
            return Hyperbolic(self.a * other.a, self.b * other.b)
        if isinstance(other, (int, float)):
            return Hyperbolic(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def sqrt(self) -> "Hyperbolic":
        if not self.in_d_plus():
            raise ValueError(f"square root of {self} outside D+")
        return Hyperbolic(math.sqrt(self.a), math.sqrt(self.b))

    def as_bicomplex(self) -> BiComplex:
        return BiComplex(self.a, self.b)

    def is_zero_divisor(self) -> bool:
        return self.as_bicomplex().is_zero_divisor()


def from_cartesian(z1: complex, z2: complex) -> BiComplex:
    return BiComplex.from_cartesian(z1, z2)


def from_json(obj) -> BiComplex:
    """Parse ``{"b1": [re, im], "b2": [re, im]}`` or the cartesian ``z1``/``z2`` form."""

    def number(v):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"expected [re, im], got {v!r}")
            return complex(float(v[0]), float(v[1]))
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        raise ValueError(f"cannot read a complex number from {v!r}")

    if not isinstance(obj, dict):
        raise ValueError("bicomplex JSON must be an object")
    if {"b1", "b2"} <= obj.keys():
        return BiComplex(number(obj["b1"]), number(obj["b2"]))
    if {"z1", "z2"} <= obj.keys():
        return BiComplex.from_cartesian(number(obj["z1"]), number(obj["z2"]))
    raise ValueError("bicomplex JSON needs keys b1/b2 or z1/z2")


# Function-style aliases; the methods above carry the logic.
def add(z, w):
    return z + w


def sub(z, w):
    return z - w


def mul(z, w):
    return z * w


def neg(z):
    return -z


def inverse(z: BiComplex) -> BiComplex:
    return z.inverse()


def conj(z: BiComplex, kind: str) -> BiComplex:
    return z.conj(kind)


def modulus_k(z: BiComplex) -> Hyperbolic:
    return z.modulus_k()


def theta(z: BiComplex) -> BiComplex:
    return z.theta()


def hyp_leq(x: Hyperbolic, y: Hyperbolic) -> Optional[bool]:
    """Hyperbolic partial order ``x ⪯ y``.

    Returns True when ``y - x`` lies in D+, None when the two values are
    incomparable (neither difference in D+), False otherwise.
    """
    if (y - x).in_d_plus():
        return True
    if (x - y).in_d_plus():
        return False
    return None


ONE = BiComplex(1, 1)
ZERO = BiComplex(0, 0)
I = BiComplex(1j, 1j)
J = BiComplex.from_cartesian(0, 1)
K = BiComplex(1, -1)
E = BiComplex(1, 0)
EDAG = BiComplex(0, 1)
