"""Bicomplex (Segre) numbers.

A bicomplex number is ``a1 + a2*i1 + a3*i2 + a4*i1*i2`` with commuting units
``i1**2 == i2**2 == -1``.  Writing ``phi1 = a1 + a2*i1`` and
``phi2 = a3 + a4*i1`` gives the complex-pair form ``phi1 + i2*phi2``; the
``i1``-complex numbers are represented here by Python ``complex``.

Every value is immutable and finite.  NaN and infinity are rejected when a
number is constructed, so downstream invariants never see them.

>>> Bicomplex(1, 1) * Bicomplex(1, 0, 1)
Bicomplex(a1=1.0, a2=1.0, a3=1.0, a4=1.0)
>>> E1 * E2
Bicomplex(a1=0.0, a2=0.0, a3=0.0, a4=0.0)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .errors import SingularElement

# Absolute cutoff, scaled by operand magnitude at every use site.
DEFAULT_TOL = 1e-12

Scalar = Union[int, float, complex]


@dataclass(frozen=True, slots=True)
class Bicomplex:
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "a3", "a4"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"bicomplex coefficient {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_complex(cls, phi1: complex, phi2: complex = 0j) -> Bicomplex:
        phi1, phi2 = complex(phi1), complex(phi2)
        return cls(phi1.real, phi1.imag, phi2.real, phi2.imag)

    @classmethod
    def coerce(cls, value: Bicomplex | Scalar) -> Bicomplex:
        """Lift a real or ``i1``-complex scalar into the algebra."""
        if isinstance(value, Bicomplex):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, (int, float)):
            return cls(float(value))
        raise TypeError(f"cannot interpret {type(value).__name__} as a bicomplex number")

    @classmethod
    def from_json(cls, data: Sequence[float]) -> Bicomplex:
        if len(data) != 4:
            raise ValueError(f"bicomplex JSON form needs 4 coefficients, got {len(data)}")
        return cls(*data)

    def to_json(self) -> list[float]:
        return [self.a1, self.a2, self.a3, self.a4]

    # -- views ------------------------------------------------------------

    @property
    def phi1(self) -> complex:
        return complex(self.a1, self.a2)

    @property
    def phi2(self) -> complex:
        return complex(self.a3, self.a4)

    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return self.norm() <= tol

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Bicomplex | Scalar) -> Bicomplex:
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return Bicomplex(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3, self.a4 + o.a4)

    __radd__ = __add__

    def __sub__(self, other: Bicomplex | Scalar) -> Bicomplex:
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return Bicomplex(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3, self.a4 - o.a4)

    def __rsub__(self, other: Scalar) -> Bicomplex:
        return Bicomplex.coerce(other) - self

    def __neg__(self) -> Bicomplex:
        return Bicomplex(-self.a1, -self.a2, -self.a3, -self.a4)

    def __pos__(self) -> Bicomplex:
        return self

    def __mul__(self, other: Bicomplex | Scalar) -> Bicomplex:
        if isinstance(other, (int, float)):
            return self.scale(other)
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        p1, p2, w1, w2 = self.phi1, self.phi2, o.phi1, o.phi2
        return Bicomplex.from_complex(p1 * w1 - p2 * w2, p1 * w2 + p2 * w1)

    __rmul__ = __mul__

    def scale(self, factor: float) -> Bicomplex:
        f = float(factor)
        return Bicomplex(f * self.a1, f * self.a2, f * self.a3, f * self.a4)

    def __truediv__(self, other: Bicomplex | Scalar) -> Bicomplex:
        if isinstance(other, (int, float)):
            if other == 0:
                raise SingularElement(0.0)
            return self.scale(1.0 / other)
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Scalar) -> Bicomplex:
        return Bicomplex.coerce(other) * self.inverse()

    def __pow__(self, r: float) -> Bicomplex:
        return power(self, r)

    # -- structure --------------------------------------------------------

    def idempotent(self) -> IdempotentPair:
        return idempotent_decompose(self)

    def norm(self) -> float:
        return math.hypot(self.a1, self.a2, self.a3, self.a4)

    def norm_idempotent(self) -> float:
        """The norm evaluated from the idempotent components."""
        s1, s2 = idempotent_decompose(self)
        return math.hypot(abs(s1), abs(s2)) / math.sqrt(2.0)

    def singular_modulus(self) -> float:
        """``|phi1**2 + phi2**2|``, which vanishes exactly on the singular elements."""
        return abs(self.phi1 * self.phi1 + self.phi2 * self.phi2)

    def is_singular(self, tol: float = DEFAULT_TOL) -> bool:
        return self.singular_modulus() <= tol * (1.0 + self.norm()) ** 2

    def inverse(self, tol: float = DEFAULT_TOL) -> Bicomplex:
        if self.is_singular(tol):
            raise SingularElement(self.singular_modulus())
        p1, p2 = self.phi1, self.phi2
        den = p1 * p1 + p2 * p2
        return Bicomplex.from_complex(p1 / den, -p2 / den)

    def determinant(self) -> float:
        return self.a1 * self.a4 - self.a2 * self.a3

    def is_degenerate(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.determinant()) <= tol * (1.0 + self.norm()) ** 2

    def __str__(self) -> str:
        return f"({self.a1:g} {self.a2:+g}i1 {self.a3:+g}i2 {self.a4:+g}i1i2)"


class IdempotentPair(NamedTuple):
    """Coefficients of ``e1`` and ``e2`` in the idempotent representation."""

    s1: complex
    s2: complex


ZERO = Bicomplex()
ONE = Bicomplex(1.0)
I1 = Bicomplex(0.0, 1.0)
I2 = Bicomplex(0.0, 0.0, 1.0)
J = Bicomplex(0.0, 0.0, 0.0, 1.0)  # i1*i2
E1 = Bicomplex(0.5, 0.0, 0.0, 0.5)
E2 = Bicomplex(0.5, 0.0, 0.0, -0.5)


def add(u: Bicomplex, v: Bicomplex) -> Bicomplex:
    return u + v


def sub(u: Bicomplex, v: Bicomplex) -> Bicomplex:
    return u - v


def negate(u: Bicomplex) -> Bicomplex:
    return -u


def scalar_mul(a: float, u: Bicomplex) -> Bicomplex:
    return u.scale(a)


def mul(u: Bicomplex, v: Bicomplex) -> Bicomplex:
    return u * v


def norm(u: Bicomplex) -> float:
    return u.norm()


def is_singular(u: Bicomplex, tol: float = DEFAULT_TOL) -> bool:
    return u.is_singular(tol)


def inverse(u: Bicomplex, tol: float = DEFAULT_TOL) -> Bicomplex:
    return u.inverse(tol)


def is_degenerate(u: Bicomplex, tol: float = DEFAULT_TOL) -> bool:
    return u.is_degenerate(tol)


def idempotent_decompose(u: Bicomplex) -> IdempotentPair:
    p1, p2 = u.phi1, u.phi2
    return IdempotentPair(p1 - 1j * p2, p1 + 1j * p2)


def idempotent_compose(p: IdempotentPair | tuple[complex, complex]) -> Bicomplex:
    s1, s2 = complex(p[0]), complex(p[1])
    return Bicomplex.from_complex((s1 + s2) / 2.0, 1j * (s1 - s2) / 2.0)


def power(u: Bicomplex, r: float) -> Bicomplex:
    """Principal power taken separately on each idempotent component."""
    if r == 1:
        return u
    s1, s2 = idempotent_decompose(u)
    return idempotent_compose((_cpow(s1, r), _cpow(s2, r)))


def _cpow(z: complex, r: float) -> complex:
    if z == 0:
        if r > 0:
            return 0j
        raise SingularElement(0.0)
    return z ** r


def exp_i1(theta: float) -> Bicomplex:
    """``cos(theta) + i1*sin(theta)``."""
    return Bicomplex(math.cos(theta), math.sin(theta))


# -- partial order ----------------------------------------------------------


class OrderRelation(enum.Enum):
    """Outcome of comparing two bicomplex numbers under the ``i2`` order.

    ``LESS_B``: only the ``phi1`` part moves up; ``LESS_C``: only ``phi2``;
    ``LESS_D``: both.  ``GREATER_*`` are the same cases with the arguments
    swapped.
    """

    EQUAL = "equal"
    LESS_B = "less-b"
    LESS_C = "less-c"
    LESS_D = "less-d"
    GREATER_B = "greater-b"
    GREATER_C = "greater-c"
    GREATER_D = "greater-d"
    INCOMPARABLE = "incomparable"

    @property
    def is_le(self) -> bool:
        return self in _LE

    @property
    def is_ge(self) -> bool:
        return self in _GE

    @property
    def is_strictly_less(self) -> bool:
        return self is OrderRelation.LESS_D

    @property
    def is_strictly_greater(self) -> bool:
        return self is OrderRelation.GREATER_D

    @property
    def comparable(self) -> bool:
        return self is not OrderRelation.INCOMPARABLE


_LE = frozenset({OrderRelation.EQUAL, OrderRelation.LESS_B, OrderRelation.LESS_C, OrderRelation.LESS_D})
_GE = frozenset({OrderRelation.EQUAL, OrderRelation.GREATER_B, OrderRelation.GREATER_C, OrderRelation.GREATER_D})


def _sign(d: float, eps: float) -> int:
    if d > eps:
        return 1
    if d < -eps:
        return -1
    return 0


def compare(u: Bicomplex, v: Bicomplex, tol: float = DEFAULT_TOL) -> OrderRelation:
    """Classify ``u`` against ``v``.

    Complex parts are ordered by ``z <= w`` iff ``Re z <= Re w`` and
    ``Im z <= Im w``; a complex part counts as strictly below when it is
    ``<=`` and not equal.  Differences within ``tol * (1 + max norm)`` are
    treated as zero.

    >>> compare(1 + I2, 2 + 2 * I2)
    <OrderRelation.LESS_D: 'less-d'>
    >>> compare(I1, ONE)
    <OrderRelation.INCOMPARABLE: 'incomparable'>
    """
    u, v = Bicomplex.coerce(u), Bicomplex.coerce(v)
    eps = tol * (1.0 + max(u.norm(), v.norm()))
    signs = [_sign(b - a, eps) for a, b in zip(u.coefficients(), v.coefficients())]
    if all(s == 0 for s in signs):
        return OrderRelation.EQUAL
    moved1 = signs[0] != 0 or signs[1] != 0
    moved2 = signs[2] != 0 or signs[3] != 0
    if all(s >= 0 for s in signs):
        if moved1 and moved2:
            return OrderRelation.LESS_D
        return OrderRelation.LESS_B if moved1 else OrderRelation.LESS_C
    if all(s <= 0 for s in signs):
        if moved1 and moved2:
            return OrderRelation.GREATER_D
        return OrderRelation.GREATER_B if moved1 else OrderRelation.GREATER_C
    return OrderRelation.INCOMPARABLE


def leq(u: Bicomplex, v: Bicomplex, tol: float = DEFAULT_TOL) -> bool:
    return compare(u, v, tol).is_le


def in_cone(u: Bicomplex, tol: float = DEFAULT_TOL) -> bool:
    """``0 <= u`` in the ``i2`` order."""
    return compare(ZERO, u, tol).is_le


def in_open_cone(u: Bicomplex, tol: float = DEFAULT_TOL) -> bool:
    """``0 < u`` strictly (case D)."""
    return compare(ZERO, u, tol).is_strictly_less
