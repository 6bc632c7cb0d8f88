"""Complex scalars and bivariate second-order jets.

A :class:`Jet2` carries the value of a function of two variables together
with its five partial derivatives up to second order.  Every elementary
operation propagates the partials by the chain rule, so second-order
differential operators can be applied to anything that is built out of
these operations.

The module also exposes scalar-or-jet helpers (:func:`exp`, :func:`log`,
:func:`power`, :func:`lift`) used by the special-function layer.
"""

from __future__ import annotations

import cmath
import math
from numbers import Number

from .errors import BranchCut, DivisionByZero, NumericOverflow, SingularPower

# relative width of the strip around the negative real axis treated as the cut
CUT_TOLERANCE = 1e-15

_SLOTS = ("v", "dx", "dy", "dxx", "dxy", "dyy")


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def check_finite(z: complex) -> complex:
    z = complex(z)
    if not _finite(z):
        raise NumericOverflow(f"non-finite value {z!r}")
    return z


def on_cut(z: complex) -> bool:
    """True when ``z`` lies on the principal cut ``(-inf, 0]``."""
    if z == 0:
        return True
    return z.real < 0 and abs(z.imag) <= CUT_TOLERANCE * abs(z)


def is_integer(e: complex) -> bool:
    return e.imag == 0 and float(e.real).is_integer()


_new = object.__new__


class Jet2:
    """Truncated bivariate Taylor value ``(v, dx, dy, dxx, dxy, dyy)``."""

    __slots__ = _SLOTS

    def __init__(self, v=0j, dx=0j, dy=0j, dxx=0j, dxy=0j, dyy=0j):
        self.v = complex(v)
        self.dx = complex(dx)
        self.dy = complex(dy)
        self.dxx = complex(dxx)
        self.dxy = complex(dxy)
        self.dyy = complex(dyy)
        s = self.v + self.dx + self.dy + self.dxx + self.dxy + self.dyy
        if not _finite(s) or not _finite(self.v):
            raise NumericOverflow("non-finite jet component")

    # constructors -------------------------------------------------------
    @classmethod
    def _raw(cls, v, dx, dy, dxx, dxy, dyy) -> "Jet2":
        """Internal constructor for components already known to be complex."""
        j = _new(cls)
        j.v, j.dx, j.dy, j.dxx, j.dxy, j.dyy = v, dx, dy, dxx, dxy, dyy
        s = v + dx + dy + dxx + dxy + dyy
        if not (math.isfinite(s.real) and math.isfinite(s.imag)
                and math.isfinite(v.real) and math.isfinite(v.imag)):
            raise NumericOverflow("non-finite jet component")
        return j

    @classmethod
    def const(cls, c) -> "Jet2":
        return cls(c)

    @classmethod
    def coord_x(cls, x) -> "Jet2":
        return cls(x, 1.0)

    @classmethod
    def coord_y(cls, y) -> "Jet2":
        return cls(y, 0.0, 1.0)

    def slots(self) -> tuple:
        return (self.v, self.dx, self.dy, self.dxx, self.dxy, self.dyy)

    def __repr__(self) -> str:
        body = ", ".join(f"{n}={getattr(self, n):.6g}" for n in _SLOTS)
        return f"Jet2({body})"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2._raw(self.v + other.v, self.dx + other.dx, self.dy + other.dy,
                        self.dxx + other.dxx, self.dxy + other.dxy, self.dyy + other.dyy)
        if isinstance(other, Number):
            return Jet2._raw(self.v + other, self.dx, self.dy, self.dxx, self.dxy, self.dyy)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet2._raw(-self.v, -self.dx, -self.dy, -self.dxx, -self.dxy, -self.dyy)

    def __sub__(self, other):
        if isinstance(other, (Jet2, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Number):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            return Jet2._raw(
                a.v * b.v,
                a.dx * b.v + a.v * b.dx,
                a.dy * b.v + a.v * b.dy,
                a.dxx * b.v + 2 * a.dx * b.dx + a.v * b.dxx,
                a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
                a.dyy * b.v + 2 * a.dy * b.dy + a.v * b.dyy,
            )
        if isinstance(other, Number):
            c = other
            return Jet2._raw(self.v * c, self.dx * c, self.dy * c,
                        self.dxx * c, self.dxy * c, self.dyy * c)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if self.v == 0:
            raise DivisionByZero("jet division by a zero value")
        r = 1.0 / self.v
        return lift(self, r, -r * r, 2 * r * r * r)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if isinstance(other, Number):
            if other == 0:
                raise DivisionByZero("jet division by zero")
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, e):
        return power(self, e)


def lift(u: Jet2, f0, f1, f2) -> Jet2:
    """Compose a univariate function with a jet.

    ``f0, f1, f2`` are the value and first two derivatives of the outer
    function at ``u.v``.
    """
    return Jet2._raw(
        complex(f0),
        f1 * u.dx,
        f1 * u.dy,
        f2 * u.dx * u.dx + f1 * u.dxx,
        f2 * u.dx * u.dy + f1 * u.dxy,
        f2 * u.dy * u.dy + f1 * u.dyy,
    )


# elementary functions (scalar or jet) --------------------------------------

def exp(u):
    v = u.v if isinstance(u, Jet2) else complex(u)
    try:
        e = check_finite(cmath.exp(v))
    except OverflowError as exc:
        raise NumericOverflow("exponential overflow") from exc
    if isinstance(u, Jet2):
        return lift(u, e, e, e)
    return e


def log(u):
    v = u.v if isinstance(u, Jet2) else complex(u)
    if on_cut(v):
        raise BranchCut(f"logarithm of {v!r} on the cut")
    lv = cmath.log(v)
    if isinstance(u, Jet2):
        r = 1.0 / v
        return lift(u, lv, r, -r * r)
    return lv


def power(u, e):
    """Principal branch ``u**e`` for scalar or jet ``u``."""
    e = complex(e)
    v = u.v if isinstance(u, Jet2) else complex(u)
    if is_integer(e):
        n = int(e.real)
        if v == 0 and n < 0:
            raise SingularPower("negative integer power of zero")
        if not isinstance(u, Jet2):
            return check_finite(v ** n)
        if n == 0:
            return Jet2(1.0)
        f0 = v ** n
        f1 = n * v ** (n - 1)
        f2 = n * (n - 1) * v ** (n - 2) if n != 1 else 0j
        return lift(u, f0, f1, f2)
    if v == 0:
        raise SingularPower("non-integer power of zero")
    if on_cut(v):
        raise BranchCut(f"power base {v!r} on the cut")
    try:
        f0 = check_finite(cmath.exp(e * cmath.log(v)))
    except OverflowError as exc:
        raise NumericOverflow("power overflow") from exc
    if not isinstance(u, Jet2):
        return f0
    r = 1.0 / v
    return lift(u, f0, e * f0 * r, e * (e - 1) * f0 * r * r)


def jet_add(u, w):
    return u + w


def jet_neg(u):
    return -u


def jet_mul(u, w):
    return u * w


def jet_div(u, w):
    return u / w


def jet_exp(u):
    return exp(u)


def jet_log(u):
    return log(u)


def jet_pow(u, e):
    return power(u, e)


def value(u) -> complex:
    return u.v if isinstance(u, Jet2) else complex(u)


def relative_residual(terms) -> float:
    """``|sum(terms)| / (sum(|t|) + floor)``: the scale-free residual measure."""
    total = 0j
    scale = 0.0
    for t in terms:
        total += t
        scale += abs(t)
    return abs(total) / (scale + 1e-30)
