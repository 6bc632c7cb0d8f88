"""Gauss and confluent hypergeometric functions over scalars or jets.

All functions accept either a complex number or a :class:`~heunkernels.numerics.Jet2`
as argument.  For jets the value and the first two derivatives of the
function are summed from the series and pushed through the chain rule.

There is deliberately no analytic continuation: the Gauss series is only
summed inside ``|u| < 1 - margin``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.special import gamma as _gamma
from scipy.special import rgamma as _rgamma

from . import numerics as nm
from .errors import (
    DegenerateParameter,
    IntegerParameterDegeneracy,
    NoConvergence,
    OutsideDomain,
)
from .numerics import Jet2

SERIES_EPS = 1e-16
DOMAIN_MARGIN = 0.05
TERM_CAP = 100_000


@dataclass(frozen=True)
class HypParams:
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))


@dataclass(frozen=True)
class ConfParams:
    a: complex
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "c", complex(self.c))


def _nonpositive_integer(z: complex, tol: float = 1e-12) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def _near_integer(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _sum_series(ratio, u: complex, shift: float, eps: float):
    """Sum ``sum s_n u^n`` and its first two derivatives.

    ``ratio(n)`` gives ``s_{n+1}/s_n``.  ``shift`` is a bound past which the
    ratios are monotone, so the stopping test is trustworthy.  The running
    coefficient is ``s_n u^(n-2)`` rather than ``s_n``, which keeps it finite
    when ``s_n`` alone would overflow long before the terms become small.
    """
    m = 1.0 + 0j
    f0 = f1 = f2 = 0j
    m0 = m1 = m2 = 0.0
    quiet = 0
    for n in range(TERM_CAP):
        if n == 0:
            t0, t1, t2 = m, 0j, 0j
        elif n == 1:
            t0, t1, t2 = m * u, m, 0j
        else:
            t0, t1, t2 = m * u * u, n * m * u, n * (n - 1) * m
        f0 += t0
        f1 += t1
        f2 += t2
        m0 += abs(t0)
        m1 += abs(t1)
        m2 += abs(t2)
        if m == 0:
            return f0, f1, f2, m0
        small = (abs(t0) <= eps * m0 and abs(t1) <= eps * m1 and abs(t2) <= eps * m2)
        if small and n > shift:
            quiet += 1
            if quiet >= 2:
                return f0, f1, f2, m0
        else:
            quiet = 0
        m *= ratio(n) * u if n >= 2 else ratio(n)
        if not nm._finite(m):
            raise NoConvergence("series coefficients overflow")
    raise NoConvergence(f"series did not converge in {TERM_CAP} terms")


def _hyp2f1_scalar(a, b, c, u, margin, eps):
    if _nonpositive_integer(c):
        raise DegenerateParameter(f"c = {c} is a non-positive integer")
    if abs(u) >= 1 - margin:
        raise OutsideDomain(f"|u| = {abs(u):.4g} outside the series domain")

    def ratio(n):
        return (a + n) * (b + n) / ((c + n) * (n + 1))

    shift = abs(a) + abs(b) + abs(c) + 2
    return _sum_series(ratio, u, shift, eps)


def hyp2f1(p: HypParams, u, margin: float = DOMAIN_MARGIN, eps: float = SERIES_EPS):
    """Gauss series ``F(a, b; c; u)``."""
    uv = nm.value(u)
    f0, f1, f2, _ = _hyp2f1_scalar(p.a, p.b, p.c, uv, margin, eps)
    if isinstance(u, Jet2):
        return nm.lift(u, f0, f1, f2)
    return nm.check_finite(f0)


def hyp_local(k: int, p: HypParams, u, margin: float = DOMAIN_MARGIN):
    """The six local solutions around ``0``, ``1`` and ``infinity``."""
    a, b, c = p.a, p.b, p.c
    if k == 1:
        return hyp2f1(p, u, margin)
    if k == 2:
        return nm.power(u, 1 - c) * hyp2f1(HypParams(a + 1 - c, b + 1 - c, 2 - c), u, margin)
    if k == 3:
        return hyp2f1(HypParams(a, b, a + b + 1 - c), 1 - u, margin)
    if k == 4:
        w = 1 - u
        return nm.power(w, c - a - b) * hyp2f1(HypParams(c - a, c - b, 1 + c - a - b), w, margin)
    if k == 5:
        return nm.power(u, -a) * hyp2f1(HypParams(a, a + 1 - c, a + 1 - b), 1 / u, margin)
    if k == 6:
        return nm.power(u, -b) * hyp2f1(HypParams(b + 1 - c, b, b + 1 - a), 1 / u, margin)
    raise ValueError(f"local solution index {k} not in 1..6")


def euler(p: HypParams, u, margin: float = DOMAIN_MARGIN):
    """Right-hand side of ``F(a,b;c;u) = (1-u)^(c-a-b) F(c-a,c-b;c;u)``."""
    a, b, c = p.a, p.b, p.c
    return nm.power(1 - u, c - a - b) * hyp2f1(HypParams(c - a, c - b, c), u, margin)


def pfaff(p: HypParams, u, margin: float = DOMAIN_MARGIN):
    """Right-hand side of ``F(a,b;c;u) = (1-u)^(-a) F(a,c-b;c;u/(u-1))``."""
    a, b, c = p.a, p.b, p.c
    return nm.power(1 - u, -a) * hyp2f1(HypParams(a, c - b, c), u / (u - 1), margin)


def hypergeometric_terms(p: HypParams, f: Jet2, u: complex):
    """The three terms of the hypergeometric operator applied to ``f(u)``.

    ``f`` is a jet in which ``dx`` and ``dxx`` hold the derivatives in ``u``.
    """
    return (u * (1 - u) * f.dxx, (p.c - (p.a + p.b + 1) * u) * f.dx, -p.a * p.b * f.v)


# confluent functions -------------------------------------------------------

def _phi_scalar(a, c, u, eps):
    if _nonpositive_integer(c):
        raise DegenerateParameter(f"c = {c} is a non-positive integer")

    def ratio(n):
        return (a + n) / ((c + n) * (n + 1))

    shift = abs(a) + abs(c) + abs(u) + 2
    return _sum_series(ratio, u, shift, eps)


def kummer_phi(p: ConfParams, u, eps: float = SERIES_EPS):
    """Kummer's regular function ``Phi(a, c; u)``."""
    f0, f1, f2, _ = _phi_scalar(p.a, p.c, nm.value(u), eps)
    if isinstance(u, Jet2):
        return nm.lift(u, f0, f1, f2)
    return nm.check_finite(f0)


def gamma(z: complex) -> complex:
    return complex(_gamma(complex(z)))


def rgamma(z: complex) -> complex:
    return complex(_rgamma(complex(z)))


def _psi_asymptotic(a, c, u):
    """``u^(-a) sum (a)_n (a-c+1)_n / n! (-1/u)^n`` cut at its smallest term.

    Returns the value and the magnitude of the first omitted term.
    """
    b = a - c + 1
    term = 1.0 + 0j
    total = 0j
    w = -1.0 / u
    for n in range(400):
        nxt = term * (a + n) * (b + n) / (n + 1) * w
        total += term
        if abs(nxt) >= abs(term) and n > abs(a) + abs(b) + 2:
            break
        term = nxt
        if abs(term) < 1e-17 * abs(total):
            break
    scale = cmath.exp(-a * cmath.log(u))
    return scale * total, abs(scale * term)


def _psi_connection(a, c, u, eps):
    phi1, _, _, m1 = _phi_scalar(a, c, u, eps)
    phi2, _, _, m2 = _phi_scalar(a - c + 1, 2 - c, u, eps)
    g1 = gamma(1 - c) * rgamma(a - c + 1)
    g2 = gamma(c - 1) * rgamma(a) * cmath.exp((1 - c) * cmath.log(u))
    err = 4e-16 * (abs(g1) * m1 + abs(g2) * m2)
    return g1 * phi1 + g2 * phi2, err


def _psi_scalar(a, c, u, eps):
    val, err = _psi_connection(a, c, u, eps)
    if err > 1e-14 * abs(val) and abs(cmath.phase(u)) < 0.9 * math.pi:
        alt, alt_err = _psi_asymptotic(a, c, u)
        if alt_err < err:
            return alt
    return val


def tricomi_psi(p: ConfParams, u, eps: float = SERIES_EPS):
    """Tricomi's irregular function ``Psi(a, c; u)``.

    Uses the two-``Phi`` connection formula (so ``c`` must not be an
    integer).  When the estimated cancellation error of that formula is
    larger than the truncation error of the asymptotic expansion (large
    ``|u|``), the asymptotic expansion is used instead.
    """
    a, c = p.a, p.c
    if _near_integer(c):
        raise IntegerParameterDegeneracy(f"c = {c} is an integer")
    uv = nm.value(u)
    if nm.on_cut(uv):
        raise nm.BranchCut(f"Psi argument {uv!r} on the cut")
    f0 = nm.check_finite(_psi_scalar(a, c, uv, eps))
    if not isinstance(u, Jet2):
        return f0
    # Psi' = -a Psi(a+1, c+1), Psi'' = a(a+1) Psi(a+2, c+2)
    f1 = -a * _psi_scalar(a + 1, c + 1, uv, eps)
    f2 = a * (a + 1) * _psi_scalar(a + 2, c + 2, uv, eps)
    return nm.lift(u, f0, f1, f2)


def conf_local(k: int, p: ConfParams, u, eps: float = SERIES_EPS):
    """The four solutions of the confluent hypergeometric equation."""
    a, c = p.a, p.c
    if k == 1:
        return kummer_phi(p, u, eps)
    if k == 3:
        return tricomi_psi(p, u, eps)
    if k in (2, 4):
        q = ConfParams(1 - a, 2 - c)
        inner = kummer_phi(q, -u, eps) if k == 2 else tricomi_psi(q, -u, eps)
        return nm.exp(u) * nm.power(u, 1 - c) * inner
    raise ValueError(f"confluent local solution index {k} not in 1..4")


def confluent_terms(p: ConfParams, f: Jet2, u: complex):
    """Terms of ``u f'' + (c - u) f' - a f`` with derivatives in the ``x`` slots."""
    return (u * f.dxx, (p.c - u) * f.dx, -p.a * f.v)
