"""Heun and confluent Heun operators, local series solutions, concomitants."""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import numerics as nm
from .errors import EvaluationAtSingularity, LogarithmicCase, NoConvergenceEstimate
from .numerics import Jet2

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class HeunParams:
    """Parameters ``(a, q; alpha, beta, gamma, delta)``; epsilon is derived."""

    a: complex
    q: complex
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ("a", "q", "alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.a) < SINGULAR_TOL or abs(self.a - 1) < SINGULAR_TOL:
            raise ValueError("a must differ from 0 and 1")

    @property
    def epsilon(self) -> complex:
        return self.alpha + self.beta + 1 - self.gamma - self.delta

    def exponents(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def with_(self, **kw) -> "HeunParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class CheParams:
    """Confluent Heun parameters ``(sigma; rho, alpha, gamma, delta)``."""

    sigma: complex
    rho: complex
    alpha: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ("sigma", "rho", "alpha", "gamma", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.rho) < SINGULAR_TOL:
            raise ValueError("rho must be nonzero")

    def with_(self, **kw) -> "CheParams":
        return replace(self, **kw)


def _singular_points(p) -> tuple:
    return (0j, 1 + 0j, p.a) if isinstance(p, HeunParams) else (0j, 1 + 0j)


def check_regular(p, z: complex) -> None:
    for s in _singular_points(p):
        if abs(z - s) < SINGULAR_TOL:
            raise EvaluationAtSingularity(f"point {z!r} is a singular point")


# operator coefficients -----------------------------------------------------

def heun_coefficients(p: HeunParams, x: complex) -> tuple:
    """``(S, P, R)`` with ``M = S d^2 + P d + R``."""
    a, g, d, e = p.a, p.gamma, p.delta, p.epsilon
    s = x * (x - 1) * (x - a)
    pp = g * (x - 1) * (x - a) + d * x * (x - a) + e * x * (x - 1)
    return s, pp, p.alpha * p.beta * x


def che_coefficients(p: CheParams, x: complex) -> tuple:
    s = x * (x - 1)
    pp = -p.gamma + (p.gamma + p.delta) * x + p.rho * x * (x - 1)
    return s, pp, p.alpha * p.rho * x


def adjoint_coefficients(p: HeunParams, y: complex, printed: bool = False) -> tuple:
    """Coefficients of the formal adjoint of the Heun operator.

    The zeroth-order coefficient follows from ``(S f)'' - (P f)' + R f``;
    its slope is ``6 - 2(alpha+beta+1) + alpha*beta``.  ``printed=True``
    substitutes 4 for the 6, the form found in some references, kept so
    the discrepancy stays testable.
    """
    a, g, d, e = p.a, p.gamma, p.delta, p.epsilon
    s = y * (y - 1) * (y - a)
    pp = (2 - g) * (y - 1) * (y - a) + (2 - d) * y * (y - a) + (2 - e) * y * (y - 1)
    lead = 4 if printed else 6
    r = (lead - 2 * (p.alpha + p.beta + 1) + p.alpha * p.beta) * y + a * (g + d - 2) + e + g - 2
    return s, pp, r


def _coefficients(p, z):
    return heun_coefficients(p, z) if isinstance(p, HeunParams) else che_coefficients(p, z)


def operator_terms(p, jet: Jet2, point: complex, slot: str = "x") -> tuple:
    """Terms of ``M`` acting on the ``x`` or ``y`` slot of ``jet``."""
    s, pp, r = _coefficients(p, point)
    if slot == "x":
        return (s * jet.dxx, pp * jet.dx, r * jet.v)
    return (s * jet.dyy, pp * jet.dy, r * jet.v)


def _univariate_jet(f, x: complex) -> Jet2:
    j = f(Jet2.coord_x(x))
    return j if isinstance(j, Jet2) else Jet2(j)


def heun_operator_apply(p: HeunParams, f, x: complex, y_slot: bool = False) -> complex:
    """``M_x f`` for a univariate jet-evaluable ``f``.

    With ``y_slot=True``, ``f`` is a bivariate jet-evaluable ``f(X, Y)``
    and the operator acts on its second coordinate at ``(x[0], x[1])``.
    """
    return _apply(p, f, x, y_slot)


def che_operator_apply(p: CheParams, f, x: complex, y_slot: bool = False) -> complex:
    return _apply(p, f, x, y_slot)


def _apply(p, f, x, y_slot):
    if y_slot:
        px, py = x
        check_regular(p, py)
        jet = f(Jet2.coord_x(px), Jet2.coord_y(py))
        return sum(operator_terms(p, jet, py, "y"))
    check_regular(p, x)
    return sum(operator_terms(p, _univariate_jet(f, x), x, "x"))


def adjoint_operator_apply(p: HeunParams, f, y: complex, printed: bool = False) -> complex:
    check_regular(p, y)
    jet = _univariate_jet(f, y)
    s, pp, r = adjoint_coefficients(p, y, printed)
    return s * jet.dxx + pp * jet.dx + r * jet.v


def equation_residual(p, f, x: complex) -> float:
    """Relative residual of ``[M - q] f`` (or ``[M - sigma] f``) at ``x``."""
    check_regular(p, x)
    jet = _univariate_jet(f, x)
    acc = p.q if isinstance(p, HeunParams) else p.sigma
    return nm.relative_residual(operator_terms(p, jet, x) + (-acc * jet.v,))


# Frobenius solutions ---------------------------------------------------------

@dataclass(frozen=True)
class FrobeniusSolution:
    """Local series ``z^exponent * sum c_n z^n`` around ``z = 0``."""

    params: object
    exponent: complex
    coefficients: tuple
    radius: float
    tail: float = 0.0

    def __call__(self, z):
        zv = nm.value(z)
        if abs(zv) > self.radius * (1 + 1e-12):
            from .errors import OutsideValidity

            raise OutsideValidity(f"|z| = {abs(zv):.4g} beyond radius {self.radius:.4g}")
        s0 = s1 = s2 = 0j
        for c in reversed(self.coefficients):
            s2 = s2 * zv + 2 * s1
            s1 = s1 * zv + s0
            s0 = s0 * zv + c
        base = nm.lift(z, s0, s1, s2) if isinstance(z, Jet2) else s0
        if self.exponent == 0:
            return base
        return nm.power(z, self.exponent) * base


def _exponent_value(p, choice) -> complex:
    if choice in (0, "0", "zero"):
        return 0j
    if choice in ("1-gamma", "second"):
        return 1 - p.gamma
    return complex(choice)


def _frobenius(p, tau, recurrence, radius, n_terms, cap=4000):
    coeffs = [1.0 + 0j]
    prev = 0j
    scale = 1.0
    quiet = 0
    for k in range(cap):
        lead, mid, low = recurrence(k, tau)
        if abs(lead) < 1e-13:
            raise LogarithmicCase(f"indicial resonance at step {k + 1}")
        nxt = (mid * coeffs[k] + low * prev) / lead
        prev = coeffs[k]
        coeffs.append(nxt)
        mag = abs(nxt) * radius ** (k + 1)
        scale = max(scale, mag)
        if mag < 1e-17 * scale:
            quiet += 1
        else:
            quiet = 0
        if quiet >= 4 and len(coeffs) >= n_terms:
            tail = max(abs(c) * radius ** n for n, c in enumerate(coeffs[-4:], len(coeffs) - 4))
            return FrobeniusSolution(p, tau, tuple(coeffs), radius, tail / scale)
    raise NoConvergenceEstimate("coefficients did not decay within the radius")


def default_radius(p) -> float:
    reach = min(1.0, abs(p.a)) if isinstance(p, HeunParams) else 1.0
    return 0.35 * reach


def frobenius_heun(p: HeunParams, exponent=0, n_terms: int = 8, radius: float | None = None):
    """Series solution of ``[M - q] H = 0`` at the origin.

    Substituting ``sum c_n x^(n+t)`` gives the three-term recurrence
    ``a(k+1+t)(k+t+gamma) c_{k+1} = [(k+t)((k+t-1+gamma)(1+a) + delta a + eps) + q] c_k
    - (k-1+t+alpha)(k-1+t+beta) c_{k-1}``.
    """
    tau = _exponent_value(p, exponent)
    a, al, be, g, d, e, q = p.a, p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.q

    def rec(k, t):
        s = k + t
        return (a * (s + 1) * (s + g),
                s * ((s - 1 + g) * (1 + a) + d * a + e) + q,
                -(s - 1 + al) * (s - 1 + be))

    return _frobenius(p, tau, rec, radius or default_radius(p), max(n_terms, 8))


def frobenius_che(p: CheParams, exponent=0, n_terms: int = 8, radius: float | None = None):
    """Series solution of ``[M - sigma] H = 0`` at the origin.

    Recurrence: ``(k+1+t)(k+t+gamma) c_{k+1} = [(k+t)(k+t-1+gamma+delta-rho) - sigma] c_k
    + rho (k-1+t+alpha) c_{k-1}``.
    """
    tau = _exponent_value(p, exponent)
    r, al, g, d, sg = p.rho, p.alpha, p.gamma, p.delta, p.sigma

    def rec(k, t):
        s = k + t
        return ((s + 1) * (s + g), s * (s - 1 + g + d - r) - sg, r * (s - 1 + al))

    return _frobenius(p, tau, rec, radius or default_radius(p), max(n_terms, 8))


# concomitants ----------------------------------------------------------------

def weight_jet(p: HeunParams, y: Jet2, shift: int = -1) -> Jet2:
    """``y^(gamma+s) (1-y)^(delta+s) (1-y/a)^(eps+s)`` on a jet."""
    return (nm.power(y, p.gamma + shift) * nm.power(1 - y, p.delta + shift)
            * nm.power(1 - y / p.a, p.epsilon + shift))


def che_weight_jet(p: CheParams, y: Jet2, shift: int = -1) -> Jet2:
    return nm.exp(p.rho * y) * nm.power(y, p.gamma + shift) * nm.power(1 - y, p.delta + shift)


def bilinear_concomitant(p, h, g, x: complex, y: complex) -> complex:
    """Weight-factored concomitant ``W(y) [H dG/dy - G dH/dy]``.

    ``h`` is univariate, ``g`` bivariate; both jet-evaluable.  ``W`` is the
    Heun weight raised by one, or its confluent analogue with ``e^(rho y)``.
    """
    check_regular(p, y)
    yj = Jet2.coord_y(y)
    hj = h(yj)
    gj = g(Jet2.coord_x(x), yj)
    w = weight_jet(p, Jet2(y), 0) if isinstance(p, HeunParams) else che_weight_jet(p, Jet2(y), 0)
    return w.v * (hj.v * gj.dy - gj.v * hj.dy)


def _unweighted_pieces(p: HeunParams, hj: Jet2, kj: Jet2, y: complex):
    a, g, d, e = p.a, p.gamma, p.delta, p.epsilon
    s = y * (y - 1) * (y - a)
    ds = (y - 1) * (y - a) + y * (y - a) + y * (y - 1)
    r = (1 - g) * (y - 1) * (y - a) + (1 - d) * y * (y - a) + (1 - e) * y * (y - 1)
    dr = (1 - g) * (2 * y - 1 - a) + (1 - d) * (2 * y - a) + (1 - e) * (2 * y - 1)
    return s, ds, r, dr


def kernel_concomitant(p: HeunParams, hj: Jet2, kj: Jet2, y: complex) -> complex:
    """Concomitant for the unweighted kernel ``K = w G`` (adjoint form)."""
    s, _, r, _ = _unweighted_pieces(p, hj, kj, y)
    return s * (hj.v * kj.dy - kj.v * hj.dy) + r * hj.v * kj.v


def kernel_concomitant_dy(p: HeunParams, hj: Jet2, kj: Jet2, y: complex) -> tuple:
    """Terms of ``dP/dy`` for :func:`kernel_concomitant`, by the product rule."""
    s, ds, r, dr = _unweighted_pieces(p, hj, kj, y)
    return (
        ds * hj.v * kj.dy, -ds * kj.v * hj.dy,
        s * hj.v * kj.dyy, -s * kj.v * hj.dyy,
        dr * hj.v * kj.v, r * hj.dy * kj.v, r * hj.v * kj.dy,
    )


def lagrange_residual(p: HeunParams, h, g, x: complex, y: complex, printed: bool = False):
    """Relative residual of ``H Mbar_y K - K M_y H - dP/dy`` with ``K = w G``.

    Returns ``(residual, K jet, H jet)``.
    """
    check_regular(p, y)
    yj = Jet2.coord_y(y)
    hj = h(yj)
    kj = weight_jet(p, yj) * g(Jet2.coord_x(x), yj)
    s, pp, r = adjoint_coefficients(p, y, printed)
    lhs = (hj.v * s * kj.dyy, hj.v * pp * kj.dy, hj.v * r * kj.v)
    s2, p2, r2 = heun_coefficients(p, y)
    mid = (-kj.v * s2 * hj.dyy, -kj.v * p2 * hj.dy, -kj.v * r2 * hj.v)
    rhs = tuple(-t for t in kernel_concomitant_dy(p, hj, kj, y))
    return nm.relative_residual(lhs + mid + rhs)
