"""Transformations of the Heun equation and its confluent form.

A solution transformation is stored as a :class:`TransformRecord`:

* a Möbius substitution, identified exactly by how it permutes the four
  singular points ``(0, 1, a, inf)``;
* prefactor exponents for the factors ``x``, ``x - 1``, ``x - a``, each an
  integer affine form over ``(alpha, beta, gamma, delta, 1)``;
* the parameter map, four affine forms of the same kind;
* an accessory map ``q -> c0 + c1 q``, derived rather than tabulated.

Applying a record means ``H(x) = f(x) h(rho(x))`` where ``h`` solves the
equation with the mapped parameters.  Because everything except the
accessory map is integral and exact, group closure is decided without any
floating-point comparison.
"""

from __future__ import annotations

import cmath
import functools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import sympy

from . import numerics as nm
from .errors import (
    ClosureDeficit,
    ClosureOverflow,
    FitInconsistent,
    OutsideValidity,
)
from .heun_ops import (
    CheParams,
    HeunParams,
    equation_residual,
    frobenius_che,
    frobenius_heun,
)

Affine = tuple  # five integers over (alpha, beta, gamma, delta, 1)

ZERO: Affine = (0, 0, 0, 0, 0)
ALPHA: Affine = (1, 0, 0, 0, 0)
BETA: Affine = (0, 1, 0, 0, 0)
GAMMA: Affine = (0, 0, 1, 0, 0)
DELTA: Affine = (0, 0, 0, 1, 0)
EPS: Affine = (1, 1, -1, -1, 1)
IDENTITY_PARAMS = (ALPHA, BETA, GAMMA, DELTA)


def aff(*terms) -> Affine:
    """Sum of integer multiples of basis forms, e.g. ``aff(ALPHA, (1, BETA))``."""
    out = [0, 0, 0, 0, 0]
    for t in terms:
        if isinstance(t, int):
            out[4] += t
            continue
        k, form = t if len(t) == 2 else (1, t)
        for i in range(5):
            out[i] += k * form[i]
    return tuple(out)


def substitute(form: Affine, param_map: Sequence[Affine]) -> Affine:
    """Rewrite ``form`` (in mapped parameters) in terms of source parameters."""
    out = [0, 0, 0, 0, form[4]]
    for k in range(4):
        if form[k]:
            for i in range(5):
                out[i] += form[k] * param_map[k][i]
    return tuple(out)


def evaluate_affine(form: Affine, values: Sequence) -> object:
    return form[0] * values[0] + form[1] * values[1] + form[2] * values[2] + form[3] * values[3] + form[4]


_NAMES = ("alpha", "beta", "gamma", "delta")


def affine_str(form: Affine, names=_NAMES) -> str:
    parts = []
    for k, n in zip(form[:4], names):
        if k:
            parts.append(("+" if k > 0 else "-") + ("" if abs(k) == 1 else str(abs(k))) + n)
    if form[4] or not parts:
        parts.append(("+" if form[4] >= 0 else "-") + str(abs(form[4])))
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


# Möbius substitutions ------------------------------------------------------

# (label, coefficients (A, B, C, D) of (A x + B)/(C x + D), image of a, parameter map)
_B1 = aff(1, ALPHA, (-1, DELTA))        # 1 + alpha - delta
_B2 = aff(GAMMA, DELTA, (-1, BETA))     # gamma + delta - beta
_D1 = aff(1, ALPHA, (-1, BETA))         # 1 + alpha - beta
_B3 = aff(1, ALPHA, (-1, GAMMA))        # 1 + alpha - gamma

_MOBIUS_TABLE = [
    ("x", lambda a: (1, 0, 0, 1), "a", lambda a: a, (ALPHA, BETA, GAMMA, DELTA)),
    ("x/(x-1)", lambda a: (1, 0, 1, -1), "a/(a-1)", lambda a: a / (a - 1), (ALPHA, _B1, GAMMA, _D1)),
    ("x/(x-a)", lambda a: (1, 0, 1, -a), "1/(1-a)", lambda a: 1 / (1 - a), (ALPHA, _B2, GAMMA, _D1)),
    ("1-x", lambda a: (-1, 1, 0, 1), "1-a", lambda a: 1 - a, (ALPHA, BETA, DELTA, GAMMA)),
    ("(x-1)/(x-a)", lambda a: (1, -1, 1, -a), "1/a", lambda a: 1 / a, (ALPHA, _B2, DELTA, _D1)),
    ("(a-x)/a", lambda a: (-1, a, 0, a), "(a-1)/a", lambda a: (a - 1) / a, (ALPHA, BETA, EPS, GAMMA)),
    ("1/x", lambda a: (0, 1, 1, 0), "1/a", lambda a: 1 / a, (ALPHA, _B3, _D1, DELTA)),
    ("(x-1)/x", lambda a: (1, -1, 1, 0), "(a-1)/a", lambda a: (a - 1) / a, (ALPHA, _B3, DELTA, _D1)),
    ("(x-a)/x", lambda a: (1, -a, 1, 0), "1-a", lambda a: 1 - a, (ALPHA, _B3, EPS, _D1)),
    ("1/(1-x)", lambda a: (0, 1, -1, 1), "1/(1-a)", lambda a: 1 / (1 - a), (ALPHA, _B1, _D1, GAMMA)),
    ("(x-a)/(x-1)", lambda a: (1, -a, 1, -1), "a", lambda a: a, (ALPHA, _B1, EPS, _D1)),
    ("a/(a-x)", lambda a: (0, a, -1, a), "a/(a-1)", lambda a: a / (a - 1), (ALPHA, _B2, _D1, GAMMA)),
    ("x/a", lambda a: (1, 0, 0, a), "1/a", lambda a: 1 / a, (ALPHA, BETA, GAMMA, EPS)),
    ("(a-1)x/(a(x-1))", lambda a: (a - 1, 0, a, -a), "(a-1)/a", lambda a: (a - 1) / a, (ALPHA, _B1, GAMMA, EPS)),
    ("(1-a)x/(x-a)", lambda a: (1 - a, 0, 1, -a), "1-a", lambda a: 1 - a, (ALPHA, _B2, GAMMA, DELTA)),
    ("(1-x)/(1-a)", lambda a: (-1, 1, 0, 1 - a), "1/(1-a)", lambda a: 1 / (1 - a), (ALPHA, BETA, DELTA, EPS)),
    ("a(x-1)/(x-a)", lambda a: (a, -a, 1, -a), "a", lambda a: a, (ALPHA, _B2, DELTA, GAMMA)),
    ("(a-x)/(a-1)", lambda a: (-1, a, 0, a - 1), "a/(a-1)", lambda a: a / (a - 1), (ALPHA, BETA, EPS, DELTA)),
    ("a/x", lambda a: (0, a, 1, 0), "a", lambda a: a, (ALPHA, _B3, _D1, EPS)),
    ("a(x-1)/((a-1)x)", lambda a: (a, -a, a - 1, 0), "a/(a-1)", lambda a: a / (a - 1), (ALPHA, _B3, DELTA, EPS)),
    ("(x-a)/((1-a)x)", lambda a: (1, -a, 1 - a, 0), "1/(1-a)", lambda a: 1 / (1 - a), (ALPHA, _B3, EPS, DELTA)),
    ("(1-a)/(1-x)", lambda a: (0, 1 - a, -1, 1), "1-a", lambda a: 1 - a, (ALPHA, _B1, _D1, EPS)),
    ("(x-a)/(a(x-1))", lambda a: (1, -a, a, -a), "1/a", lambda a: 1 / a, (ALPHA, _B1, EPS, GAMMA)),
    ("(a-1)/(a-x)", lambda a: (0, a - 1, -1, a), "(a-1)/a", lambda a: (a - 1) / a, (ALPHA, _B2, _D1, DELTA)),
]

MAIER_LABELS_MOBIUS = (
    "M1", "M5", "M13", "M49", "M57", "M101", "M145", "M53", "M97", "M149", "M105", "M157",
    "M9", "M21", "M17", "M61", "M65", "M109", "M153", "M69", "M117", "M161", "M113", "M165",
)
MAIER_LABELS_HOMOTOPIC = ("M1", "M25", "M2", "M26", "M3", "M27", "M4", "M28")

A_ORBIT = ("a", "1/a", "1-a", "1/(1-a)", "a/(a-1)", "(a-1)/a")

# probe value of a used to read off permutations; any generic value works
_PROBE_A = complex(2.7, 1.3)


def _mobius_eval(coeffs, z):
    A, B, C, D = coeffs
    if z == math.inf:
        return math.inf if C == 0 else A / C
    den = C * z + D
    if abs(den) < 1e-12:
        return math.inf
    return (A * z + B) / den


def _permutation(coeffs_fn, target_fn) -> tuple:
    a = _PROBE_A
    coeffs = coeffs_fn(a)
    at = target_fn(a)
    targets = (0j, 1 + 0j, at, math.inf)
    perm = []
    for s in (0j, 1 + 0j, a, math.inf):
        img = _mobius_eval(coeffs, s)
        for k, t in enumerate(targets):
            if (img == math.inf and t == math.inf) or (
                    img != math.inf and t != math.inf and abs(img - t) < 1e-9):
                perm.append(k)
                break
        else:
            raise AssertionError("substitution does not permute the singular points")
    return tuple(perm)


@dataclass(frozen=True)
class MobiusMap:
    """One of the 24 substitutions; ``perm[i]`` is the image index of point ``i``.

    Points are indexed ``0 -> 0``, ``1 -> 1``, ``2 -> a``, ``3 -> infinity``.
    """

    index: int
    perm: tuple

    @property
    def formula(self) -> str:
        return _MOBIUS_TABLE[self.index - 1][0]

    @property
    def a_target_tag(self) -> str:
        return _MOBIUS_TABLE[self.index - 1][2]

    def coefficients(self, a):
        return _MOBIUS_TABLE[self.index - 1][1](a)

    def normalized_coefficients(self, a) -> tuple:
        c = [complex(v) for v in self.coefficients(a)]
        lead = next(v for v in c if v != 0)
        return tuple(v / lead for v in c)

    def a_target(self, a):
        return _MOBIUS_TABLE[self.index - 1][3](a)

    def __call__(self, x, a):
        A, B, C, D = self.coefficients(a)
        return (A * x + B) / (C * x + D)

    def inverse_point(self, z: complex, a: complex) -> complex:
        A, B, C, D = self.coefficients(a)
        return (D * z - B) / (-C * z + A)

    def derivatives(self, x, a):
        """``(rho, rho', rho'')`` at ``x``; generic over numeric or symbolic input."""
        A, B, C, D = self.coefficients(a)
        den = C * x + D
        det = A * D - B * C
        return (A * x + B) / den, det / den ** 2, -2 * C * det / den ** 3


@functools.lru_cache(maxsize=None)
def _mobius_by_perm() -> dict:
    out = {}
    for j, (_, cf, _, tf, _) in enumerate(_MOBIUS_TABLE, 1):
        out[_permutation(cf, tf)] = j
    if len(out) != 24:
        raise AssertionError("substitution table does not realise 24 permutations")
    return out


def mobius_map(j: int) -> MobiusMap:
    cf, tf = _MOBIUS_TABLE[j - 1][1], _MOBIUS_TABLE[j - 1][3]
    return MobiusMap(j, _permutation(cf, tf))


def mobius_from_perm(perm: tuple) -> MobiusMap:
    return MobiusMap(_mobius_by_perm()[perm], perm)


# transformation records ----------------------------------------------------

@dataclass(frozen=True)
class TransformRecord:
    """One solution transformation ``H(x) = f(x) h(rho(x))``."""

    mobius: MobiusMap
    exponents: tuple          # affine exponents of x, x-1, x-a
    param_map: tuple          # affine alpha', beta', gamma', delta'
    name: str = field(default="", compare=False)
    accessory: object = field(default=None, compare=False)  # verbatim sympy form if known

    @property
    def key(self) -> tuple:
        return (self.mobius.perm, self.exponents, self.param_map)

    def target_exponents(self, p: HeunParams) -> tuple:
        vals = p.exponents()
        return tuple(evaluate_affine(f, vals) for f in self.param_map)

    def prefactor_exponents(self, p: HeunParams) -> tuple:
        vals = p.exponents()
        return tuple(evaluate_affine(f, vals) for f in self.exponents)

    def prefactor(self, x, a, exps):
        """``x^e0 (1-x)^e1 (1-x/a)^e2``, scalar or jet."""
        out = 1
        for base, e in zip((x, 1 - x, 1 - x / a), exps):
            if e != 0:
                out = nm.power(base, e) * out
        return out

    def compose(self, other: "TransformRecord") -> "TransformRecord":
        """Apply ``self`` first, then ``other`` to the transformed function."""
        perm = tuple(other.mobius.perm[self.mobius.perm[i]] for i in range(4))
        inv = {self.mobius.perm[i]: i for i in range(4)}
        exps = [list(e) for e in self.exponents]
        pole = inv[3]
        for j in range(3):
            e = substitute(other.exponents[j], self.param_map)
            src = inv[j]
            if src != 3:
                exps[src] = [u + v for u, v in zip(exps[src], e)]
            if pole != 3:
                exps[pole] = [u - v for u, v in zip(exps[pole], e)]
        pmap = tuple(substitute(f, self.param_map) for f in other.param_map)
        name = f"{self.name}*{other.name}" if self.name and other.name else ""
        return TransformRecord(mobius_from_perm(perm), tuple(tuple(e) for e in exps), pmap, name)


def identity_record() -> TransformRecord:
    return TransformRecord(mobius_map(1), (ZERO, ZERO, ZERO), IDENTITY_PARAMS, "T1")


_Q = sympy.Symbol("q")
_A = sympy.Symbol("a")
_AL, _BE, _GA, _DE = sympy.symbols("alpha beta gamma delta")
_EP = _AL + _BE + 1 - _GA - _DE


def _homotopic_generators(swap_ab: bool = False) -> dict:
    """The three generating power transformations.

    ``swap_ab`` exchanges the first two parameter images; it exists only as
    a negative control for the ordering rule.
    """
    def order(b, c, g, d):
        return (c, b, g, d) if swap_ab else (b, c, g, d)

    one_minus_gamma = aff(1, (-1, GAMMA))
    one_minus_delta = aff(1, (-1, DELTA))
    one_minus_eps = aff(GAMMA, DELTA, (-1, ALPHA), (-1, BETA))
    t2 = TransformRecord(
        mobius_map(1), (one_minus_gamma, ZERO, ZERO),
        order(aff(BETA, (-1, GAMMA), 1), aff(ALPHA, (-1, GAMMA), 1), aff(2, (-1, GAMMA)), DELTA),
        "T2", _Q - (_GA - 1) * (_DE * _A + _EP))
    t3 = TransformRecord(
        mobius_map(1), (ZERO, one_minus_delta, ZERO),
        order(aff(BETA, (-1, DELTA), 1), aff(ALPHA, (-1, DELTA), 1), GAMMA, aff(2, (-1, DELTA))),
        "T3", _Q - (_DE - 1) * _GA * _A)
    t5 = TransformRecord(
        mobius_map(1), (ZERO, ZERO, one_minus_eps),
        order(aff((-1, ALPHA), GAMMA, DELTA), aff((-1, BETA), GAMMA, DELTA), GAMMA, DELTA),
        "T5", _Q - _GA * (_AL + _BE - _GA - _DE))
    return {2: t2, 3: t3, 5: t5}


def homotopic(i: int, swap_ab: bool = False) -> TransformRecord:
    """Power transformation ``T_i``; ``T4, T6, T7, T8`` are products."""
    gens = _homotopic_generators(swap_ab)
    word = {1: (), 2: (2,), 3: (3,), 4: (2, 3), 5: (5,), 6: (2, 5), 7: (3, 5), 8: (2, 3, 5)}[i]
    rec = identity_record()
    for g in word:
        rec = rec.compose(gens[g])
    acc = gens[word[0]].accessory if len(word) == 1 else None
    return TransformRecord(rec.mobius, rec.exponents, rec.param_map, f"T{i}", acc)


def mobius(j: int) -> TransformRecord:
    """Möbius substitution ``M_j``, prefactor ``(point sent to infinity)^(-alpha)``."""
    m = mobius_map(j)
    exps = [ZERO, ZERO, ZERO]
    pole = m.perm.index(3)
    if pole != 3:
        exps[pole] = aff((-1, ALPHA))
    return TransformRecord(m, tuple(exps), _MOBIUS_TABLE[j - 1][4], f"K{j}")


# accessory maps ------------------------------------------------------------

def _log_derivatives(exps, x, a):
    """``f'/f`` and ``f''/f`` for ``f = x^e0 (x-1)^e1 (x-a)^e2``."""
    d1 = 0
    d2 = 0
    for s, e in zip((0, 1, a), exps):
        d1 = d1 + e / (x - s)
        d2 = d2 + e / (x - s) ** 2
    return d1, d1 * d1 - d2


def transformed_coefficients(t: TransformRecord, a, params, q, x):
    """Pull the source operator through ``f(x) h(rho(x))``.

    ``params`` are (alpha, beta, gamma, delta) of the source.  Returns
    ``(gauge, first_order_mismatch_terms, q_mapped)``; the mapped accessory
    parameter is read off the zeroth-order coefficient.  Works for complex
    numbers and for sympy expressions alike.
    """
    al, be, ga, de = params
    ep = al + be + 1 - ga - de
    vals = (al, be, ga, de)
    exps = tuple(evaluate_affine(f, vals) for f in t.exponents)
    tal, tbe, tga, tde = (evaluate_affine(f, vals) for f in t.param_map)
    tep = tal + tbe + 1 - tga - tde
    at = t.mobius.a_target(a)
    z, z1, z2 = t.mobius.derivatives(x, a)
    s = x * (x - 1) * (x - a)
    pp = ga * (x - 1) * (x - a) + de * x * (x - a) + ep * x * (x - 1)
    d1, d2 = _log_derivatives(exps, x, a)
    c2 = s * z1 * z1
    c1 = s * (2 * d1 * z1 + z2) + pp * z1
    c0 = s * d2 + pp * d1 + al * be * x - q
    ts = z * (z - 1) * (z - at)
    tp = tga * (z - 1) * (z - at) + tde * z * (z - at) + tep * z * (z - 1)
    gauge = c2 / ts
    mismatch = (c1, -gauge * tp)
    q_mapped = tal * tbe * z - c0 / gauge
    return gauge, mismatch, q_mapped


@dataclass(frozen=True)
class AccessoryMap:
    c0: complex
    c1: complex

    def __call__(self, q):
        return self.c0 + self.c1 * q


def derive_accessory_map(t: TransformRecord, probe: HeunParams, tol: float = 1e-9) -> AccessoryMap:
    """Fit ``q -> c0 + c1 q`` for ``t`` at the parameter values of ``probe``.

    The mapped accessory parameter is computed at three points for two
    values of ``q``; the pieces must agree (and the first-order terms must
    match) or :class:`FitInconsistent` is raised.  The fit is then checked
    at five further ``(x, q)`` pairs.
    """
    params = probe.exponents()
    a = probe.a
    pts = [0.21 + 0.13j, -0.37 + 0.52j, 0.63 - 0.29j, 1.7 + 0.8j, -0.9 - 1.1j,
           0.09 + 0.71j, 2.3 - 0.4j, -0.45 - 0.15j]
    qs = (probe.q, probe.q + 1.37 - 0.61j)

    def mapped(x, q):
        _, mism, qt = transformed_coefficients(t, a, params, q, x)
        if abs(mism[0] + mism[1]) > tol * (abs(mism[0]) + abs(mism[1]) + 1e-300):
            raise FitInconsistent(f"{t.name}: first-order coefficients do not match")
        return qt

    fits = []
    for q in qs:
        vals = [mapped(x, q) for x in pts[:3]]
        spread = max(abs(v - vals[0]) for v in vals)
        if spread > tol * max(1.0, abs(vals[0])):
            raise FitInconsistent(f"{t.name}: mapped accessory parameter depends on x")
        fits.append(vals[0])
    c1 = (fits[1] - fits[0]) / (qs[1] - qs[0])
    c0 = fits[0] - c1 * qs[0]
    amap = AccessoryMap(c0, c1)
    for k, x in enumerate(pts[3:]):
        q = probe.q + (0.5 - 0.3j) * (k + 1)
        if abs(mapped(x, q) - amap(q)) > tol * max(1.0, abs(amap(q))):
            raise FitInconsistent(f"{t.name}: accessory map not affine in q")
    return amap


_FIELD, _FA, _FQ, _FAL, _FBE, _FGA, _FDE = sympy.polys.fields.field("a,q,alpha,beta,gamma,delta", sympy.QQ)


@functools.lru_cache(maxsize=None)
def _accessory_exact_cached(key) -> tuple:
    # arithmetic in the rational function field keeps every quotient reduced,
    # which is far cheaper than simplifying one large expression at the end
    perm, exps, pmap = key
    t = TransformRecord(mobius_from_perm(perm), exps, pmap)
    x = _FIELD.one * 3 / 7
    _, mism, qt = transformed_coefficients(t, _FA, (_FAL, _FBE, _FGA, _FDE), _FQ, x)
    if mism[0] + mism[1] != 0:
        raise FitInconsistent("first-order coefficients do not match symbolically")
    num, den = qt.numer, qt.denom
    if den.degree(_FQ.numer) > 0 or num.degree(_FQ.numer) > 1:
        raise FitInconsistent("accessory map not affine in q")
    c1 = _FIELD.new(num.diff(_FQ.numer), den)
    c0 = _FIELD.new(num.subs(_FQ.numer, 0), den)
    return sympy.factor(c0.as_expr()), sympy.factor(c1.as_expr())


def accessory_exact(t: TransformRecord) -> tuple:
    """Exact ``(c0, c1)`` as sympy expressions in ``a, alpha, beta, gamma, delta``."""
    return _accessory_exact_cached(t.key)


def accessory_symbols():
    return {"a": _A, "q": _Q, "alpha": _AL, "beta": _BE, "gamma": _GA, "delta": _DE}


def target_params(t: TransformRecord, p: HeunParams, amap: AccessoryMap | None = None) -> HeunParams:
    amap = amap or derive_accessory_map(t, p)
    al, be, ga, de = t.target_exponents(p)
    return HeunParams(t.mobius.a_target(p.a), amap(p.q), al, be, ga, de)


def apply_transform(t: TransformRecord, p: HeunParams, h, x):
    """``f(x) h(rho(x))`` for scalar or jet ``x``."""
    z = t.mobius(x, p.a)
    try:
        hv = h(z)
    except OutsideValidity:
        raise
    return t.prefactor(x, p.a, t.prefactor_exponents(p)) * hv


# group generation ----------------------------------------------------------

@dataclass
class GroupTable:
    elements: list
    index: dict

    def __len__(self):
        return len(self.elements)

    def compose(self, i: int, j: int) -> int:
        return self.index[self.elements[i].compose(self.elements[j]).key]

    def identity_index(self) -> int:
        return self.index[identity_record().key]


def generate_group(generators: Iterable[TransformRecord] | None = None,
                   expected: int | None = 192, limit: int = 2000) -> GroupTable:
    """Closure of the generators under composition (breadth first)."""
    if generators is None:
        generators = [homotopic(i) for i in (2, 3, 5)] + [mobius(j) for j in range(2, 25)]
    gens = list(generators)
    seed = identity_record()
    elements = [seed]
    index = {seed.key: 0}
    frontier = [seed]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                c = e.compose(g)
                if c.key not in index:
                    index[c.key] = len(elements)
                    elements.append(c)
                    nxt.append(c)
                    if len(elements) > limit:
                        raise ClosureOverflow(f"more than {limit} elements")
        frontier = nxt
    # stable, readable names: homotopic part times Möbius part where possible
    named = _name_elements(elements)
    table = GroupTable(named, {e.key: i for i, e in enumerate(named)})
    if expected is not None:
        if len(table) > expected:
            raise ClosureOverflow(f"closure has {len(table)} elements, expected {expected}")
        if len(table) < expected:
            raise ClosureDeficit(f"closure has {len(table)} elements, expected {expected}")
    return table


def _name_elements(elements: list) -> list:
    lookup = {}
    for j in range(1, 25):
        for i in range(1, 9):
            rec = homotopic(i).compose(mobius(j))
            lookup.setdefault(rec.key, f"T{i}K{j}")
    out = []
    for e in elements:
        name = lookup.get(e.key, e.name or "?")
        out.append(TransformRecord(e.mobius, e.exponents, e.param_map, name, None))
    out.sort(key=lambda r: _order_key(r.name))
    return out


def _order_key(name: str):
    m = re.fullmatch(r"T(\d)K(\d+)", name)
    return (int(m.group(2)), int(m.group(1))) if m else (999, 0)


# verification helpers --------------------------------------------------------

def feasible_point(t: TransformRecord, p: HeunParams, tp: HeunParams, radius: float,
                   tries: int = 12):
    """A source point whose image lies well inside the target series disk."""
    for k in range(tries):
        theta = 0.7 + 2 * math.pi * k / tries
        z = 0.6 * radius * cmath.exp(1j * theta)
        try:
            x = t.mobius.inverse_point(z, p.a)
        except ZeroDivisionError:
            continue
        if not nm._finite(x) or min(abs(x), abs(x - 1), abs(x - p.a)) < 1e-3:
            continue
        bases = (x, 1 - x, 1 - x / p.a, z)
        if any(nm.on_cut(b) for b in bases):
            continue
        return x
    return None


def transformed_solution_residual(t: TransformRecord, p: HeunParams):
    """Residual of ``[M_x - q](f h(rho))`` at a feasible point, or ``None`` when infeasible."""
    amap = derive_accessory_map(t, p)
    tp = target_params(t, p, amap)
    h = frobenius_heun(tp)
    x = feasible_point(t, p, tp, h.radius)
    if x is None:
        return None, None
    res = equation_residual(p, lambda X: apply_transform(t, p, h, X), x)
    return res, x


# confluent Heun transformations ---------------------------------------------

RHO: Affine = (1, 0, 0, 0, 0)
C_ALPHA: Affine = (0, 1, 0, 0, 0)
C_GAMMA: Affine = (0, 0, 1, 0, 0)
C_DELTA: Affine = (0, 0, 0, 1, 0)
_SG, _RH = sympy.symbols("sigma rho")


def _che_values(p: CheParams) -> tuple:
    return (p.rho, p.alpha, p.gamma, p.delta)


@dataclass(frozen=True)
class CheRecord:
    """Confluent transformation ``H(x) = x^e0 (1-x)^e1 e^(c x) h(x or 1-x)``.

    Affine forms are over ``(rho, alpha, gamma, delta, 1)``.
    """

    flip: bool
    exponents: tuple      # forms for x, 1-x, and the exponential rate c
    param_map: tuple      # rho', alpha', gamma', delta'
    accessory: object = field(compare=False)   # sympy expression in sigma, rho, ...
    name: str = field(default="", compare=False)

    @property
    def key(self):
        return (self.flip, self.exponents, self.param_map)

    def compose(self, other: "CheRecord") -> "CheRecord":
        e = [substitute(f, self.param_map) for f in other.exponents]
        x_e, one_e, rate = e
        if self.flip:
            x_e, one_e, rate = one_e, x_e, tuple(-v for v in rate)
        exps = (aff(self.exponents[0], x_e), aff(self.exponents[1], one_e),
                aff(self.exponents[2], rate))
        pmap = tuple(substitute(f, self.param_map) for f in other.param_map)
        acc = other.accessory.subs(self._symbol_map(), simultaneous=True)
        return CheRecord(self.flip != other.flip, exps, pmap, sympy.expand(acc),
                         f"{self.name}*{other.name}")

    def _symbol_map(self) -> dict:
        syms = (_RH, _AL, _GA, _DE)
        out = {s: _affine_sym(f, syms) for s, f in zip(syms, self.param_map)}
        out[_SG] = self.accessory
        return out

    def accessory_value(self, p: CheParams) -> complex:
        subs = {_SG: p.sigma, _RH: p.rho, _AL: p.alpha, _GA: p.gamma, _DE: p.delta}
        return complex(self.accessory.evalf(subs=subs))

    def target(self, p: CheParams) -> CheParams:
        vals = _che_values(p)
        r, al, ga, de = (evaluate_affine(f, vals) for f in self.param_map)
        return CheParams(self.accessory_value(p), r, al, ga, de)

    def apply(self, p: CheParams, h, x):
        vals = _che_values(p)
        e0, e1, c = (evaluate_affine(f, vals) for f in self.exponents)
        z = 1 - x if self.flip else x
        out = h(z)
        if c != 0:
            out = nm.exp(c * x) * out
        if e1 != 0:
            out = nm.power(1 - x, e1) * out
        if e0 != 0:
            out = nm.power(x, e0) * out
        return out


def _affine_sym(form, syms):
    return sum(k * s for k, s in zip(form[:4], syms)) + form[4]


def che_identity() -> CheRecord:
    return CheRecord(False, (ZERO, ZERO, ZERO), (RHO, C_ALPHA, C_GAMMA, C_DELTA), _SG, "T0")


def che_transform(i: int) -> CheRecord:
    """The four generating rules of the confluent equation."""
    if i == 1:
        return CheRecord(False, (ZERO, aff(1, (-1, C_DELTA)), ZERO),
                         (RHO, aff(C_ALPHA, 1, (-1, C_DELTA)), C_GAMMA, aff(2, (-1, C_DELTA))),
                         _SG - _GA * (1 - _DE), "T1")
    if i == 2:
        return CheRecord(False, (aff(1, (-1, C_GAMMA)), ZERO, ZERO),
                         (RHO, aff(C_ALPHA, 1, (-1, C_GAMMA)), aff(2, (-1, C_GAMMA)), C_DELTA),
                         _SG + (1 - _GA) * (_RH - _DE), "T2")
    if i == 3:
        return CheRecord(False, (ZERO, ZERO, aff((-1, RHO))),
                         (aff((-1, RHO)), aff(C_GAMMA, C_DELTA, (-1, C_ALPHA)), C_GAMMA, C_DELTA),
                         _SG - _GA * _RH, "T3")
    if i == 4:
        return CheRecord(True, (ZERO, ZERO, ZERO),
                         (aff((-1, RHO)), C_ALPHA, C_DELTA, C_GAMMA),
                         _SG - _RH * _AL, "T4")
    raise ValueError("confluent rule index must be 1..4")


def che_group(expected: int | None = 16) -> list:
    gens = [che_transform(i) for i in range(1, 5)]
    seed = che_identity()
    elements = {seed.key: seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                c = e.compose(g)
                if c.key not in elements:
                    elements[c.key] = c
                    nxt.append(c)
                    if len(elements) > 64:
                        raise ClosureOverflow("confluent closure exceeded 64 elements")
        frontier = nxt
    out = list(elements.values())
    if expected is not None and len(out) != expected:
        cls = ClosureOverflow if len(out) > expected else ClosureDeficit
        raise cls(f"confluent closure has {len(out)} elements, expected {expected}")
    return out


def che_transformed_residual(t: CheRecord, p: CheParams):
    tp = t.target(p)
    h = frobenius_che(tp)
    r = h.radius
    for k in range(8):
        z = 0.6 * r * cmath.exp(1j * (0.7 + k * math.pi / 4))
        x = 1 - z if t.flip else z
        if nm.on_cut(x) or nm.on_cut(1 - x):
            continue
        return equation_residual(p, lambda X: t.apply(p, h, X), x), x
    return None, None
