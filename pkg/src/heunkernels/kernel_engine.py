"""Kernel expression trees, the kernel equation, and kernel transformations.

A kernel is a function ``G(x, y)`` annihilated by ``M_x - M_y``.  Kernels
are represented twice over:

* :class:`Expr` trees with fixed numeric parameters, evaluable on scalars
  or :class:`~heunkernels.numerics.Jet2` values;
* :class:`Kernel` objects, i.e. *parametric* builders ``params -> Expr``.
  Transformations act on these, because a transformed kernel evaluates the
  original family at mapped parameters.

Kernel transformations reuse the solution records of
:mod:`heunkernels.transform_group`: ``G -> f(x) f(y) G[mapped; rho(x), rho(y)]``
with every prefactor written in symmetric product form.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import numerics as nm
from . import specialfn as sf
from .errors import DOMAIN_ERRORS, AllPointsInfeasible, HeunKernelError
from .heun_ops import CheParams, HeunParams, check_regular, operator_terms
from .numerics import Jet2
from .specialfn import ConfParams, HypParams
from .transform_group import (
    CheRecord,
    TransformRecord,
    evaluate_affine,
    che_transform,
    homotopic,
    mobius,
)

# expression nodes ----------------------------------------------------------


class Expr:
    """Base class of kernel expression nodes; supports ``+ - * / ** neg``."""

    __slots__ = ()

    def __add__(self, o):
        return Add((self, wrap(o)))

    def __radd__(self, o):
        return Add((wrap(o), self))

    def __sub__(self, o):
        return Add((self, Neg(wrap(o))))

    def __rsub__(self, o):
        return Add((wrap(o), Neg(self)))

    def __mul__(self, o):
        return Mul((self, wrap(o)))

    def __rmul__(self, o):
        return Mul((wrap(o), self))

    def __truediv__(self, o):
        return Div(self, wrap(o))

    def __rtruediv__(self, o):
        return Div(wrap(o), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, e):
        return Pow(self, complex(e))


def wrap(v) -> Expr:
    return v if isinstance(v, Expr) else Const(complex(v))


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class CoordX(Expr):
    pass


@dataclass(frozen=True)
class CoordY(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: complex


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Hyp2F1(Expr):
    params: HypParams
    arg: Expr


@dataclass(frozen=True)
class HypLocal(Expr):
    k: int
    params: HypParams
    arg: Expr


@dataclass(frozen=True)
class Phi(Expr):
    params: ConfParams
    arg: Expr


@dataclass(frozen=True)
class Psi(Expr):
    params: ConfParams
    arg: Expr


X = CoordX()
Y = CoordY()
REJECT = DOMAIN_ERRORS + (ZeroDivisionError,)
_SPECIAL = (Hyp2F1, HypLocal, Phi, Psi)


def evaluate(e: Expr, x, y):
    """Evaluate ``e`` with ``CoordX -> x`` and ``CoordY -> y`` (scalars or jets)."""
    t = type(e)
    if t is Const:
        return e.value
    if t is CoordX:
        return x
    if t is CoordY:
        return y
    if t is Add:
        out = 0j
        for s in e.terms:
            out = evaluate(s, x, y) + out
        return out
    if t is Mul:
        out = 1 + 0j
        for s in e.factors:
            out = evaluate(s, x, y) * out
        return out
    if t is Div:
        den = evaluate(e.den, x, y)
        if nm.value(den) == 0:
            raise nm.DivisionByZero("kernel denominator vanishes")
        return evaluate(e.num, x, y) / den
    if t is Neg:
        return -evaluate(e.arg, x, y)
    if t is Pow:
        return nm.power(evaluate(e.base, x, y), e.exponent)
    if t is Exp:
        return nm.exp(evaluate(e.arg, x, y))
    if t is Hyp2F1:
        return sf.hyp2f1(e.params, evaluate(e.arg, x, y))
    if t is HypLocal:
        return sf.hyp_local(e.k, e.params, evaluate(e.arg, x, y))
    if t is Phi:
        return sf.kummer_phi(e.params, evaluate(e.arg, x, y))
    if t is Psi:
        return sf.tricomi_psi(e.params, evaluate(e.arg, x, y))
    raise TypeError(f"unknown node {t.__name__}")


def evaluate_jet(e: Expr, x: complex, y: complex) -> Jet2:
    out = evaluate(e, Jet2.coord_x(x), Jet2.coord_y(y))
    return out if isinstance(out, Jet2) else Jet2(out)


def _children(e: Expr) -> tuple:
    t = type(e)
    if t is Add:
        return e.terms
    if t is Mul:
        return e.factors
    if t is Div:
        return (e.num, e.den)
    if t in (Neg, Exp, Hyp2F1, HypLocal, Phi, Psi):
        return (e.arg,)
    if t is Pow:
        return (e.base,)
    return ()


def _rebuild(e: Expr, kids: tuple) -> Expr:
    t = type(e)
    if t is Add:
        return Add(kids)
    if t is Mul:
        return Mul(kids)
    if t is Div:
        return Div(*kids)
    if t in (Neg, Exp):
        return t(kids[0])
    if t is Pow:
        return Pow(kids[0], e.exponent)
    if t is HypLocal:
        return HypLocal(e.k, e.params, kids[0])
    if t in (Hyp2F1, Phi, Psi):
        return t(e.params, kids[0])
    return e


def substitute(e: Expr, xe: Expr, ye: Expr) -> Expr:
    """Replace ``CoordX`` by ``xe`` and ``CoordY`` by ``ye``."""
    if isinstance(e, CoordX):
        return xe
    if isinstance(e, CoordY):
        return ye
    kids = _children(e)
    if not kids:
        return e
    return _rebuild(e, tuple(substitute(k, xe, ye) for k in kids))


def swap(e: Expr) -> Expr:
    return substitute(e, Y, X)


def _sort_key(e: Expr) -> str:
    return repr(e)


def normalize(e: Expr) -> Expr:
    """Flatten nested sums and products and sort their children."""
    kids = tuple(normalize(k) for k in _children(e))
    if isinstance(e, (Add, Mul)):
        flat = []
        for k in kids:
            if type(k) is type(e):
                flat.extend(_children(k))
            else:
                flat.append(k)
        return type(e)(tuple(sorted(flat, key=_sort_key)))
    return _rebuild(e, kids) if kids else e


def contains_special(e: Expr) -> bool:
    return isinstance(e, _SPECIAL) or any(contains_special(k) for k in _children(e))


def to_json(e: Expr) -> dict:
    """Serialise a tree; complex numbers become ``[re, im]`` pairs."""
    def c(z):
        z = complex(z)
        return [z.real, z.imag]

    t = type(e)
    node = {"node": t.__name__}
    if t is Const:
        node["value"] = c(e.value)
    elif t is Pow:
        node["exponent"] = c(e.exponent)
    elif t in (Hyp2F1, HypLocal):
        node["params"] = [c(e.params.a), c(e.params.b), c(e.params.c)]
        if t is HypLocal:
            node["k"] = e.k
    elif t in (Phi, Psi):
        node["params"] = [c(e.params.a), c(e.params.c)]
    kids = _children(e)
    if kids:
        node["children"] = [to_json(k) for k in kids]
    return node


# builders for local solutions ------------------------------------------------

def hyp_local_expr(k: int, p: HypParams, u: Expr) -> Expr:
    """``F^(k)(u)`` spelled out as powers times a Gauss series."""
    a, b, c = p.a, p.b, p.c
    if k == 1:
        return Hyp2F1(p, u)
    if k == 2:
        return Pow(u, 1 - c) * Hyp2F1(HypParams(a + 1 - c, b + 1 - c, 2 - c), u)
    if k == 3:
        return Hyp2F1(HypParams(a, b, a + b + 1 - c), 1 - u)
    if k == 4:
        w = 1 - u
        return Pow(w, c - a - b) * Hyp2F1(HypParams(c - a, c - b, 1 + c - a - b), w)
    if k == 5:
        return Pow(u, -a) * Hyp2F1(HypParams(a, a + 1 - c, a + 1 - b), 1 / u)
    if k == 6:
        return Pow(u, -b) * Hyp2F1(HypParams(b + 1 - c, b, b + 1 - a), 1 / u)
    raise ValueError(f"local solution index {k} not in 1..6")


def conf_local_expr(k: int, p: ConfParams, u: Expr) -> Expr:
    a, c = p.a, p.c
    if k == 1:
        return Phi(p, u)
    if k == 3:
        return Psi(p, u)
    if k in (2, 4):
        q = ConfParams(1 - a, 2 - c)
        inner = Phi(q, -u) if k == 2 else Psi(q, -u)
        return Exp(u) * Pow(u, 1 - c) * inner
    raise ValueError(f"confluent local solution index {k} not in 1..4")


# kernel equation -------------------------------------------------------------

def kernel_pde_terms(p, jet: Jet2, x: complex, y: complex) -> tuple:
    return operator_terms(p, jet, x, "x") + tuple(-t for t in operator_terms(p, jet, y, "y"))


def kernel_pde_residual(p, e: Expr, x: complex, y: complex) -> float:
    """Relative residual of ``[M_x - M_y] G`` at ``(x, y)`` (Heun or confluent)."""
    check_regular(p, x)
    check_regular(p, y)
    return nm.relative_residual(kernel_pde_terms(p, evaluate_jet(e, x, y), x, y))


# parametric kernels -----------------------------------------------------------

Sampler = Callable[[random.Random], "tuple | None"]
PointGen = Callable[[object], list]


@dataclass(frozen=True)
class Kernel:
    """A kernel family member as a function of its parameters.

    ``points(params)`` lists candidate regions as samplers ``rng -> (x, y)``,
    in order of preference; transformed kernels pull the regions back from
    the kernel they were built from.
    """

    label: str
    build: Callable[[object], Expr]
    kind: str = "heun"
    points: PointGen | None = field(default=None, compare=False)

    def at(self, p) -> "Instance":
        gen = self.points or default_points
        return Instance(self.label, p, self.build(p), tuple(gen(p)))


@dataclass(frozen=True)
class Instance:
    label: str
    params: object
    expr: Expr
    regions: tuple = field(compare=False)

    def __call__(self, x, y):
        return evaluate(self.expr, x, y)


def _symmetric_factor(base_x: Expr, base_y: Expr, e) -> Expr:
    return Pow(base_x * base_y, e)


def _mobius_expr(coeffs, v: Expr) -> Expr:
    A, B, C, D = (complex(c) for c in coeffs)
    num = v if A == 1 else A * v
    if B != 0:
        num = num + B
    if C == 0:
        return num if D == 1 else num / D
    den = v if C == 1 else C * v
    if D != 0:
        den = den + D
    return num / den


def heun_kernel_target(t: TransformRecord, p: HeunParams) -> HeunParams:
    al, be, ga, de = t.target_exponents(p)
    return HeunParams(t.mobius.a_target(p.a), 0, al, be, ga, de)


def heun_prefactor(t: TransformRecord, p: HeunParams) -> Expr | None:
    out = None
    for k, e in enumerate(t.prefactor_exponents(p)):
        if e == 0:
            continue
        if k == 0:
            f = _symmetric_factor(X, Y, e)
        elif k == 1:
            f = _symmetric_factor(1 - X, 1 - Y, e)
        else:
            f = _symmetric_factor(1 - X / p.a, 1 - Y / p.a, e)
        out = f if out is None else out * f
    return out


def kernel_transform(t: TransformRecord, g: Kernel, label: str | None = None) -> Kernel:
    """``f(x) f(y) G[mapped params; rho(x), rho(y)]`` for any group element."""
    if g.kind != "heun":
        raise ValueError("solution records act on Heun kernels")
    identity_map = t.mobius.index == 1

    def build(p: HeunParams) -> Expr:
        inner = g.build(heun_kernel_target(t, p))
        if not identity_map:
            cf = t.mobius.coefficients(p.a)
            inner = substitute(inner, _mobius_expr(cf, X), _mobius_expr(cf, Y))
        pre = heun_prefactor(t, p)
        return inner if pre is None else pre * inner

    base_points = g.points or default_points

    def pull(region, a):
        def sampler(rng):
            xs, ys = region(rng)
            try:
                return t.mobius.inverse_point(xs, a), t.mobius.inverse_point(ys, a)
            except ZeroDivisionError:
                return None
        return sampler

    def points(p: HeunParams):
        return [pull(r, p.a) for r in base_points(heun_kernel_target(t, p))]

    return Kernel(label or f"{t.name}({g.label})", build, "heun", points)


def kernel_homotopic(i: int, g: Kernel) -> Kernel:
    """``N_i G``."""
    return kernel_transform(homotopic(i), g, f"N{i}({g.label})")


def kernel_mobius(j: int, g: Kernel) -> Kernel:
    """``K_j G``."""
    return kernel_transform(mobius(j), g, f"K{j}({g.label})")


def che_kernel_target(t: CheRecord, p: CheParams) -> CheParams:
    vals = (p.rho, p.alpha, p.gamma, p.delta)
    r, al, ga, de = (evaluate_affine(f, vals) for f in t.param_map)
    return CheParams(0, r, al, ga, de)


def kernel_che_transform(t: CheRecord, g: Kernel, label: str | None = None) -> Kernel:
    if g.kind != "che":
        raise ValueError("confluent records act on confluent kernels")

    def build(p: CheParams) -> Expr:
        inner = g.build(che_kernel_target(t, p))
        if t.flip:
            inner = substitute(inner, 1 - X, 1 - Y)
        vals = (p.rho, p.alpha, p.gamma, p.delta)
        e0, e1, c = (evaluate_affine(f, vals) for f in t.exponents)
        pre = []
        if e0 != 0:
            pre.append(_symmetric_factor(X, Y, e0))
        if e1 != 0:
            pre.append(_symmetric_factor(1 - X, 1 - Y, e1))
        if c != 0:
            pre.append(Exp(c * (X + Y)))
        return Mul(tuple(pre) + (inner,)) if pre else inner

    base_points = g.points or default_points

    def flipped(region):
        def sampler(rng):
            xs, ys = region(rng)
            return 1 - xs, 1 - ys
        return sampler

    def points(p: CheParams):
        regions = base_points(che_kernel_target(t, p))
        return [flipped(r) for r in regions] if t.flip else regions

    return Kernel(label or f"{t.name}({g.label})", build, "che", points)


def kernel_che_rule(i: int, g: Kernel) -> Kernel:
    """Confluent kernel rule ``K_i`` (``i = 1..4``)."""
    return kernel_che_transform(che_transform(i), g, f"K{i}({g.label})")


# sampling -------------------------------------------------------------------

DEFAULT_BOX = ((0.05, 0.45), (0.005, 0.03))
DRAW_A_VALUES = (2.5, 3 + 0.7j, 5)


def _generic(rng: random.Random) -> complex:
    return complex(rng.uniform(0.15, 0.85), rng.uniform(-0.15, 0.15))


def heun_draws(seed: int = 0, n: int = 5) -> list:
    """Reproducible generic Heun parameter sets, ``a`` cycling through ``DRAW_A_VALUES``."""
    rng = random.Random(seed)
    out = []
    for k in range(n):
        a = DRAW_A_VALUES[k % len(DRAW_A_VALUES)]
        q = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        out.append(HeunParams(a, q, _generic(rng), _generic(rng), _generic(rng), _generic(rng)))
    return out


def che_draws(seed: int = 0, n: int = 5) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        sigma = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        rho = complex(rng.uniform(0.4, 1.0), rng.uniform(-0.3, 0.3))
        out.append(CheParams(sigma, rho, _generic(rng), _generic(rng), _generic(rng)))
    return out


def _box(rng, re_range, im_range):
    return complex(rng.uniform(*re_range), rng.uniform(*im_range))


def default_points(p) -> list:
    """Candidate regions: the default box first, then regions scaled to ``a``."""
    a = getattr(p, "a", 2.5 + 0j)
    ra = cmath.sqrt(a)

    def pair(one):
        return lambda rng: (one(rng), one(rng))

    def box(re_range, im_range):
        return pair(lambda rng: _box(rng, re_range, im_range))

    def polar(scale, lo, hi):
        return pair(lambda rng: scale * rng.uniform(lo, hi) * cmath.exp(1j * rng.uniform(0.01, 0.08)))

    def along_a(lo, hi):
        return pair(lambda rng: a * rng.uniform(lo, hi) + 1j * rng.uniform(0.005, 0.03))

    r = 2 * max(1.0, abs(a))
    return [
        box(*DEFAULT_BOX),
        box((0.55, 0.95), (0.005, 0.03)),
        box((-0.45, -0.05), (0.005, 0.03)),
        polar(ra, 0.9, 1.1),
        polar(ra, 1.6, 2.4),
        along_a(0.8, 0.95),
        along_a(1.05, 1.25),
        box((0.6, 1.4), (0.2, 0.6)),
        box((-r, r), (-r, r)),
    ]


def _admissible(inst: Instance, x: complex, y: complex):
    """Jet of ``inst`` at ``(x, y)`` or ``None`` when a guard fails."""
    if not (nm._finite(complex(x)) and nm._finite(complex(y))):
        return None
    try:
        check_regular(inst.params, x)
        check_regular(inst.params, y)
        for s in _singular_points(inst.params):
            if min(abs(x - s), abs(y - s)) < 1e-3:
                return None
        evaluate(inst.expr, x, y)  # cheap scalar screen before the jet
        return evaluate_jet(inst.expr, x, y)
    except REJECT:
        return None


def _singular_points(p):
    return (0, 1, p.a) if isinstance(p, HeunParams) else (0, 1)


REGION_DRAWS = 60
REGION_PATIENCE = 15


def _sample(inst: Instance, n: int, rng: random.Random, extra: Sequence[Instance] = ()) -> list:
    """``[(x, y, jet)]`` for up to ``n`` admissible points.

    Regions are scanned in order.  A region that yields no admissible point
    in its first ``REGION_PATIENCE`` draws is abandoned.
    """
    out = []
    for region in inst.regions:
        hits = misses = 0
        for _ in range(REGION_DRAWS):
            if hits == 0 and misses >= REGION_PATIENCE:
                break
            pt = region(rng)
            jet = None if pt is None else _admissible(inst, *pt)
            if jet is None or any(_admissible(o, *pt) is None for o in extra):
                misses += 1
                continue
            hits += 1
            out.append((pt[0], pt[1], jet))
            if len(out) >= n:
                return out
    return out


def sample_points(inst: Instance, n: int, rng: random.Random, extra: Sequence[Instance] = ()) -> list:
    """``n`` admissible points for ``inst`` (and every instance in ``extra``)."""
    return [(x, y) for x, y, _ in _sample(inst, n, rng, extra)]


@dataclass
class ResidualReport:
    label: str
    points: list
    residuals: list
    tol: float
    skipped: str | None = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else math.nan

    @property
    def passed(self) -> bool:
        return self.skipped is None and bool(self.residuals) and self.max_residual < self.tol


def residual_sweep(inst: Instance, n: int = 10, rng: random.Random | None = None,
                   tol: float = 1e-9) -> ResidualReport:
    """Kernel-equation residual of ``inst`` at ``n`` admissible points."""
    rng = rng or random.Random(0)
    found = _sample(inst, n, rng)
    pts = [(x, y) for x, y, _ in found]
    if len(pts) < n:
        return ResidualReport(inst.label, pts, [], tol, f"only {len(pts)} admissible points")
    res = [nm.relative_residual(kernel_pde_terms(inst.params, jet, x, y)) for x, y, jet in found]
    return ResidualReport(inst.label, pts, res, tol)


# equivalence --------------------------------------------------------------------

@dataclass(frozen=True)
class EqualUpToConstant:
    constant: complex
    spread: float


@dataclass(frozen=True)
class Distinct:
    spread: float


def _ball(rng, x, y, radius):
    def d():
        return radius * cmath.exp(2j * math.pi * rng.random()) * math.sqrt(rng.random())
    return x + d(), y + d()


def equivalence_test(g1: Instance, g2: Instance, n_points: int = 12, tol: float = 1e-9,
                     seeds: int = 4, rng: random.Random | None = None):
    """Compare two kernels up to a multiplicative constant.

    Ratios are taken on a small ball around a common admissible seed point,
    so that both functions stay on one branch.  Several seeds are tried;
    any seed giving a constant ratio decides equality.
    """
    rng = rng or random.Random(1)
    best = math.inf
    seeds_found = sample_points(g1, seeds, rng, (g2,)) or sample_points(g2, seeds, rng, (g1,))
    if not seeds_found:
        raise AllPointsInfeasible(f"no common admissible point for {g1.label} and {g2.label}")
    for x, y in seeds_found:
        radius = 0.02 * min(1.0, _clearance(g1.params, x, y))
        ratios = []
        for _ in range(20 * n_points):
            px, py = _ball(rng, x, y, radius)
            try:
                v1 = evaluate(g1.expr, px, py)
                v2 = evaluate(g2.expr, px, py)
            except REJECT:
                continue
            if v2 == 0:
                continue
            ratios.append(v1 / v2)
            if len(ratios) >= n_points:
                break
        if len(ratios) >= n_points:
            mean = sum(ratios) / len(ratios)
            spread = max(abs(r - mean) for r in ratios) / max(abs(mean), 1e-300)
            if spread < tol:
                return EqualUpToConstant(mean, spread)
            best = min(best, spread)
    return Distinct(best)


def _clearance(p, x, y) -> float:
    return min(abs(z - s) for z in (x, y) for s in _singular_points(p))


def set_equivalence(first: Sequence[Instance], second: Sequence[Instance], **kw):
    """Match two kernel lists up to constants.

    Returns ``{i: j}`` when every member of ``first`` is equivalent to a
    distinct member of ``second``, else ``None``.
    """
    mapping = {}
    used = set()
    for i, g in enumerate(first):
        for j, h in enumerate(second):
            if j in used:
                continue
            try:
                res = equivalence_test(g, h, **kw)
            except AllPointsInfeasible:
                continue
            if isinstance(res, EqualUpToConstant):
                mapping[i] = j
                used.add(j)
                break
        else:
            return None
    return mapping


# structural comparison -----------------------------------------------------------

@dataclass
class FactorForm:
    """``const * prod(rational^e) * exp(sum) * prod(special^m)``, constants ignored."""

    logs: list          # (rational subtree, exponent)
    exps: list          # exponential arguments
    specials: list      # (node, multiplicity)


def factor_form(e: Expr) -> FactorForm:
    out = FactorForm([], [], [])
    _collect(e, 1, out)
    merged: dict = {}
    for base, p in out.logs:
        key = normalize(base)
        merged[key] = merged.get(key, 0) + p
    out.logs = [(base, p) for base, p in merged.items() if abs(p) > 1e-13]
    return out


def _collect(e: Expr, power, out: FactorForm):
    t = type(e)
    if t is Const:
        return
    if t is Neg:
        _collect(e.arg, power, out)
    elif t is Mul:
        for f in e.factors:
            _collect(f, power, out)
    elif t is Div:
        _collect(e.num, power, out)
        _collect(e.den, -power, out)
    elif t is Pow:
        _collect(e.base, power * e.exponent, out)
    elif t is Exp:
        out.exps.append((e.arg, power))
    elif t is HypLocal:
        _collect(hyp_local_expr(e.k, e.params, e.arg), power, out)
    elif t in _SPECIAL:
        out.specials.append((e, power))
    elif contains_special(e):
        out.specials.append((e, power))   # opaque sum: compared by value
    else:
        out.logs.append((e, power))


def _log_gradient(form: FactorForm, x, y) -> tuple:
    """``grad log`` of the elementary part, and the size of its largest term."""
    gx = gy = 0j
    size = 0.0
    for r, p in form.logs:
        j = evaluate_jet(r, x, y)
        tx, ty = p * j.dx / j.v, p * j.dy / j.v
        gx, gy, size = gx + tx, gy + ty, max(size, abs(tx), abs(ty))
    for r, p in form.exps:
        j = evaluate_jet(r, x, y)
        tx, ty = p * j.dx, p * j.dy
        gx, gy, size = gx + tx, gy + ty, max(size, abs(tx), abs(ty))
    return gx, gy, size


def _params_close(n1, n2, tol) -> bool:
    if type(n1) is not type(n2):
        return False
    if isinstance(n1, Hyp2F1):
        p, q = n1.params, n2.params
        same = abs(p.a - q.a) + abs(p.b - q.b) <= tol * (1 + abs(p.a) + abs(p.b))
        crossed = abs(p.a - q.b) + abs(p.b - q.a) <= tol * (1 + abs(p.a) + abs(p.b))
        return (same or crossed) and abs(p.c - q.c) <= tol * (1 + abs(p.c))
    if isinstance(n1, (Phi, Psi)):
        p, q = n1.params, n2.params
        return abs(p.a - q.a) + abs(p.c - q.c) <= tol * (1 + abs(p.a) + abs(p.c))
    return True


def _probe_points(rng: random.Random, n: int):
    for _ in range(n):
        yield (complex(rng.uniform(-3, 3), rng.uniform(-3, 3)),
               complex(rng.uniform(-3, 3), rng.uniform(-3, 3)))


def structurally_equal(e1: Expr, e2: Expr, tol: float = 1e-9, probes: int = 6,
                       rng: random.Random | None = None) -> bool:
    """Equality of factorised forms up to an overall constant.

    The elementary part (rational factors, powers, exponentials) is compared
    through its logarithmic gradient, which is single-valued; special
    factors must match one-to-one in kind, parameters and argument.
    """
    rng = rng or random.Random(7)
    f1, f2 = factor_form(e1), factor_form(e2)
    if len(f1.specials) != len(f2.specials):
        return False
    pts = []
    for x, y in _probe_points(rng, 40 * probes):
        try:
            g1 = _log_gradient(f1, x, y)
            g2 = _log_gradient(f2, x, y)
        except (ZeroDivisionError, HeunKernelError):
            continue
        scale = max(g1[2], g2[2], 1e-300)
        if abs(g1[0] - g2[0]) + abs(g1[1] - g2[1]) > tol * scale:
            return False
        pts.append((x, y))
        if len(pts) >= probes:
            break
    if len(pts) < probes:
        return False
    used = set()
    for node, mult in f1.specials:
        for k, (other, m2) in enumerate(f2.specials):
            if k in used or abs(mult - m2) > tol or not _params_close(node, other, tol):
                continue
            if _same_argument(node, other, pts, tol):
                used.add(k)
                break
        else:
            return False
    return True


def _same_argument(n1: Expr, n2: Expr, pts, tol) -> bool:
    if isinstance(n1, _SPECIAL) and isinstance(n2, _SPECIAL):
        a1, a2 = n1.arg, n2.arg
    else:
        a1, a2 = n1, n2
    for x, y in pts:
        try:
            v1 = evaluate(a1, x, y)
            v2 = evaluate(a2, x, y)
        except REJECT:
            return False
        if abs(v1 - v2) > tol * (abs(v1) + abs(v2) + 1e-300):
            return False
    return True


def commute_check(i: int, j: int, g: Kernel, p) -> bool:
    """``N_i N_j G`` and ``N_j N_i G`` agree structurally."""
    a = kernel_homotopic(i, kernel_homotopic(j, g)).build(p)
    b = kernel_homotopic(j, kernel_homotopic(i, g)).build(p)
    return structurally_equal(a, b)
