import cmath
import random

import pytest
import sympy

from heunkernels import heun_ops as ho
from heunkernels import numerics as nm
from heunkernels.errors import EvaluationAtSingularity, LogarithmicCase
from heunkernels.heun_ops import CheParams, HeunParams
from heunkernels.kernel_catalog import lambe_ward_kernel
from heunkernels.kernel_engine import evaluate, sample_points
from heunkernels.numerics import Jet2


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def disk_points(p, n, seed, frac=0.3):
    rng = random.Random(seed)
    r = frac * min(1.0, abs(p.a)) if isinstance(p, HeunParams) else frac
    return [cmath.rect(rng.uniform(0.05, 1) * r, rng.uniform(-3, 3)) + 0.01j for _ in range(n)]


def deriv5(f, z, h=1e-3):
    """Five-point central difference."""
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)


# parameter records -----------------------------------------------------------

def test_epsilon_is_derived(hp):
    assert hp.epsilon == hp.alpha + hp.beta + 1 - hp.gamma - hp.delta
    moved = hp.with_(alpha=2)
    assert moved.epsilon == 2 + hp.beta + 1 - hp.gamma - hp.delta


def test_invalid_records():
    with pytest.raises(ValueError):
        HeunParams(1, 0, 0.1, 0.2, 0.3, 0.4)
    with pytest.raises(ValueError):
        HeunParams(0, 0, 0.1, 0.2, 0.3, 0.4)
    with pytest.raises(ValueError):
        CheParams(0, 0, 0.1, 0.2, 0.3)


# operators --------------------------------------------------------------------

def test_heun_operator_on_constant(hp):
    x = 0.3 + 0.2j
    assert rel(ho.heun_operator_apply(hp, lambda z: Jet2(1), x), hp.alpha * hp.beta * x) < 1e-15


def test_heun_operator_on_identity(hp):
    x = 0.3 + 0.2j
    a, g, d, e, ab = hp.a, hp.gamma, hp.delta, hp.epsilon, hp.alpha * hp.beta
    want = g * (x - 1) * (x - a) + d * x * (x - a) + e * x * (x - 1) + ab * x * x
    assert rel(ho.heun_operator_apply(hp, lambda z: z, x), want) < 1e-14


def test_operator_slot_selection(hp):
    x, y = 0.2 + 0.1j, 0.35 - 0.05j
    g = lambda X, Y: nm.exp(X * Y)
    via_y = ho.heun_operator_apply(hp, g, (x, y), y_slot=True)
    direct = ho.heun_operator_apply(hp, lambda z: nm.exp(x * z), y)
    assert rel(via_y, direct) < 1e-14


def test_operator_rejects_singular_points(hp):
    for s in (0, 1, hp.a):
        with pytest.raises(EvaluationAtSingularity):
            ho.heun_operator_apply(hp, lambda z: z, s)


def test_che_operator_on_constant_and_identity(cp):
    x = 0.3 + 0.2j
    assert rel(ho.che_operator_apply(cp, lambda z: Jet2(1), x), cp.alpha * cp.rho * x) < 1e-15
    g, d, r = cp.gamma, cp.delta, cp.rho
    want = -g + (g + d) * x + r * x * (x - 1) + cp.alpha * r * x * x
    assert rel(ho.che_operator_apply(cp, lambda z: z, x), want) < 1e-14


# adjoint ------------------------------------------------------------------------

def _sympy_adjoint(p, f_expr, yv):
    """``(S f)'' - (P f)' + R f`` by symbolic differentiation."""
    y = sympy.Symbol("y")
    a, g, d, e = (sympy.nsimplify(0) + v for v in (p.a, p.gamma, p.delta, p.epsilon))
    S = y * (y - 1) * (y - a)
    P = g * (y - 1) * (y - a) + d * y * (y - a) + e * y * (y - 1)
    R = p.alpha * p.beta * y
    f = f_expr(y)
    out = sympy.diff(S * f, y, 2) - sympy.diff(P * f, y) + R * f
    return complex(out.subs(y, yv).evalf())


def test_adjoint_on_constant_matches_symbolic_adjoint(hp):
    y = 0.4 + 0.1j
    got = ho.adjoint_operator_apply(hp, lambda z: Jet2(1), y)
    assert rel(got, _sympy_adjoint(hp, lambda s: 1, y)) < 1e-12
    al, be, a, g, d, e = hp.alpha, hp.beta, hp.a, hp.gamma, hp.delta, hp.epsilon
    closed = (6 - 2 * (al + be + 1) + al * be) * y + a * (g + d - 2) + e + g - 2
    assert rel(got, closed) < 1e-14


def test_printed_adjoint_constant_block(hp):
    # the printed slope 4 is reproduced by the flag and disagrees with the symbolic adjoint
    y = 0.4 + 0.1j
    al, be, a, g, d, e = hp.alpha, hp.beta, hp.a, hp.gamma, hp.delta, hp.epsilon
    printed = (4 - 2 * (al + be + 1) + al * be) * y + a * (g + d - 2) + e + g - 2
    got = ho.adjoint_operator_apply(hp, lambda z: Jet2(1), y, printed=True)
    assert rel(got, printed) < 1e-14
    assert rel(got, _sympy_adjoint(hp, lambda s: 1, y)) > 1e-3


@pytest.mark.parametrize("poly", [lambda s: s, lambda s: s ** 2 - 3 * s, lambda s: s ** 3 + 2])
def test_adjoint_on_polynomials(hp, poly):
    y = 0.25 - 0.2j
    got = ho.adjoint_operator_apply(hp, poly, y)
    assert rel(got, _sympy_adjoint(hp, poly, y)) < 1e-12


def test_unit_exponent_case_agrees_with_operator():
    # gamma = delta = epsilon = 1 makes the operator formally self-adjoint
    p = HeunParams(3, 0, 0.5 + 0.5j, 1.5 - 0.5j, 1, 1)
    assert p.epsilon == 1
    y = 0.3 + 0.1j
    for poly in (lambda s: s, lambda s: s ** 2 + 1, lambda s: s ** 3 - s):
        m = ho.heun_operator_apply(p, poly, y)
        mbar = ho.adjoint_operator_apply(p, poly, y)
        block = ((6 - 2 * (p.alpha + p.beta + 1)) * y + p.a * (p.gamma + p.delta - 2)
                 + p.epsilon + p.gamma - 2)
        assert abs(mbar - m - block * poly(y)) < 1e-12


# Frobenius ---------------------------------------------------------------------

def test_heun_frobenius_leading_coefficients(hp):
    sol = ho.frobenius_heun(hp, 0, 12)
    assert sol.coefficients[0] == 1
    assert rel(sol.coefficients[1], hp.q / (hp.a * hp.gamma)) < 1e-14


@pytest.mark.parametrize("exponent", [0, "1-gamma"])
def test_heun_frobenius_residual(hp, exponent):
    sol = ho.frobenius_heun(hp, exponent, 12)
    assert sol.tail < 1e-14
    for x in disk_points(hp, 15, 1):
        assert ho.equation_residual(hp, sol, x) < 1e-10


def test_che_frobenius_leading_coefficients():
    p = CheParams(0.4 - 0.3j, 0.8 + 0.3j, 0.31 + 0.1j, 0.58 - 0.1j, 0.44)
    sol = ho.frobenius_che(p, 0, 12)
    assert sol.coefficients[0] == 1
    # constant term of the equation: -gamma c1 = sigma c0
    assert rel(sol.coefficients[1], -p.sigma / p.gamma) < 1e-14


def test_che_frobenius_opposite_sign_fails():
    # a series forced to start with c1 = +sigma/gamma does not solve the equation
    p = CheParams(0.4 - 0.3j, 0.8 + 0.3j, 0.31 + 0.1j, 0.58 - 0.1j, 0.44)
    sol = ho.frobenius_che(p, 0, 12)
    wrong = ho.FrobeniusSolution(p, 0, (1, p.sigma / p.gamma) + sol.coefficients[2:], sol.radius)
    assert ho.equation_residual(p, wrong, 0.05 + 0.01j) > 1e-4


@pytest.mark.parametrize("exponent", [0, "1-gamma"])
def test_che_frobenius_residual(exponent):
    p = CheParams(0.4 - 0.3j, 0.8 + 0.3j, 0.31 + 0.1j, 0.58 - 0.1j, 0.44)
    sol = ho.frobenius_che(p, exponent, 12)
    for x in disk_points(p, 15, 2):
        assert ho.equation_residual(p, sol, x) < 1e-10


def test_logarithmic_case_rejected(hp):
    with pytest.raises(LogarithmicCase):
        ho.frobenius_heun(hp.with_(gamma=2), "1-gamma")


def test_outside_radius_rejected(hp):
    from heunkernels.errors import OutsideValidity

    sol = ho.frobenius_heun(hp)
    with pytest.raises(OutsideValidity):
        sol(0.9)


# concomitant ------------------------------------------------------------------

def test_concomitant_vanishes_for_trivial_inputs(hp):
    assert ho.bilinear_concomitant(hp, lambda z: Jet2(2), lambda X, Y: nm.exp(X), 0.2, 0.3) == 0


def test_concomitant_against_finite_differences(hp):
    h = ho.frobenius_heun(hp)
    g = lambe_ward_kernel(1).at(hp)
    x, y = 0.2 + 0.01j, 0.3 + 0.02j
    dg = deriv5(lambda t: g(x, t), y)
    dh = deriv5(lambda t: h(t), y)
    w = y ** hp.gamma * (1 - y) ** hp.delta * (1 - y / hp.a) ** hp.epsilon
    want = w * (h(y) * dg - g(x, y) * dh)
    got = ho.bilinear_concomitant(hp, h, lambda X, Y: _jet_eval(g, X, Y), x, y)
    assert rel(got, want) < 1e-9


def _jet_eval(inst, X, Y):
    return evaluate(inst.expr, X, Y)


def test_confluent_concomitant_weight(cp):
    h = lambda z: nm.exp(0.2 * z) + z * z
    g = lambda X, Y: nm.exp(X * Y) + Y
    x, y = 0.2 + 0.01j, 0.3 + 0.02j
    w = cmath.exp(cp.rho * y) * y ** cp.gamma * (1 - y) ** cp.delta
    hv, dh = cmath.exp(0.2 * y) + y * y, 0.2 * cmath.exp(0.2 * y) + 2 * y
    gv, dg = cmath.exp(x * y) + y, x * cmath.exp(x * y) + 1
    assert rel(ho.bilinear_concomitant(cp, h, g, x, y), w * (hv * dg - gv * dh)) < 1e-13


# Lagrange identity ------------------------------------------------------------

def _test_function(z):
    return nm.exp(0.3 * z) + z * z * z - 0.5 * z


@pytest.mark.parametrize("k", range(1, 7))
def test_lagrange_identity(hp, k):
    g = lambe_ward_kernel(k).at(hp)
    pts = sample_points(g, 20, random.Random(k))
    assert len(pts) == 20
    ge = lambda X, Y: evaluate(g.expr, X, Y)
    for x, y in pts:
        assert ho.lagrange_residual(hp, _test_function, ge, x, y) < 1e-9


@pytest.mark.parametrize("k", range(1, 7))
def test_adjoint_concomitant_matches_weighted_form(hp, k):
    # y(y-1)(y-a) = a y(1-y)(1-y/a), so the two forms differ by the factor a
    g = lambe_ward_kernel(k).at(hp)
    ge = lambda X, Y: evaluate(g.expr, X, Y)
    for x, y in sample_points(g, 20, random.Random(40 + k)):
        yj = Jet2.coord_y(y)
        kj = ho.weight_jet(hp, yj) * ge(Jet2.coord_x(x), yj)
        adj = ho.kernel_concomitant(hp, _test_function(yj), kj, y)
        w = ho.weight_jet(hp, Jet2(y)).v
        weighted = ho.bilinear_concomitant(hp, _test_function, ge, x, y)
        assert rel(adj / w, hp.a * weighted / w) < 1e-9


def test_lagrange_identity_fails_with_printed_adjoint(hp):
    g = lambe_ward_kernel(1).at(hp)
    ge = lambda X, Y: evaluate(g.expr, X, Y)
    assert ho.lagrange_residual(hp, _test_function, ge, 0.2 + 0.01j, 0.3 + 0.02j, printed=True) > 1e-4


def test_concomitant_derivative_by_finite_differences(hp):
    # independent route for dP/dy: differentiate the assembled concomitant numerically
    g = lambe_ward_kernel(2).at(hp)
    x, y = 0.2 + 0.01j, 0.3 + 0.02j

    def conc(t):
        tj = Jet2.coord_y(t)
        kj = ho.weight_jet(hp, tj) * evaluate(g.expr, Jet2.coord_x(x), tj)
        return ho.kernel_concomitant(hp, _test_function(tj), kj, t)

    yj = Jet2.coord_y(y)
    kj = ho.weight_jet(hp, yj) * evaluate(g.expr, Jet2.coord_x(x), yj)
    jetwise = sum(ho.kernel_concomitant_dy(hp, _test_function(yj), kj, y))
    assert rel(jetwise, deriv5(conc, y)) < 1e-8
