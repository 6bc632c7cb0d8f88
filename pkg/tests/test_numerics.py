import cmath
import random

import mpmath
import pytest

from heunkernels import numerics as nm
from heunkernels.errors import BranchCut, DivisionByZero, NumericOverflow, SingularPower
from heunkernels.numerics import Jet2


def fd_oracle(f, x, y, h=1e-5):
    """Central finite differences of a scalar function of two variables."""
    v = f(x, y)
    dx = (f(x + h, y) - f(x - h, y)) / (2 * h)
    dy = (f(x, y + h) - f(x, y - h)) / (2 * h)
    dxx = (f(x + h, y) - 2 * v + f(x - h, y)) / h ** 2
    dyy = (f(x, y + h) - 2 * v + f(x, y - h)) / h ** 2
    dxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    return (v, dx, dy, dxx, dxy, dyy)


def close(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(b))


def test_coordinate_product():
    j = Jet2.coord_x(2) * Jet2.coord_y(3)
    assert j.slots() == (6, 3, 2, 0, 1, 0)


def test_multiplicative_identity():
    u = Jet2(1 + 2j, 0.5, -1j, 3, 0.25, 2)
    assert (u * 1).slots() == u.slots()
    assert (u * Jet2.const(1)).slots() == u.slots()


def test_x2_y2_at_one():
    x, y = Jet2.coord_x(1), Jet2.coord_y(1)
    assert ((x * x) * (y * y)).slots() == (1, 2, 2, 2, 4, 2)


def test_leibniz_rule():
    rng = random.Random(3)
    for _ in range(20):
        u = Jet2(*(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)))
        w = Jet2(*(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)))
        p = u * w
        assert cmath.isclose(p.dx, u.dx * w.v + u.v * w.dx)
        assert cmath.isclose(p.dy, u.dy * w.v + u.v * w.dy)
        assert cmath.isclose(p.dxx, u.dxx * w.v + 2 * u.dx * w.dx + u.v * w.dxx)
        assert cmath.isclose(p.dxy, u.dxy * w.v + u.dx * w.dy + u.dy * w.dx + u.v * w.dxy)
        assert cmath.isclose(p.dyy, u.dyy * w.v + 2 * u.dy * w.dy + u.v * w.dyy)


def test_constant_and_coordinate_jets():
    assert Jet2.const(5).slots()[1:] == (0, 0, 0, 0, 0)
    assert Jet2.coord_x(2).slots() == (2, 1, 0, 0, 0, 0)
    assert Jet2.coord_y(2).slots() == (2, 0, 1, 0, 0, 0)


def test_sqrt_of_constant():
    assert nm.jet_pow(Jet2.const(4), 0.5).slots() == (2, 0, 0, 0, 0, 0)


def test_square_polynomial_case():
    j = nm.jet_pow(Jet2.coord_x(3), 2)
    assert (j.v, j.dx, j.dxx) == (9, 6, 2)


def test_complex_power_against_finite_differences():
    # step 1e-5 as prescribed; 30-digit arithmetic keeps second differences clear of roundoff
    with mpmath.workdps(30):
        e = mpmath.mpc(0.5, 0.5)
        ref = fd_oracle(lambda x, y: mpmath.power(x, e), mpmath.mpf(2), mpmath.mpf(0), mpmath.mpf("1e-5"))
        ref = [complex(r) for r in ref]
    j = nm.jet_pow(Jet2.coord_x(2), 0.5 + 0.5j)
    for got, want in zip(j.slots(), ref):
        assert close(got, want, 1e-8)


def test_power_errors():
    with pytest.raises(SingularPower):
        nm.jet_pow(Jet2.const(0), -0.5)
    with pytest.raises(SingularPower):
        nm.jet_pow(Jet2.const(0), -2)
    with pytest.raises(BranchCut):
        nm.jet_pow(Jet2.const(-2), 0.5)


def test_exp_identities():
    assert nm.jet_exp(Jet2.const(0)).slots() == (1, 0, 0, 0, 0, 0)
    j = nm.jet_exp(Jet2.coord_x(1))
    for s in (j.v, j.dx, j.dxx):
        assert cmath.isclose(s, cmath.e)


def test_log_exp_round_trip():
    for x in (0.1, 0.7, 1.3, 1.9):
        j = nm.jet_log(nm.jet_exp(Jet2.coord_x(x)))
        assert cmath.isclose(j.v, x, rel_tol=1e-14)
        assert cmath.isclose(j.dx, 1, rel_tol=1e-14)
        assert abs(j.dxx) < 1e-14


def test_division_and_log_errors():
    with pytest.raises(DivisionByZero):
        nm.jet_div(Jet2.coord_x(1), Jet2.const(0))
    with pytest.raises(BranchCut):
        nm.jet_log(Jet2.const(-1))
    with pytest.raises(BranchCut):
        nm.jet_log(Jet2.const(0))


def test_overflow_is_an_error():
    with pytest.raises(NumericOverflow):
        nm.jet_exp(Jet2.const(1000))
    with pytest.raises(NumericOverflow):
        Jet2(1e300) * Jet2(1e300)


_UNARY = [
    ("exp", nm.jet_exp, cmath.exp),
    ("log", nm.jet_log, cmath.log),
    ("pow", lambda u: nm.jet_pow(u, 0.3 - 0.7j), lambda z: cmath.exp((0.3 - 0.7j) * cmath.log(z))),
    ("recip", lambda u: 1 / u, lambda z: 1 / z),
]


@pytest.mark.parametrize("name,jf,sf", _UNARY, ids=[u[0] for u in _UNARY])
def test_partials_match_finite_differences(name, jf, sf):
    rng = random.Random(11)
    for _ in range(10):
        x = complex(rng.uniform(0.3, 1.5), rng.uniform(-0.4, 0.4))
        y = complex(rng.uniform(0.3, 1.5), rng.uniform(-0.4, 0.4))
        j = jf(Jet2.coord_x(x) * Jet2.coord_y(y) + Jet2.coord_x(x))
        ref = fd_oracle(lambda a, b: sf(a * b + a), x, y, 1e-4)
        for got, want in zip(j.slots(), ref):
            assert close(got, want, 1e-6)


def _random_expr(rng, depth, x, y):
    if depth == 0:
        return rng.choice([x, y, Jet2.const(complex(rng.uniform(0.5, 1.5), rng.uniform(-0.2, 0.2)))])
    a = _random_expr(rng, depth - 1, x, y)
    b = _random_expr(rng, depth - 1, x, y)
    op = rng.choice(["+", "*", "exp", "pow"])
    if op == "+":
        return a + b
    if op == "*":
        return a * b
    if op == "exp":
        return nm.jet_exp(a * 0.1)
    return nm.jet_pow(a * a + 1, 0.5)


def test_associativity_on_random_expressions():
    rng = random.Random(5)
    x, y = Jet2.coord_x(0.4 + 0.1j), Jet2.coord_y(0.7 - 0.05j)
    for _ in range(30):
        depth = rng.randint(1, 6)
        u, v, w = (_random_expr(rng, rng.randint(0, depth), x, y) for _ in range(3))
        left, right = (u * v) * w, u * (v * w)
        for a, b in zip(left.slots(), right.slots()):
            assert abs(a - b) <= 1e-13 * max(1.0, abs(a))
        left, right = (u + v) + w, u + (v + w)
        for a, b in zip(left.slots(), right.slots()):
            assert abs(a - b) <= 1e-13 * max(1.0, abs(a))
