import cmath
import math
import random

import mpmath
import pytest

from heunkernels import numerics as nm
from heunkernels import specialfn as sf
from heunkernels.errors import (DegenerateParameter, IntegerParameterDegeneracy, NoConvergence,
                                OutsideDomain)
from heunkernels.numerics import Jet2
from heunkernels.specialfn import ConfParams, HypParams


def brute_2f1(a, b, c, u, n=4000):
    """Plain term-by-term partial sum, independent of the library's summation."""
    total, term = 0j, 1 + 0j
    for k in range(n):
        total += term
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * u
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def rand_c(rng, lo=0.15, hi=0.85):
    return complex(rng.uniform(lo, hi), rng.uniform(-0.2, 0.2))


def rand_u(rng, r=0.6):
    return cmath.rect(rng.uniform(0.05, r), rng.uniform(-math.pi, math.pi))


def jet_at(u):
    return Jet2.coord_x(u)


# Gauss function ------------------------------------------------------------

def test_value_at_origin():
    assert sf.hyp2f1(HypParams(0.3, 0.7 + 0.2j, 1.4), 0) == 1


def test_closed_form_two_log_two():
    want = -math.log(0.5) / 0.5
    assert abs(want - 1.3862943611198906) < 1e-15
    assert rel(brute_2f1(1, 1, 2, 0.5), want) < 1e-14
    assert rel(sf.hyp2f1(HypParams(1, 1, 2), 0.5), want) < 1e-14


def test_against_mpmath_values():
    rng = random.Random(2)
    for _ in range(15):
        a, b, c, u = rand_c(rng), rand_c(rng), rand_c(rng, 0.6, 1.6), rand_u(rng, 0.9)
        assert rel(sf.hyp2f1(HypParams(a, b, c), u), complex(mpmath.hyp2f1(a, b, c, u))) < 1e-12


def test_euler_relation():
    rng = random.Random(4)
    for _ in range(25):
        p = HypParams(rand_c(rng), rand_c(rng), rand_c(rng, 0.6, 1.6))
        u = rand_u(rng, 0.85)
        assert rel(sf.euler(p, u), sf.hyp2f1(p, u)) < 1e-12


def test_domain_and_parameter_errors(monkeypatch):
    with pytest.raises(OutsideDomain):
        sf.hyp2f1(HypParams(0.3, 0.4, 1.2), 0.97)
    with pytest.raises(DegenerateParameter):
        sf.hyp2f1(HypParams(0.3, 0.4, -2), 0.2)
    monkeypatch.setattr(sf, "TERM_CAP", 5)
    with pytest.raises(NoConvergence):
        sf.hyp2f1(HypParams(0.3, 0.4, 1.2), 0.9)


# local solutions -----------------------------------------------------------

def test_first_local_solution_is_the_series():
    p = HypParams(0.3, 0.7, 1.1)
    assert sf.hyp_local(1, p, 0.4) == sf.hyp2f1(p, 0.4)


def test_fifth_local_solution_direct_series():
    a, b, c, u = 0.3, 0.7, 1.1, 4.0
    want = u ** (-a) * brute_2f1(a, a + 1 - c, a + 1 - b, 1 / u)
    assert rel(sf.hyp_local(5, HypParams(a, b, c), u), want) < 1e-13


_LOCAL_POINTS = {
    1: lambda rng: rand_u(rng, 0.7) + 0.01j,
    2: lambda rng: complex(rng.uniform(0.05, 0.6), rng.uniform(-0.3, 0.3)),
    3: lambda rng: 1 - complex(rng.uniform(0.05, 0.6), rng.uniform(-0.3, 0.3)),
    4: lambda rng: 1 - complex(rng.uniform(0.05, 0.6), rng.uniform(-0.3, 0.3)),
    5: lambda rng: 1 / complex(rng.uniform(0.05, 0.6), rng.uniform(-0.3, 0.3)),
    6: lambda rng: 1 / complex(rng.uniform(0.05, 0.6), rng.uniform(-0.3, 0.3)),
}


@pytest.mark.parametrize("k", range(1, 7))
def test_local_solution_annihilates_equation(k):
    rng = random.Random(10 + k)
    p = HypParams(0.31 + 0.1j, 0.77 - 0.05j, 0.58 + 0.2j)
    for _ in range(20):
        u = _LOCAL_POINTS[k](rng)
        f = sf.hyp_local(k, p, jet_at(u))
        assert nm.relative_residual(sf.hypergeometric_terms(p, f, u)) < 1e-10


def test_hyp_local_index_error():
    with pytest.raises(ValueError):
        sf.hyp_local(7, HypParams(0.3, 0.7, 1.1), 0.2)


# Pfaff ---------------------------------------------------------------------

def test_pfaff():
    p = HypParams(0.2, 0.9, 1.3)
    assert sf.pfaff(p, 0) == 1
    assert rel(sf.pfaff(p, -0.4), sf.hyp2f1(p, -0.4)) < 1e-12
    lhs = sf.pfaff(p, jet_at(-0.4 + 0.1j))
    rhs = sf.hyp2f1(p, jet_at(-0.4 + 0.1j))
    for s in ("v", "dx", "dxx"):
        assert rel(getattr(lhs, s), getattr(rhs, s)) < 1e-10


def test_pfaff_random():
    rng = random.Random(8)
    for _ in range(20):
        p = HypParams(rand_c(rng), rand_c(rng), rand_c(rng, 0.6, 1.6))
        u = complex(rng.uniform(-0.4, 0.45), rng.uniform(-0.3, 0.3))
        assert rel(sf.pfaff(p, u), sf.hyp2f1(p, u)) < 1e-12


# confluent functions ---------------------------------------------------------

def test_phi_basics():
    assert sf.kummer_phi(ConfParams(0.3, 1.2), 0) == 1
    want = math.exp(0.7)
    assert abs(want - 2.0137527074704766) < 1e-15
    assert rel(sf.kummer_phi(ConfParams(1, 1), 0.7), want) < 1e-14


def test_phi_against_mpmath():
    rng = random.Random(12)
    for _ in range(15):
        a, c = rand_c(rng), rand_c(rng, 0.6, 1.6)
        u = cmath.rect(rng.uniform(0.1, 8), rng.uniform(-math.pi, math.pi))
        assert rel(sf.kummer_phi(ConfParams(a, c), u), complex(mpmath.hyp1f1(a, c, u))) < 1e-11


def test_kummer_relation_phi():
    rng = random.Random(13)
    for _ in range(20):
        a, c = rand_c(rng), rand_c(rng, 0.6, 1.6)
        u = cmath.rect(rng.uniform(0.05, 3), rng.uniform(-math.pi, math.pi))
        rhs = cmath.exp(u) * sf.kummer_phi(ConfParams(c - a, c), -u)
        assert rel(sf.kummer_phi(ConfParams(a, c), u), rhs) < 1e-12


def test_phi_degenerate():
    with pytest.raises(DegenerateParameter):
        sf.kummer_phi(ConfParams(0.3, -1), 0.5)


@pytest.mark.parametrize("u", [0.5, 1 + 0.3j, 2])
def test_psi_solves_confluent_equation(u):
    p = ConfParams(0.3 + 0.1j, 0.9 - 0.2j)
    f = sf.tricomi_psi(p, jet_at(u))
    assert nm.relative_residual(sf.confluent_terms(p, f, u)) < 1e-9


def test_psi_kummer_relation():
    rng = random.Random(14)
    for _ in range(20):
        a, c = rand_c(rng), rand_c(rng, 0.2, 1.6)
        u = cmath.rect(rng.uniform(0.2, 4), rng.uniform(-2.5, 2.5))
        p2 = ConfParams(1 + a - c, 2 - c)
        rhs = nm.power(u, 1 - c) * sf.tricomi_psi(p2, u)
        assert rel(sf.tricomi_psi(ConfParams(a, c), u), rhs) < 1e-10


def test_psi_against_mpmath():
    rng = random.Random(15)
    for _ in range(15):
        a, c = rand_c(rng), rand_c(rng, 0.2, 1.6)
        u = cmath.rect(rng.uniform(0.2, 6), rng.uniform(-2.5, 2.5))
        assert rel(sf.tricomi_psi(ConfParams(a, c), u), complex(mpmath.hyperu(a, c, u))) < 1e-10


def test_psi_leading_asymptotics():
    assert abs(40 ** 0.3 * sf.tricomi_psi(ConfParams(0.3, 0.9), 40) - 1) < 0.05


def test_psi_errors():
    with pytest.raises(IntegerParameterDegeneracy):
        sf.tricomi_psi(ConfParams(0.3, 2), 0.5)
    with pytest.raises(nm.BranchCut):
        sf.tricomi_psi(ConfParams(0.3, 0.9), -1)


def test_conf_local_first_is_phi():
    p = ConfParams(0.3, 0.9)
    assert sf.conf_local(1, p, 0.6) == sf.kummer_phi(p, 0.6)


def test_conf_local_second_composition():
    a, c, u = 0.3, 0.9, 0.6
    want = math.exp(u) * u ** (1 - c) * sf.kummer_phi(ConfParams(1 - a, 2 - c), -u)
    assert rel(sf.conf_local(2, ConfParams(a, c), u), want) < 1e-15
    assert rel(want, complex(mpmath.exp(u) * mpmath.power(u, 1 - c) * mpmath.hyp1f1(1 - a, 2 - c, -u))) < 1e-13


@pytest.mark.parametrize("k", range(1, 5))
def test_conf_local_annihilates_equation(k):
    rng = random.Random(20 + k)
    p = ConfParams(0.31 + 0.1j, 0.58 + 0.2j)
    for _ in range(20):
        u = complex(rng.uniform(0.1, 2.5), rng.uniform(-1, 1))
        if k == 4:
            u = -u
        f = sf.conf_local(k, p, jet_at(u))
        assert nm.relative_residual(sf.confluent_terms(p, f, u)) < 1e-10


# limit relations -------------------------------------------------------------

def _decay(errs):
    return errs[0] / errs[1]


def test_phi_limit_first_order():
    a, c, u = 0.3 + 0.1j, 1.1, 1.5 + 0.4j
    target = sf.kummer_phi(ConfParams(a, c), u)
    errs = [abs(sf.hyp2f1(HypParams(a, b, c), u / b) - target) for b in (1e3, 1e4)]
    assert 7 <= _decay(errs) <= 13


@pytest.mark.parametrize("shift", [1, 0], ids=["one-minus-c-over-u", "minus-c-over-u"])
def test_psi_limits_first_order(shift):
    # the Gauss side sits far outside the unit disk, hence mpmath's continuation
    a, b, u = 0.3 + 0.1j, 0.7 - 0.2j, 1.5 + 0.4j
    target = complex(mpmath.power(u, a)) * sf.tricomi_psi(ConfParams(a, a + 1 - b), u)
    errs = [abs(complex(mpmath.hyp2f1(a, b, c, shift - c / u)) - target) for c in (1e3, 1e4)]
    assert 7 <= _decay(errs) <= 13
