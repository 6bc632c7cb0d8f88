"""Catalog of Heun and confluent Heun kernel families.

Every family member is a :class:`~heunkernels.kernel_engine.Kernel`
(parametric builder).  :func:`entry` instantiates one for a parameter set
and certifies it against the kernel equation before returning it.

Alongside the generated families this module keeps hand-written *display*
trees: the closed forms of the lower members written out directly, used to
cross-check the transformation pipeline.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field

from .errors import CertificateFailed, NoMatchedRegion
from .heun_ops import CheParams, HeunParams
from .kernel_engine import (
    Exp,
    Expr,
    Hyp2F1,
    Instance,
    Kernel,
    Phi,
    Pow,
    Psi,
    X,
    Y,
    conf_local_expr,
    default_points,
    evaluate,
    hyp_local_expr,
    kernel_mobius,
    residual_sweep,
    sample_points,
)
from .specialfn import ConfParams, HypParams

FAMILIES = ("LW", "Erdelyi", "CHE-LW", "CHE-Gauss", "CHE-Shift", "CHE-ProdConf", "CHE-Mixed")


@dataclass(frozen=True)
class KernelFamilyId:
    family: str
    i: int = 1            # homotopic subscript
    j: int = 1            # Möbius superscript
    k: int | None = None  # local-solution indices
    l: int | None = None
    lam: complex | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def tag(self) -> str:
        idx = ",".join(str(v) for v in (self.k, self.l) if v is not None)
        return f"{self.family}[{self.i},{self.j}]({idx})"


@dataclass
class CatalogEntry:
    id: KernelFamilyId
    params: object
    kernel: Kernel
    instance: Instance
    provenance: str
    certificate: object = field(default=None, repr=False)

    @property
    def expr(self) -> Expr:
        return self.instance.expr


def entry(fid: KernelFamilyId, kernel: Kernel, p, provenance: str, certify: bool = True,
          n_points: int = 3, seed: int = 0) -> CatalogEntry:
    inst = kernel.at(p)
    cert = None
    if certify:
        cert = residual_sweep(inst, n_points, random.Random(seed))
        if not cert.passed:
            why = cert.skipped or f"residual {cert.max_residual:.3g}"
            raise CertificateFailed(f"{fid.tag()}: {why}")
    return CatalogEntry(fid, p, kernel, inst, provenance, cert)


# Heun kernels ------------------------------------------------------------------

def _eps(p: HeunParams):
    return p.epsilon


def lambe_ward_kernel(k: int) -> Kernel:
    """``F^(k)(xy/a)`` with ``(a, b, c) = (alpha, beta, gamma)``."""
    def build(p: HeunParams) -> Expr:
        return hyp_local_expr(k, HypParams(p.alpha, p.beta, p.gamma), X * Y / p.a)
    return Kernel(f"LW{k}", build)


def lambe_ward_family_kernel(j: int, k: int) -> Kernel:
    base = lambe_ward_kernel(k)
    return base if j == 1 else kernel_mobius(j, base)


def erdelyi_zeta(p: HeunParams) -> Expr:
    a = p.a
    return (X - a) * (Y - a) / ((1 - a) * (X * Y - a))


def _series_draw(k: int, rng: random.Random) -> complex:
    """A point where the ``k``-th local solution's Gauss series converges well."""
    w = 0.7 * math.sqrt(rng.uniform(0.02, 1.0)) * cmath.exp(2j * math.pi * rng.random())
    if k in (1, 2):
        return w
    if k in (3, 4):
        return 1 - w
    return 1 / w


def separated_region(k: int, l: int, a: complex):
    """Sampler placing ``xi`` and ``zeta`` inside the series disks of ``P^(k)`` and ``Q^(l)``.

    ``xy = a xi`` and ``x + y`` follow linearly from ``zeta``, so ``x`` and
    ``y`` are the roots of a quadratic.
    """
    def sampler(rng):
        xi, zeta = _series_draw(k, rng), _series_draw(l, rng)
        s = a * xi
        t = (s + a * a - zeta * (1 - a) * (s - a)) / a
        d = cmath.sqrt(t * t - 4 * s)
        return (t + d) / 2, (t - d) / 2
    return sampler


def erdelyi_kernel(k: int, l: int, lam) -> Kernel:
    """``(1 - xi)^(-lam) P^(k)(xi) Q^(l)(zeta)``."""
    lam = complex(lam)

    def points(p: HeunParams):
        regions = default_points(p)
        return regions[:1] + [separated_region(k, l, p.a)] + regions[1:]

    def build(p: HeunParams) -> Expr:
        xi = X * Y / p.a
        pp = HypParams(p.alpha - lam, p.beta - lam, p.gamma)
        qp = HypParams(lam, p.alpha + p.beta - p.gamma - lam, _eps(p))
        return Pow(1 - xi, -lam) * hyp_local_expr(k, pp, xi) * hyp_local_expr(l, qp, erdelyi_zeta(p))
    return Kernel(f"E{k}{l}", build, "heun", points)


def erdelyi_family_kernel(j: int, lam, k: int = 1, l: int = 1) -> Kernel:
    base = erdelyi_kernel(k, l, lam)
    return base if j == 1 else kernel_mobius(j, base)


def lambe_ward(k: int, p: HeunParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("LW", k=k), lambe_ward_kernel(k), p, "LW initial set", **kw)


def lambe_ward_family(j: int, k: int, p: HeunParams, **kw) -> CatalogEntry:
    if not 2 <= j <= 6:
        raise ValueError("Möbius superscript must be 2..6")
    return entry(KernelFamilyId("LW", j=j, k=k), lambe_ward_family_kernel(j, k), p,
                 f"K{j} applied to LW initial set", **kw)


def erdelyi(k: int, l: int, lam, p: HeunParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("Erdelyi", k=k, l=l, lam=complex(lam)), erdelyi_kernel(k, l, lam), p,
                 "Erdelyi initial set", **kw)


def erdelyi_family(j: int, lam, p: HeunParams, k: int = 1, l: int = 1, **kw) -> CatalogEntry:
    if not 2 <= j <= 6:
        raise ValueError("Möbius superscript must be 2..6")
    return entry(KernelFamilyId("Erdelyi", j=j, k=k, l=l, lam=complex(lam)),
                 erdelyi_family_kernel(j, lam, k, l), p, f"K{j} applied to Erdelyi kernel", **kw)


def argument_catalog(p: HeunParams) -> list:
    """The six Gauss arguments produced by ``K_1 .. K_6`` on ``xy/a``."""
    a = p.a
    return [
        X * Y / a,
        (a - 1) * X * Y / (a * (X - 1) * (Y - 1)),
        (1 - a) * X * Y / ((a - X) * (a - Y)),
        (X - 1) * (Y - 1) / (1 - a),
        a * (X - 1) * (Y - 1) / ((X - a) * (Y - a)),
        (X - a) * (Y - a) / (a * (a - 1)),
    ]


# confluent kernels ------------------------------------------------------------------

def che_lambe_ward_kernel(i: int) -> Kernel:
    def build(p: CheParams) -> Expr:
        return conf_local_expr(i, ConfParams(p.alpha, p.gamma), -p.rho * X * Y)
    return Kernel(f"CLW{i}", build, "che")


def che_gauss_kernel(i: int) -> Kernel:
    def build(p: CheParams) -> Expr:
        u = X * Y / ((X - 1) * (Y - 1))
        hp = HypParams(p.alpha, 1 + p.alpha - p.delta, p.gamma)
        return Pow((1 - X) * (1 - Y), -p.alpha) * hyp_local_expr(i, hp, u)
    return Kernel(f"CG{i}", build, "che")


def che_shift_kernel(i: int) -> Kernel:
    def build(p: CheParams) -> Expr:
        return conf_local_expr(i, ConfParams(p.alpha, p.gamma + p.delta), -p.rho * (X + Y - 1))
    return Kernel(f"CS{i}", build, "che")


def che_prod_kernel(i: int, j: int, lam) -> Kernel:
    lam = complex(lam)

    def build(p: CheParams) -> Expr:
        left = conf_local_expr(i, ConfParams(p.alpha - lam, p.gamma), -p.rho * X * Y)
        right = conf_local_expr(j, ConfParams(lam, p.delta), p.rho * (X - 1) * (Y - 1))
        return left * right
    return Kernel(f"CP{i}{j}", build, "che")


def che_mixed_kernel(i: int, j: int, lam) -> Kernel:
    """``(1-x-y)^(-lam) phi^(i)(rho(1-x-y)) F^(j)((x-1)(y-1)/(1-x-y))``."""
    lam = complex(lam)

    def build(p: CheParams) -> Expr:
        w = 1 - X - Y
        cp = ConfParams(p.alpha - lam, p.gamma + p.delta - 2 * lam)
        hp = HypParams(lam, p.gamma + p.delta - 1 - lam, p.delta)
        return Pow(w, -lam) * conf_local_expr(i, cp, p.rho * w) * hyp_local_expr(j, hp, (X - 1) * (Y - 1) / w)
    return Kernel(f"CM{i}{j}", build, "che")


def che_lambe_ward(i: int, p: CheParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("CHE-LW", k=i), che_lambe_ward_kernel(i), p, "confluent LW", **kw)


def che_gauss(i: int, p: CheParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("CHE-Gauss", k=i), che_gauss_kernel(i), p, "confluent Gauss", **kw)


def che_shift(i: int, p: CheParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("CHE-Shift", k=i), che_shift_kernel(i), p, "confluent shift", **kw)


def che_prod_conf(i: int, j: int, lam, p: CheParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("CHE-ProdConf", k=i, l=j, lam=complex(lam)), che_prod_kernel(i, j, lam), p,
                 "confluent products", **kw)


def che_mixed(i: int, j: int, lam, p: CheParams, **kw) -> CatalogEntry:
    return entry(KernelFamilyId("CHE-Mixed", k=i, l=j, lam=complex(lam)), che_mixed_kernel(i, j, lam), p,
                 "confluent mixed products", **kw)


def heun_catalog_kernels(lam) -> list:
    """(id, kernel) for every Heun family member: 6 + 30 + 36 + 5."""
    out = []
    for k in range(1, 7):
        out.append((KernelFamilyId("LW", k=k), lambe_ward_kernel(k)))
    for j in range(2, 7):
        for k in range(1, 7):
            out.append((KernelFamilyId("LW", j=j, k=k), lambe_ward_family_kernel(j, k)))
    for k in range(1, 7):
        for l in range(1, 7):
            out.append((KernelFamilyId("Erdelyi", k=k, l=l, lam=complex(lam)), erdelyi_kernel(k, l, lam)))
    for j in range(2, 7):
        out.append((KernelFamilyId("Erdelyi", j=j, k=1, l=1, lam=complex(lam)),
                    erdelyi_family_kernel(j, lam)))
    return out


def che_catalog_kernels(lam) -> list:
    out = []
    for i in range(1, 5):
        out.append((KernelFamilyId("CHE-LW", k=i), che_lambe_ward_kernel(i)))
    for i in range(1, 7):
        out.append((KernelFamilyId("CHE-Gauss", k=i), che_gauss_kernel(i)))
    for i in range(1, 5):
        out.append((KernelFamilyId("CHE-Shift", k=i), che_shift_kernel(i)))
    for i in range(1, 5):
        for j in range(1, 5):
            out.append((KernelFamilyId("CHE-ProdConf", k=i, l=j, lam=complex(lam)), che_prod_kernel(i, j, lam)))
    for i in range(1, 5):
        for j in range(1, 7):
            out.append((KernelFamilyId("CHE-Mixed", k=i, l=j, lam=complex(lam)), che_mixed_kernel(i, j, lam)))
    return out


# display trees ----------------------------------------------------------------
# Closed forms written out by hand; the generated kernels must match these
# up to a constant factor.

def display_lw(k: int, p: HeunParams) -> Expr:
    al, be, ga, a = p.alpha, p.beta, p.gamma, p.a
    u = X * Y / a
    if k == 1:
        return Hyp2F1(HypParams(al, be, ga), u)
    if k == 2:
        return Pow(X * Y, 1 - ga) * Hyp2F1(HypParams(al + 1 - ga, be + 1 - ga, 2 - ga), u)
    if k == 3:
        return Hyp2F1(HypParams(al, be, al + be + 1 - ga), 1 - u)
    if k == 4:
        return Pow(1 - u, ga - al - be) * Hyp2F1(HypParams(ga - al, ga - be, 1 + ga - al - be), 1 - u)
    if k == 5:
        return Pow(X * Y, -al) * Hyp2F1(HypParams(al, al + 1 - ga, al + 1 - be), a / (X * Y))
    if k == 6:
        return Pow(X * Y, -be) * Hyp2F1(HypParams(be + 1 - ga, be, be + 1 - al), a / (X * Y))
    raise ValueError(k)


def display_lw_family(j: int, k: int, p: HeunParams) -> Expr:
    """The two displayed members (k = 1, 2) of each Möbius family."""
    al, be, ga, de, a = p.alpha, p.beta, p.gamma, p.delta, p.a
    ep = p.epsilon
    one_x = (1 - X) * (1 - Y)
    one_xa = (1 - X / a) * (1 - Y / a)
    xy = X * Y
    args = argument_catalog(p)
    u = args[j - 1]
    table = {
        (2, 1): Pow(one_x, -al) * Hyp2F1(HypParams(al, 1 + al - de, ga), u),
        (2, 2): Pow(one_x, ga - al - 1) * Pow(xy, 1 - ga)
        * Hyp2F1(HypParams(al + 1 - ga, 2 + al - ga - de, 2 - ga), u),
        (3, 1): Pow(one_xa, -al) * Hyp2F1(HypParams(al, ga + de - be, ga), u),
        (3, 2): Pow(xy, 1 - ga) * Pow(one_xa, ga - 1 - al)
        * Hyp2F1(HypParams(al + 1 - ga, de + 1 - be, 2 - ga), u),
        (4, 1): Hyp2F1(HypParams(al, be, de), u),
        (4, 2): Pow(one_x, 1 - de) * Hyp2F1(HypParams(al + 1 - de, be + 1 - de, 2 - de), u),
        (5, 1): Pow(one_xa, -al) * Hyp2F1(HypParams(al, ga + de - be, de), u),
        (5, 2): Pow(one_x, 1 - de) * Pow(one_xa, de - 1 - al)
        * Hyp2F1(HypParams(al + 1 - de, ga + 1 - be, 2 - de), u),
        (6, 1): Hyp2F1(HypParams(al, be, ep), u),
        (6, 2): Pow(one_xa, 1 - ep) * Hyp2F1(HypParams(ga + de - al, ga + de - be, 2 - ep), u),
    }
    return table[(j, k)]


def display_erdelyi_p(k: int, lam, p: HeunParams) -> Expr:
    """``(1 - xy/a)^(-lam) P^(k)`` as displayed for the initial set."""
    al, be, ga, a = p.alpha, p.beta, p.gamma, p.a
    w = 1 - X * Y / a
    u = X * Y / a
    if k == 1:
        return Pow(w, -lam) * Hyp2F1(HypParams(al - lam, be - lam, ga), u)
    if k == 2:
        return Pow(X * Y, 1 - ga) * Pow(w, -lam) * Hyp2F1(HypParams(al + 1 - ga - lam, be + 1 - ga - lam, 2 - ga), u)
    if k == 3:
        return Pow(w, -lam) * Hyp2F1(HypParams(al - lam, be - lam, 1 + al + be - ga - 2 * lam), w)
    if k == 4:
        return Pow(w, ga - al - be + lam) * Hyp2F1(
            HypParams(ga - al + lam, ga - be + lam, 1 + ga - al - be + 2 * lam), w)
    if k == 5:
        return Pow(X * Y, lam - al) * Pow(w, -lam) * Hyp2F1(HypParams(al - lam, al + 1 - ga - lam, 1 + al - be), a / (X * Y))
    if k == 6:
        return Pow(X * Y, lam - be) * Pow(w, -lam) * Hyp2F1(HypParams(be - lam, be + 1 - ga - lam, 1 + be - al), a / (X * Y))
    raise ValueError(k)


def display_erdelyi_q(l: int, lam, p: HeunParams, printed: bool = False) -> Expr:
    """``Q^(l)(zeta)``.

    ``printed=True`` reproduces the published forms of ``Q^(5)`` and
    ``Q^(6)``, whose parameters do not solve the separated equation; the
    default gives the forms implied by the local solutions.
    """
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    ep = p.epsilon
    z = erdelyi_zeta(p)
    if l == 1:
        return Hyp2F1(HypParams(lam, al + be - ga - lam, ep), z)
    if l == 2:
        return Pow(z, 1 - ep) * Hyp2F1(HypParams(lam + 1 - ep, de - lam, 2 - ep), z)
    if l == 3:
        return Hyp2F1(HypParams(lam, al + be - ga - lam, de), 1 - z)
    if l == 4:
        return Pow(1 - z, 1 - de) * Hyp2F1(HypParams(ep - lam, 1 + lam - de, 2 - de), 1 - z)
    if l == 5:
        c = 1 + 2 * lam - al - be + (0 if printed else ga)
        return Pow(z, -lam) * Hyp2F1(HypParams(lam, 1 + lam - ep, c), 1 / z)
    if l == 6:
        if printed:
            return Pow(z, lam + ga - al - de) * Hyp2F1(
                HypParams(de - lam, al + be - ga + lam, 1 - 2 * lam + al + be), 1 / z)
        return Pow(z, lam + ga - al - be) * Hyp2F1(
            HypParams(de - lam, al + be - ga - lam, 1 - 2 * lam + al + be - ga), 1 / z)
    raise ValueError(l)


def display_erdelyi(k: int, l: int, lam, p: HeunParams, printed: bool = False) -> Expr:
    return display_erdelyi_p(k, lam, p) * display_erdelyi_q(l, lam, p, printed)


def display_erdelyi_family(j: int, lam, p: HeunParams, printed: bool = False) -> Expr:
    """Displayed ``K_j`` images of the ``(1, 1)`` Erdelyi kernel.

    The published ``j = 4`` form has ``gamma`` as the third parameter of
    the first Gauss function and ``alpha - beta`` in the second;
    ``printed=True`` reproduces it.  The default has ``delta`` and
    ``alpha + beta``, which is what the substitution produces.
    """
    al, be, ga, de, a = p.alpha, p.beta, p.gamma, p.delta, p.a
    ep = p.epsilon
    one_x = (1 - X) * (1 - Y)
    one_xa = (1 - X / a) * (1 - Y / a)
    args = argument_catalog(p)
    u = args[j - 1]
    if j == 2:
        return (Pow(one_x, -al) * Pow(1 - u, -lam) * Hyp2F1(HypParams(al - lam, 1 + al - de - lam, ga), u)
                * Hyp2F1(HypParams(lam, 1 + 2 * al - ga - de - lam, ep),
                         (X - a) * (Y - a) / (a * (1 - X - Y) + X * Y)))
    if j == 3:
        return (Pow(one_xa, -al) * Pow(1 - (1 - a) * X * Y / ((X - a) * (Y - a)), -lam)
                * Hyp2F1(HypParams(al - lam, ga + de - be - lam, ga), u)
                * Hyp2F1(HypParams(lam, al - be + de - lam, de), (X - 1) * (Y - 1) / (a + X * Y - X - Y)))
    if j == 4:
        b2 = (al - be - de - lam) if printed else (al + be - de - lam)
        c1 = ga if printed else de
        return (Pow(1 - u, -lam) * Hyp2F1(HypParams(al - lam, be - lam, c1), u)
                * Hyp2F1(HypParams(lam, b2, ep), (X - a) * (Y - a) / (a * (a + X * Y - X - Y))))
    if j == 5:
        return (Pow(one_xa, -al) * Pow(1 - u, -lam) * Hyp2F1(HypParams(al - lam, ga + de - be - lam, de), u)
                * Hyp2F1(HypParams(lam, al - be + ga - lam, ga), X * Y / (X * Y - a)))
    if j == 6:
        return (Pow(1 - u, -lam) * Hyp2F1(HypParams(al - lam, be - lam, ep), u)
                * Hyp2F1(HypParams(lam, ga + de - 1 - lam, de),
                         a * (X - 1) * (Y - 1) / (a * (1 - X - Y) + X * Y)))
    raise ValueError(j)


def display_che_lw(i: int, p: CheParams) -> Expr:
    al, ga, r = p.alpha, p.gamma, p.rho
    if i == 1:
        return Phi(ConfParams(al, ga), -r * X * Y)
    if i == 2:
        return Exp(-r * X * Y) * Pow(X * Y, 1 - ga) * Phi(ConfParams(1 - al, 2 - ga), r * X * Y)
    if i == 3:
        return Psi(ConfParams(al, ga), -r * X * Y)
    if i == 4:
        return Exp(-r * X * Y) * Pow(X * Y, 1 - ga) * Psi(ConfParams(1 - al, 2 - ga), r * X * Y)
    raise ValueError(i)


def display_che_prod(i: int, j: int, lam, p: CheParams) -> Expr:
    al, ga, de, r = p.alpha, p.gamma, p.delta, p.rho
    xy = -r * X * Y
    zz = r * (X - 1) * (Y - 1)
    left = {1: Phi(ConfParams(al - lam, ga), xy),
            2: Exp(-r * X * Y) * Pow(X * Y, 1 - ga) * Phi(ConfParams(lam + 1 - al, 2 - ga), r * X * Y)}[i]
    right = {1: Phi(ConfParams(lam, de), zz),
             2: Exp(zz) * Pow((X - 1) * (Y - 1), 1 - de) * Phi(ConfParams(1 - lam, 2 - de), -zz)}[j]
    return left * right


def display_che_mixed(lam, p: CheParams) -> Expr:
    """The displayed mixed kernel (the ``Psi``, ``F^(1)`` member)."""
    al, ga, de, r = p.alpha, p.gamma, p.delta, p.rho
    w = 1 - X - Y
    return (Pow(w, -lam) * Psi(ConfParams(al - lam, ga + de - 2 * lam), r * w)
            * Hyp2F1(HypParams(lam, ga + de - 1 - lam, de), (X - 1) * (Y - 1) / w))


# confluence ----------------------------------------------------------------------

def confluent_heun_params(p: CheParams, a) -> HeunParams:
    """Heun parameters with ``beta = -rho a``; the other exponents are kept."""
    return HeunParams(a, 0, p.alpha, -p.rho * a, p.gamma, p.delta)


@dataclass(frozen=True)
class ConfluencePair:
    name: str
    family: str
    heun: Kernel
    che: Kernel


def confluence_pairs(lam=0.37 + 0.11j) -> list:
    """Matched (Heun kernel, confluent kernel) pairs, one or more per family."""
    return [
        ConfluencePair("LW1->CLW1", "CHE-LW", lambe_ward_kernel(1), che_lambe_ward_kernel(1)),
        ConfluencePair("LW2->CLW2", "CHE-LW", lambe_ward_kernel(2), che_lambe_ward_kernel(2)),
        ConfluencePair("LW[2](1)->CG1", "CHE-Gauss", lambe_ward_family_kernel(2, 1), che_gauss_kernel(1)),
        ConfluencePair("LW[6](3)->CS1", "CHE-Shift", lambe_ward_family_kernel(6, 3), che_shift_kernel(1)),
        ConfluencePair("E(1,3)->CP11", "CHE-ProdConf", erdelyi_kernel(1, 3, lam), che_prod_kernel(1, 1, lam)),
        ConfluencePair("E[6](3,1)->CM11", "CHE-Mixed", erdelyi_family_kernel(6, lam, 3, 1),
                       che_mixed_kernel(1, 1, lam)),
    ]


@dataclass
class ConfluenceReport:
    name: str
    a_values: list
    errors: list
    points: list

    @property
    def decay_order(self):
        if len(self.errors) < 2:
            return None
        e0, e1 = self.errors[-2], self.errors[-1]
        a0, a1 = abs(self.a_values[-2]), abs(self.a_values[-1])
        if e0 <= 0 or e1 <= 0:
            return None
        return math.log(e0 / e1) / math.log(a1 / a0)

    @property
    def ratio(self):
        if len(self.errors) < 2 or self.errors[-1] == 0:
            return None
        return self.errors[-2] / self.errors[-1]


def confluence_limit_check(pair: ConfluencePair, p: CheParams, a_values, n_points: int = 8,
                           seed: int = 0) -> ConfluenceReport:
    """Sup relative error between the confluent kernel and the scaled Heun kernel.

    For each ``a``, a single constant is fitted by the ratio at the first
    sample point and the error is measured at the others.
    """
    rng = random.Random(seed)
    che = pair.che.at(p)
    heuns = [pair.heun.at(confluent_heun_params(p, a)) for a in a_values]
    pts = sample_points(che, n_points + 1, rng, extra=heuns)
    if len(pts) < n_points + 1:
        raise NoMatchedRegion(f"{pair.name}: only {len(pts)} common points")
    ref = [evaluate(che.expr, x, y) for x, y in pts]
    errors = []
    for h in heuns:
        vals = [evaluate(h.expr, x, y) for x, y in pts]
        c = ref[0] / vals[0]
        errors.append(max(abs(c * v - r) / abs(r) for v, r in zip(vals[1:], ref[1:])))
    return ConfluenceReport(pair.name, list(a_values), errors, pts)
