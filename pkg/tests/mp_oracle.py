"""Test-only evaluation of kernel trees with mpmath's continued special functions."""

import mpmath

from heunkernels import kernel_engine as ke


def mp_eval(e, x, y):
    t = type(e)
    if t is ke.Const:
        return mpmath.mpc(e.value)
    if t is ke.CoordX:
        return mpmath.mpc(x)
    if t is ke.CoordY:
        return mpmath.mpc(y)
    if t is ke.Add:
        return mpmath.fsum(mp_eval(k, x, y) for k in e.terms)
    if t is ke.Mul:
        out = mpmath.mpc(1)
        for k in e.factors:
            out *= mp_eval(k, x, y)
        return out
    if t is ke.Div:
        return mp_eval(e.num, x, y) / mp_eval(e.den, x, y)
    if t is ke.Neg:
        return -mp_eval(e.arg, x, y)
    if t is ke.Pow:
        return mpmath.power(mp_eval(e.base, x, y), mpmath.mpc(e.exponent))
    if t is ke.Exp:
        return mpmath.exp(mp_eval(e.arg, x, y))
    if t is ke.Hyp2F1:
        p = e.params
        return mpmath.hyp2f1(p.a, p.b, p.c, mp_eval(e.arg, x, y))
    if t is ke.HypLocal:
        return mp_eval(ke.hyp_local_expr(e.k, e.params, e.arg), x, y)
    if t is ke.Phi:
        return mpmath.hyp1f1(e.params.a, e.params.c, mp_eval(e.arg, x, y))
    if t is ke.Psi:
        return mpmath.hyperu(e.params.a, e.params.c, mp_eval(e.arg, x, y))
    raise TypeError(t)
