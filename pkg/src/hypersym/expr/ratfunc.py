"""Rational functions with factored denominators.

A RatFunc is num / (den_scalar * prod(F_i ** e_i)) where num is an integer
polynomial, den_scalar a positive integer, and each F_i an interned primitive
polynomial with positive leading coefficient.  Keeping denominators in
factored form makes cancellation a matter of exact division against known
factors, so no multivariate gcd is ever needed: every denominator enters the
system through rf_inverse, which interns its factors, and later cancellations
only ever have to recognize those same factors.

Zero testing is exact regardless of whether a cancellation opportunity was
missed: the numerator polynomial is zero iff the function is zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from ..errors import DivisionByZeroError, EvalError
from . import poly as P
from .context import Context


class Factor:
    """Interned primitive polynomial, compared by identity."""

    __slots__ = ("poly", "key", "fid")

    def __init__(self, poly: P.Poly, key: tuple, fid: int):
        self.poly = poly
        self.key = key
        self.fid = fid

    def __repr__(self):
        return f"Factor(#{self.fid}, {len(self.poly)} terms)"


def poly_key(p: P.Poly) -> tuple:
    return tuple(sorted(p.items()))


def intern_factor(ctx: Context, p: P.Poly) -> Tuple[int, Factor]:
    """Normalize p to unit * content * primitive-positive-lead and intern.

    Returns (multiplier, factor) with p == multiplier * factor.poly.
    """
    if not p:
        raise DivisionByZeroError("zero polynomial cannot be a factor")
    c = P.pcontent(p)
    _, lc = P.pleading(p)
    if lc < 0:
        c = -c
    prim = {m: v // c for m, v in p.items()}
    key = poly_key(prim)
    f = ctx._factor_intern.get(key)
    if f is None:
        f = Factor(prim, key, len(ctx.den_atoms))
        ctx._factor_intern[key] = f
        ctx.den_atoms.append(f)
    return c, f


FactorVec = Tuple[Tuple[Factor, int], ...]


def intern_factors(ctx: Context, p: P.Poly) -> Tuple[int, "FactorVec"]:
    """Decompose p into multiplier * product of interned factor powers.

    The monomial content is split into per-variable factors so later
    cancellation can peel single powers (1/u1^2 becomes (u1)^2, not an
    opaque atom u1^2); the primitive remainder is interned whole."""
    if not p:
        raise DivisionByZeroError("zero polynomial cannot be a factor")
    lay = ctx.layout
    mono = P.pmono_gcd(p, lay)
    fs: List[Tuple[Factor, int]] = []
    if mono:
        p = P.pdiv_mono(p, mono)
        for i in lay.mono_vars(mono):
            _, f = intern_factor(ctx, {lay.var_mono(i): 1})
            fs.append((f, lay.exp(mono, i)))
    if len(p) == 1 and 0 in p:
        mult = p[0]
    else:
        mult, f = intern_factor(ctx, p)
        fs.append((f, 1))
    return mult, _sort_factors(fs)


class RatFunc:
    __slots__ = ("num", "den_scalar", "den_factors")

    def __init__(self, num: P.Poly, den_scalar: int, den_factors: FactorVec):
        self.num = num
        self.den_scalar = den_scalar
        self.den_factors = den_factors

    def is_zero(self) -> bool:
        return not self.num

    def __repr__(self):
        return (f"RatFunc({len(self.num)} terms / {self.den_scalar}"
                f" * {[(f.fid, e) for f, e in self.den_factors]})")


RF_ZERO_NUM: P.Poly = {}


def rf_zero(ctx: Context) -> RatFunc:
    return RatFunc({}, 1, ())


def rf_const(ctx: Context, q) -> RatFunc:
    q = Fraction(q)
    if q == 0:
        return rf_zero(ctx)
    return RatFunc(P.pconst(q.numerator), q.denominator, ())


def rf_from_poly(ctx: Context, p: P.Poly) -> RatFunc:
    if not p:
        return rf_zero(ctx)
    return rf_make(ctx, dict(p), 1, ())


def _sort_factors(fs: Iterable[Tuple[Factor, int]]) -> FactorVec:
    return tuple(sorted((fe for fe in fs if fe[1] > 0), key=lambda fe: fe[0].fid))


def rf_make(ctx: Context, num: P.Poly, den_scalar: int, den_factors) -> RatFunc:
    """Canonicalize: cancel known factors, reduce integer content, fix signs."""
    if not num:
        return rf_zero(ctx)
    if den_scalar == 0:
        raise DivisionByZeroError("zero denominator scalar")
    lay = ctx.layout
    factors: List[Tuple[Factor, int]] = [list(fe) for fe in den_factors]
    reduced: List[Tuple[Factor, int]] = []
    for f, e in factors:
        while e > 0:
            q = P.pdiv_exact(num, f.poly, lay)
            if q is None:
                break
            num = q
            e -= 1
        if e > 0:
            reduced.append((f, e))
    if den_scalar < 0:
        den_scalar = -den_scalar
        num = P.pneg(num)
    c = P.pcontent(num)
    g = gcd(c, den_scalar)
    if g > 1:
        num = {m: v // g for m, v in num.items()}
        den_scalar //= g
    return RatFunc(num, den_scalar, _sort_factors(reduced))


def rf_neg(ctx: Context, a: RatFunc) -> RatFunc:
    if a.is_zero():
        return a
    return RatFunc(P.pneg(a.num), a.den_scalar, a.den_factors)


def rf_scale(ctx: Context, a: RatFunc, q) -> RatFunc:
    q = Fraction(q)
    if a.is_zero() or q == 0:
        return rf_zero(ctx)
    num = P.pscale(a.num, q.numerator)
    return rf_make(ctx, num, a.den_scalar * q.denominator, a.den_factors)


def _den_lcm(items: List[RatFunc]) -> Tuple[int, Dict[int, Tuple[Factor, int]]]:
    s = 1
    fmax: Dict[int, Tuple[Factor, int]] = {}
    for a in items:
        s = s * a.den_scalar // gcd(s, a.den_scalar)
        for f, e in a.den_factors:
            cur = fmax.get(f.fid)
            if cur is None or e > cur[1]:
                fmax[f.fid] = (f, e)
    return s, fmax


def rf_sum(ctx: Context, items: Iterable[RatFunc]) -> RatFunc:
    items = [a for a in items if not a.is_zero()]
    if not items:
        return rf_zero(ctx)
    if len(items) == 1:
        return items[0]
    lay = ctx.layout
    s, fmax = _den_lcm(items)
    total: P.Poly = {}
    for a in items:
        scale = s // a.den_scalar
        cof: Optional[P.Poly] = None
        have = {f.fid: e for f, e in a.den_factors}
        for fid, (f, e) in fmax.items():
            need = e - have.get(fid, 0)
            if need > 0:
                piece = P.ppow(f.poly, need, lay, ctx.max_terms)
                cof = piece if cof is None else P.pmul(cof, piece, lay, ctx.max_terms)
        term = a.num
        if cof is not None:
            term = P.pmul(term, cof, lay, ctx.max_terms)
        P.padd_inplace(total, term, scale)
    return rf_make(ctx, total, s, tuple(fe for _, fe in sorted(fmax.items())))


def rf_add(ctx: Context, a: RatFunc, b: RatFunc) -> RatFunc:
    return rf_sum(ctx, (a, b))


def rf_sub(ctx: Context, a: RatFunc, b: RatFunc) -> RatFunc:
    return rf_sum(ctx, (a, rf_neg(ctx, b)))


def rf_mul(ctx: Context, a: RatFunc, b: RatFunc) -> RatFunc:
    if a.is_zero() or b.is_zero():
        return rf_zero(ctx)
    num = P.pmul(a.num, b.num, ctx.layout, ctx.max_terms)
    merged: Dict[int, Tuple[Factor, int]] = {f.fid: (f, e) for f, e in a.den_factors}
    for f, e in b.den_factors:
        cur = merged.get(f.fid)
        merged[f.fid] = (f, e + (cur[1] if cur else 0))
    return rf_make(ctx, num, a.den_scalar * b.den_scalar,
                   tuple(fe for _, fe in sorted(merged.items())))


def rf_inverse(ctx: Context, a: RatFunc) -> RatFunc:
    if a.is_zero():
        raise DivisionByZeroError("inverse of zero")
    c, fs = intern_factors(ctx, a.num)
    lay = ctx.layout
    num: P.Poly = P.pconst(a.den_scalar)
    for g, e in a.den_factors:
        num = P.pmul(num, P.ppow(g.poly, e, lay, ctx.max_terms), lay, ctx.max_terms)
    return rf_make(ctx, num, c, fs)


def rf_partial(ctx: Context, a: RatFunc, var_index: int) -> RatFunc:
    """Partial derivative treating base variables as independent."""
    if a.is_zero():
        return a
    lay = ctx.layout
    terms: List[RatFunc] = []
    dn = P.pderiv(a.num, var_index, lay)
    if dn:
        terms.append(rf_make(ctx, dn, a.den_scalar, a.den_factors))
    for i, (f, e) in enumerate(a.den_factors):
        df = P.pderiv(f.poly, var_index, lay)
        if not df:
            continue
        num = P.pmul(a.num, df, lay, ctx.max_terms)
        num = P.pscale(num, -e)
        bumped = tuple((g, ex + 1) if j == i else (g, ex)
                       for j, (g, ex) in enumerate(a.den_factors))
        terms.append(rf_make(ctx, num, a.den_scalar, bumped))
    return rf_sum(ctx, terms)


def rf_equal(ctx: Context, a: RatFunc, b: RatFunc) -> bool:
    return rf_sub(ctx, a, b).is_zero()


def rf_eval(ctx: Context, a: RatFunc, values) -> float:
    if a.is_zero():
        return 0.0
    lay = ctx.layout
    den = float(a.den_scalar)
    for f, e in a.den_factors:
        den *= P.peval(f.poly, values, lay) ** e
    if den == 0.0 or abs(den) < 1e-300:
        raise EvalError("denominator vanished at sample point")
    return P.peval(a.num, values, lay) / den


def rf_den_poly(ctx: Context, a: RatFunc) -> P.Poly:
    """Materialize the denominator as a single polynomial (for display/tests)."""
    lay = ctx.layout
    out = P.pconst(a.den_scalar)
    for f, e in a.den_factors:
        out = P.pmul(out, P.ppow(f.poly, e, lay, ctx.max_terms), lay, ctx.max_terms)
    return out


def rf_is_poly(a: RatFunc) -> bool:
    return a.den_scalar == 1 and not a.den_factors


def rf_as_fraction(a: RatFunc) -> Optional[Fraction]:
    """The exact rational value when a is constant, else None."""
    if a.is_zero():
        return Fraction(0)
    if a.den_factors:
        return None
    if len(a.num) != 1:
        return None
    (m, c), = a.num.items()
    if m != 0:
        return None
    return Fraction(c, a.den_scalar)
