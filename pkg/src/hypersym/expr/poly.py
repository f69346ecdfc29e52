"""Sparse integer polynomials over bit-packed exponent vectors.

A monomial is a single Python integer: sixteen bits per variable plus a
leading field holding the total degree.  Integer comparison of packed
monomials is then exactly graded-lexicographic order (total degree first,
ties broken by the exponent of the largest registered variable), and
monomial multiplication is integer addition.  A polynomial is a plain dict
mapping packed monomials to nonzero integer coefficients.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import SizeLimitError

Poly = Dict[int, int]

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
FIELD_TOP = 1 << (FIELD_BITS - 1)


class Layout:
    """Packing geometry for a fixed list of variables."""

    __slots__ = ("nvars", "total_shift", "borrow_mask", "_units")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.total_shift = FIELD_BITS * nvars
        mask = 0
        for i in range(nvars + 1):
            mask |= FIELD_TOP << (FIELD_BITS * i)
        self.borrow_mask = mask
        self._units = [(1 << (FIELD_BITS * i)) | (1 << self.total_shift)
                       for i in range(nvars)]

    def pack(self, exps: Sequence[int]) -> int:
        mono = 0
        total = 0
        for i, e in enumerate(exps):
            if e:
                if e < 0 or e >= FIELD_TOP:
                    raise SizeLimitError(f"exponent {e} out of packing range")
                mono |= e << (FIELD_BITS * i)
                total += e
        if total >= FIELD_TOP:
            raise SizeLimitError("total degree out of packing range")
        return mono | (total << self.total_shift)

    def unpack(self, mono: int) -> List[int]:
        return [(mono >> (FIELD_BITS * i)) & FIELD_MASK for i in range(self.nvars)]

    def unit(self, i: int) -> int:
        return self._units[i]

    def exp(self, mono: int, i: int) -> int:
        return (mono >> (FIELD_BITS * i)) & FIELD_MASK

    def total(self, mono: int) -> int:
        return mono >> self.total_shift

    def var_mono(self, i: int, e: int = 1) -> int:
        if e < 0 or e >= FIELD_TOP:
            raise SizeLimitError(f"exponent {e} out of packing range")
        return (e << (FIELD_BITS * i)) | (e << self.total_shift)

    def mono_mul(self, a: int, b: int) -> int:
        m = a + b
        if m & self.borrow_mask:
            raise SizeLimitError("monomial exponent overflow")
        return m

    def mono_divides(self, a: int, b: int) -> bool:
        """True when monomial a divides monomial b."""
        d = b - a
        return d >= 0 and not (d & self.borrow_mask)

    def mono_vars(self, mono: int):
        for i in range(self.nvars):
            if (mono >> (FIELD_BITS * i)) & FIELD_MASK:
                yield i


def pzero() -> Poly:
    return {}


def pconst(c: int) -> Poly:
    return {0: c} if c else {}


def pcopy(a: Poly) -> Poly:
    return dict(a)


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            del out[m]
    return out


def padd_inplace(out: Poly, b: Poly, scale: int = 1) -> None:
    if scale == 0:
        return
    for m, c in b.items():
        v = out.get(m, 0) + c * scale
        if v:
            out[m] = v
        else:
            del out[m]


def psub(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) - c
        if v:
            out[m] = v
        else:
            del out[m]
    return out


def pneg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def pscale(a: Poly, c: int) -> Poly:
    if c == 0:
        return {}
    if c == 1:
        return dict(a)
    return {m: c * v for m, v in a.items()}


def pmul_mono(a: Poly, mono: int, coeff: int, layout: Layout) -> Poly:
    if coeff == 0:
        return {}
    borrow = layout.borrow_mask
    out = {}
    for m, c in a.items():
        mm = m + mono
        if mm & borrow:
            raise SizeLimitError("monomial exponent overflow")
        out[mm] = c * coeff
    return out


def pmul(a: Poly, b: Poly, layout: Layout, max_terms: int = 0) -> Poly:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 1:
        (mono, coeff), = b.items()
        return pmul_mono(a, mono, coeff, layout)
    out: Poly = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = ma + mb
            v = get(m, 0) + ca * cb
            if v:
                out[m] = v
            else:
                del out[m]
        if max_terms and len(out) > max_terms:
            raise SizeLimitError(
                f"polynomial exceeded {max_terms} terms during multiplication")
    if out:
        borrow = layout.borrow_mask
        for m in out:
            if m & borrow:
                raise SizeLimitError("monomial exponent overflow")
    return out


def ppow(a: Poly, k: int, layout: Layout, max_terms: int = 0) -> Poly:
    if k < 0:
        raise ValueError("negative power of a polynomial")
    out = pconst(1)
    base = a
    while k:
        if k & 1:
            out = pmul(out, base, layout, max_terms)
        k >>= 1
        if k:
            base = pmul(base, base, layout, max_terms)
    return out


def pderiv(a: Poly, i: int, layout: Layout) -> Poly:
    shift = FIELD_BITS * i
    unit = layout.unit(i)
    out = {}
    for m, c in a.items():
        e = (m >> shift) & FIELD_MASK
        if e:
            out[m - unit] = c * e
    return out


def pcontent(a: Poly) -> int:
    g = 0
    for c in a.values():
        g = math.gcd(g, c)
        if g == 1:
            return 1
    return g


def pmono_gcd(a: Poly, layout: Layout) -> int:
    """Largest monomial dividing every term."""
    it = iter(a)
    try:
        first = next(it)
    except StopIteration:
        return 0
    mins = layout.unpack(first)
    for m in it:
        if not any(mins):
            break
        for i in range(layout.nvars):
            e = (m >> (FIELD_BITS * i)) & FIELD_MASK
            if e < mins[i]:
                mins[i] = e
    return layout.pack(mins)


def pdiv_mono(a: Poly, mono: int) -> Poly:
    """Divide by a monomial known to divide every term."""
    if mono == 0:
        return dict(a)
    return {m - mono: c for m, c in a.items()}


def pleading(a: Poly) -> Tuple[int, int]:
    m = max(a)
    return m, a[m]


def pdeg_var(a: Poly, i: int) -> int:
    shift = FIELD_BITS * i
    d = 0
    for m in a:
        e = (m >> shift) & FIELD_MASK
        if e > d:
            d = e
    return d


def pcoeff_var(a: Poly, i: int, k: int, layout: Layout) -> Poly:
    """Coefficient of var_i^k: terms with exponent k, with that exponent removed."""
    shift = FIELD_BITS * i
    unit = layout.unit(i)
    out = {}
    for m, c in a.items():
        if ((m >> shift) & FIELD_MASK) == k:
            out[m - k * unit] = c
    return out


def pvars(a: Poly, layout: Layout) -> set:
    out: set = set()
    nv = layout.nvars
    for m in a:
        for i in range(nv):
            if (m >> (FIELD_BITS * i)) & FIELD_MASK:
                out.add(i)
        if len(out) == nv:
            break
    return out


def pdiv_exact(a: Poly, b: Poly, layout: Layout) -> Optional[Poly]:
    """Exact quotient a/b over the integers, or None when it does not divide.

    Standard leading-term elimination in graded-lex order.  When a = q*b the
    running remainder is q_tail*b at every step, so each leading coefficient
    is divisible exactly when the division succeeds at all.
    """
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    mb = max(b)
    cb = b[mb]
    rem = dict(a)
    quot: Poly = {}
    borrow = layout.borrow_mask
    while rem:
        ma = max(rem)
        ca = rem[ma]
        d = ma - mb
        if d < 0 or (d & borrow):
            return None
        q, r = divmod(ca, cb)
        if r:
            return None
        quot[d] = q
        for m, c in b.items():
            mm = m + d
            v = rem.get(mm, 0) - c * q
            if v:
                rem[mm] = v
            else:
                del rem[mm]
    return quot


def psubst_var(a: Poly, i: int, value: Fraction, layout: Layout) -> Tuple[Poly, int]:
    """Substitute a rational value for one variable.

    Returns (poly, den) with den a positive integer such that the result is
    poly/den.
    """
    shift = FIELD_BITS * i
    unit = layout.unit(i)
    acc: Dict[int, Fraction] = {}
    for m, c in a.items():
        e = (m >> shift) & FIELD_MASK
        mm = m - e * unit
        v = acc.get(mm, Fraction(0)) + c * value ** e
        if v:
            acc[mm] = v
        else:
            acc.pop(mm, None)
    den = 1
    for v in acc.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    out = {m: int(v * den) for m, v in acc.items()}
    return out, den


def peval(a: Poly, values: Sequence[float], layout: Layout) -> float:
    total = 0.0
    nv = layout.nvars
    for m, c in a.items():
        term = float(c)
        mm = m
        for i in range(nv):
            e = mm & FIELD_MASK
            if e:
                term *= values[i] ** e
            mm >>= FIELD_BITS
            if not mm:
                break
        total += term
    return total


def psorted(a: Poly) -> List[Tuple[int, int]]:
    """Terms in descending graded-lex order."""
    return sorted(a.items(), key=lambda t: t[0], reverse=True)
