"""Packed-exponent polynomial layer against a transparent dict reference."""

import random
from fractions import Fraction

import pytest

from hypersym.errors import SizeLimitError
from hypersym.expr import poly as P

NVARS = 4
LAYOUT = P.Layout(NVARS)


def rand_poly(rng, nterms=6, maxexp=4):
    p = {}
    for _ in range(nterms):
        exps = [rng.randint(0, maxexp) for _ in range(NVARS)]
        c = rng.randint(-9, 9)
        if c == 0:
            continue
        m = LAYOUT.pack(exps)
        p[m] = p.get(m, 0) + c
    return {m: c for m, c in p.items() if c}


def ref_mul(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            ea, eb = LAYOUT.unpack(ma), LAYOUT.unpack(mb)
            m = LAYOUT.pack([x + y for x, y in zip(ea, eb)])
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def ref_eval(p, values):
    total = Fraction(0)
    for m, c in p.items():
        term = Fraction(c)
        for i, e in enumerate(LAYOUT.unpack(m)):
            term *= Fraction(values[i]) ** e
        total += term
    return total


def test_pack_unpack_roundtrip():
    rng = random.Random(1)
    for _ in range(200):
        exps = [rng.randint(0, 30) for _ in range(NVARS)]
        m = LAYOUT.pack(exps)
        assert LAYOUT.unpack(m) == exps
        assert LAYOUT.total(m) == sum(exps)
        for i, e in enumerate(exps):
            assert LAYOUT.exp(m, i) == e


def test_pack_rejects_out_of_range_exponents():
    with pytest.raises(SizeLimitError):
        LAYOUT.pack([1 << 15, 0, 0, 0])
    with pytest.raises(SizeLimitError):
        LAYOUT.pack([20000, 20000, 0, 0])  # total degree overflows
    with pytest.raises(SizeLimitError):
        LAYOUT.var_mono(0, 1 << 15)


def test_mono_mul_and_divides():
    a = LAYOUT.pack([1, 2, 0, 3])
    b = LAYOUT.pack([0, 1, 4, 0])
    assert LAYOUT.mono_mul(a, b) == LAYOUT.pack([1, 3, 4, 3])
    assert LAYOUT.mono_divides(a, LAYOUT.mono_mul(a, b))
    assert not LAYOUT.mono_divides(LAYOUT.pack([2, 0, 0, 0]), a)
    assert list(LAYOUT.mono_vars(a)) == [0, 1, 3]


def test_add_sub_neg_match_reference():
    rng = random.Random(2)
    for _ in range(50):
        a, b = rand_poly(rng), rand_poly(rng)
        s = P.padd(a, b)
        ref = dict(a)
        for m, c in b.items():
            ref[m] = ref.get(m, 0) + c
        ref = {m: c for m, c in ref.items() if c}
        assert s == ref
        assert P.psub(s, b) == a
        assert P.padd(a, P.pneg(a)) == {}
        out = P.pcopy(a)
        P.padd_inplace(out, b, scale=3)
        assert out == P.padd(a, P.pscale(b, 3))


def test_mul_matches_reference_and_ring_laws():
    rng = random.Random(3)
    for _ in range(30):
        a, b, c = rand_poly(rng, 5), rand_poly(rng, 5), rand_poly(rng, 4)
        ab = P.pmul(a, b, LAYOUT)
        assert ab == ref_mul(a, b)
        assert ab == P.pmul(b, a, LAYOUT)
        lhs = P.pmul(a, P.padd(b, c), LAYOUT)
        rhs = P.padd(P.pmul(a, b, LAYOUT), P.pmul(a, c, LAYOUT))
        assert lhs == rhs


def test_pow_matches_repeated_mul():
    rng = random.Random(4)
    for _ in range(10):
        a = rand_poly(rng, 4, maxexp=3)
        acc = P.pconst(1)
        for k in range(4):
            assert P.ppow(a, k, LAYOUT) == acc
            acc = P.pmul(acc, a, LAYOUT)


def test_deriv_product_rule():
    rng = random.Random(5)
    for _ in range(20):
        a, b = rand_poly(rng, 5), rand_poly(rng, 5)
        for i in range(NVARS):
            lhs = P.pderiv(P.pmul(a, b, LAYOUT), i, LAYOUT)
            rhs = P.padd(P.pmul(P.pderiv(a, i, LAYOUT), b, LAYOUT),
                         P.pmul(a, P.pderiv(b, i, LAYOUT), LAYOUT))
            assert lhs == rhs


def test_content_and_monomial_gcd():
    rng = random.Random(6)
    for _ in range(30):
        a = rand_poly(rng)
        if not a:
            continue
        c = P.pcontent(a)
        assert c > 0
        assert all(v % c == 0 for v in a.values())
        g = P.pmono_gcd(a, LAYOUT)
        reduced = P.pdiv_mono(a, g)
        assert {LAYOUT.mono_mul(m, g): v for m, v in reduced.items()} == a
        # after removing the gcd no variable divides every monomial
        gg = P.pmono_gcd(reduced, LAYOUT)
        assert gg == 0


def test_div_exact_inverts_mul():
    rng = random.Random(7)
    hits = 0
    for _ in range(30):
        a, b = rand_poly(rng, 4), rand_poly(rng, 4)
        if not a or not b:
            continue
        hits += 1
        prod = P.pmul(a, b, LAYOUT)
        q = P.pdiv_exact(prod, b, LAYOUT)
        assert q == a
        # prod + 1 is not divisible by x0*b (no constant term in the divisor)
        bx = P.pmul(b, {LAYOUT.var_mono(0): 1}, LAYOUT)
        nondiv = P.padd(P.pmul(a, bx, LAYOUT), P.pconst(1))
        assert P.pdiv_exact(nondiv, bx, LAYOUT) is None
    assert hits > 20


def test_coeff_var_reconstructs():
    rng = random.Random(8)
    for _ in range(20):
        a = rand_poly(rng)
        for i in range(NVARS):
            deg = P.pdeg_var(a, i)
            acc = {}
            for k in range(deg + 1):
                part = P.pcoeff_var(a, i, k, LAYOUT)
                for m, c in P.pmul(part, {LAYOUT.var_mono(i, k): 1} if k
                                   else P.pconst(1), LAYOUT).items():
                    acc[m] = acc.get(m, 0) + c
            assert {m: c for m, c in acc.items() if c} == a


def test_subst_var_matches_fraction_eval():
    rng = random.Random(9)
    for _ in range(20):
        a = rand_poly(rng)
        vals = [Fraction(rng.randint(-3, 3), rng.randint(1, 4))
                for _ in range(NVARS)]
        out, den = P.psubst_var(a, 2, vals[2], LAYOUT)
        assert den > 0
        direct = ref_eval(a, vals)
        vals_rest = list(vals)
        vals_rest[2] = Fraction(1)  # variable 2 no longer occurs
        assert P.pdeg_var(out, 2) == 0
        assert ref_eval(out, vals_rest) / den == direct


def test_eval_and_ordering_helpers():
    rng = random.Random(10)
    a = rand_poly(rng)
    vals = [0.7, -1.3, 2.1, 0.4]
    ref = float(ref_eval(a, [Fraction(v).limit_denominator(10**12)
                             for v in vals]))
    assert abs(P.peval(a, vals, LAYOUT) - ref) < 1e-6 * (1 + abs(ref))
    mono, coeff = P.pleading(a)
    assert mono == max(a)
    assert coeff == a[mono]
    keys = [m for m, _ in P.psorted(a)]
    assert keys == sorted(a, reverse=True)
    assert P.pvars(a, LAYOUT) == {i for m in a for i in LAYOUT.mono_vars(m)}
