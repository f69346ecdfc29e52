"""Floating-point oracle for the exact engine.

A SamplePoint assigns a double to every base variable and algebraic symbol so
that all defining relations hold to machine precision: free variables are
drawn from bands bounded away from 0 (and from 1 where a logarithm or a root
branch would degenerate), dependent symbols are solved from their minimal
polynomials with a deterministic branch choice (largest real root), and the
Weierstrass triple (W, P, c) is closed by defining c = P^2 - 4W^3.

Everything here is advisory: the exact normal-form route is authoritative,
and the two routes are kept independent (expression trees evaluated directly,
never through the normal form being tested).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import EvalError, SampleError
from .expr import tree
from .expr.context import AUX, PARAM, TSYM, XJET, YJET, Context, std_context
from .expr.ratfunc import rf_eval
from .expr.tree import Add, Const, Div, Expr, Mul, Name, Pow

RELATION_TOL = 1e-12
FD_STEP = 1e-6
FD_TOL = 1e-6
SIMPLE_ROOT_GUARD = 0.1
MAX_ATTEMPTS = 100

# variables whose logarithm, inverse square root, or root branch must stay
# away from 0 and 1
_AWAY_FROM_ONE = ("u1", "v1", "V")
_POSITIVE_ONLY = ("u1", "v1", "V", "b")
_TSYM_FUNCS = {"E": math.exp, "L": math.log, "Ly": math.log}


@dataclass
class SamplePoint:
    assignment: Dict[str, float]
    seed: int
    relation_residuals: Dict[str, float] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        try:
            return self.assignment[name]
        except KeyError:
            raise EvalError(f"no value assigned for {name!r}")


def _draw(rng: random.Random, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng.random()


def _draw_band(rng: random.Random, positive: bool, away_from_one: bool) -> float:
    """[1/2, 2] (optionally minus (0.9, 1.1)), mirrored negative unless
    positive-only."""
    if away_from_one:
        x = _draw(rng, 0.5, 0.9) if rng.random() < 0.5 else _draw(rng, 1.1, 2.0)
    else:
        x = _draw(rng, 0.5, 2.0)
    if not positive and rng.random() < 0.5:
        x = -x
    return x


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _real_roots(coeffs: Sequence[float]) -> List[float]:
    """Real roots of c0 + c1 x + ... + cd x^d for d in {1, 2, 3}."""
    cs = list(coeffs)
    while cs and abs(cs[-1]) < 1e-300:
        cs.pop()
    d = len(cs) - 1
    if d <= 0:
        return []
    if d == 1:
        return [-cs[0] / cs[1]]
    if d == 2:
        c, b, a = cs
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        s = math.sqrt(disc)
        return sorted(((-b - s) / (2 * a), (-b + s) / (2 * a)))
    if d == 3:
        d0, c, b, a = cs
        # depress: x = t - b/(3a); t^3 + pt + q = 0
        p = (3 * a * c - b * b) / (3 * a * a)
        q = (2 * b ** 3 - 9 * a * b * c + 27 * a * a * d0) / (27 * a ** 3)
        shift = -b / (3 * a)
        disc = -(4 * p ** 3 + 27 * q * q)
        scale = max(abs(4 * p ** 3), 27 * q * q, 1e-300)
        if p < 0 and disc > -1e-14 * scale:
            # three real roots (repeated roots on the boundary disc = 0)
            m = 2 * math.sqrt(-p / 3)
            theta = math.acos(max(-1.0, min(1.0, 3 * q / (p * m)))) / 3
            return sorted(shift + m * math.cos(theta - 2 * math.pi * k / 3)
                          for k in range(3))
        # one real root: Cardano
        half_q = q / 2
        rad = math.sqrt(half_q * half_q + (p / 3) ** 3)
        t = _cbrt(-half_q + rad) + _cbrt(-half_q - rad)
        return [shift + t]
    raise SampleError(f"unsupported minimal-polynomial degree {d}")


def _polish(coeffs: Sequence[float], x: float, rounds: int = 4) -> float:
    for _ in range(rounds):
        v = dv = 0.0
        for c in reversed(coeffs):
            dv = dv * x + v
            v = v * x + c
        if dv == 0.0:
            break
        x -= v / dv
    return x


def _poly_at(coeffs: Sequence[float], x: float) -> Tuple[float, float, float]:
    """(value, derivative, magnitude scale) of the polynomial at x."""
    v = dv = 0.0
    scale = 0.0
    for k, c in enumerate(coeffs):
        scale = max(scale, abs(c * x ** k))
    for c in reversed(coeffs):
        dv = dv * x + v
        v = v * x + c
    return v, dv, scale


def _eval_memo(e: Expr, assignment: Mapping[str, float],
               memo: Dict[int, Tuple[Expr, float]]) -> float:
    key = id(e)
    hit = memo.get(key)
    if hit is not None and hit[0] is e:
        return hit[1]
    if isinstance(e, Const):
        v = float(e.value)
    elif isinstance(e, Name):
        try:
            v = assignment[e.name]
        except KeyError:
            raise EvalError(f"no value assigned for {e.name!r}")
    elif isinstance(e, Add):
        v = math.fsum(_eval_memo(a, assignment, memo) for a in e.args)
    elif isinstance(e, Mul):
        v = 1.0
        for a in e.args:
            v *= _eval_memo(a, assignment, memo)
    elif isinstance(e, Pow):
        v = _eval_memo(e.base, assignment, memo) ** e.exp
    elif isinstance(e, Div):
        den = _eval_memo(e.den, assignment, memo)
        if abs(den) < 1e-300:
            raise EvalError("denominator vanished at the sample point")
        v = _eval_memo(e.num, assignment, memo) / den
    else:
        raise EvalError(f"cannot evaluate node {type(e).__name__}")
    if not math.isfinite(v):
        raise EvalError("non-finite intermediate value")
    memo[key] = (e, v)
    return v


def eval(e, p: Union[SamplePoint, Mapping[str, float]],
         ctx: Optional[Context] = None) -> float:
    """Evaluate an expression tree or a normal form at a sample point."""
    assignment = p.assignment if isinstance(p, SamplePoint) else p
    if isinstance(e, Expr):
        return _eval_memo(e, assignment, {})
    # normal form: {packed alg monomial -> RatFunc}
    if ctx is None:
        raise EvalError("evaluating a normal form requires its context")
    vec = [assignment.get(v.name, math.nan) for v in ctx.base_vars]
    total = []
    for mono, rf in e.items():
        val = rf_eval(ctx, rf, vec)
        for i in ctx.alg_layout.mono_vars(mono):
            val *= assignment[ctx.alg_syms[i].name] ** ctx.alg_layout.exp(mono, i)
        total.append(val)
    v = math.fsum(total)
    if not math.isfinite(v):
        raise EvalError("non-finite intermediate value")
    return v


def _solve_sym(coeffs: List[float], pick: str, near: float = 0.0) -> float:
    roots = _real_roots(coeffs)
    if not roots:
        raise SampleError("no real root for an algebraic relation")
    x = max(roots) if pick == "largest" else min(roots, key=lambda r: abs(r - near))
    x = _polish(coeffs, x)
    _v, dv, _ = _poly_at(coeffs, x)
    if abs(dv) < SIMPLE_ROOT_GUARD:
        raise SampleError("root too close to a branch point")
    return x


def _coeffs_at(ctx: Context, sym, assignment: Mapping[str, float]) -> List[float]:
    memo: Dict[int, Tuple[Expr, float]] = {}
    return [_eval_memo(c, assignment, memo) for c in sym.minpoly_coeffs]


def _try_sample(ctx: Context, pinned: Dict[str, float],
                rng: random.Random, seed: int) -> SamplePoint:
    a: Dict[str, float] = {}
    c_pinned = "c" in pinned

    for v in ctx.base_vars:
        if v.kind == PARAM:
            if v.name in pinned:
                a[v.name] = pinned[v.name]
            elif v.name == "c":
                continue  # closed via (W, P) below
            else:
                a[v.name] = _draw_band(rng, v.name in _POSITIVE_ONLY, False)
        elif v.kind in (XJET, YJET) or v.kind == AUX:
            a[v.name] = _draw_band(rng, v.name in _POSITIVE_ONLY,
                                   v.name in _AWAY_FROM_ONE)
    for name, fn in _TSYM_FUNCS.items():
        if ctx.is_base(name):
            arg = ctx.base(name).arg
            a[name] = fn(a[arg])

    if ctx.is_base("W"):
        if c_pinned:
            c_val = pinned["c"]
            if c_val <= 0:
                raise SampleError("pinned c must be positive to place the "
                                  "wave variables on a real branch")
            t = _draw(rng, 0.3, 0.9)
            a["W"] = -t * _cbrt(c_val / 4.0)
            a["P"] = math.sqrt(c_val + 4 * a["W"] ** 3)
            a["c"] = c_val
        else:
            a["W"] = -_draw(rng, 0.5, 2.0)
            a["P"] = _draw_band(rng, False, False)
            a["c"] = a["P"] ** 2 - 4 * a["W"] ** 3
    elif not c_pinned and ctx.is_base("c"):
        a["c"] = _draw(rng, 0.5, 2.0)

    relations: Dict[str, float] = {}
    for s in ctx.alg_syms:
        coeffs = _coeffs_at(ctx, s, a)
        if s.name in a:  # P: already placed on the curve by construction
            val = a[s.name]
        elif s.name == "sc":
            val = math.sqrt(a["c"])
            a[s.name] = val
        else:
            val = _solve_sym(coeffs, "largest")
            a[s.name] = val
        res, _dv, scale = _poly_at(coeffs, val)
        relations[s.name] = res
        if abs(res) > RELATION_TOL * (1.0 + scale):
            raise SampleError(f"relation for {s.name} violated at the sample")
    for name in _TSYM_FUNCS:
        if ctx.is_base(name):
            relations[name] = 0.0
    return SamplePoint(assignment=a, seed=seed, relation_residuals=relations)


def sample_point(ctx: Optional[Context] = None,
                 constraints: Optional[Mapping[str, object]] = None,
                 seed: int = 0) -> SamplePoint:
    """Draw a consistent assignment for every variable and symbol.

    constraints pins parameter values (Fractions, ints, or floats).  A bound
    context contributes its own bindings; conflicting pins are an error.
    """
    ctx = ctx or std_context()
    pinned: Dict[str, float] = {}
    bound = getattr(ctx, "bound", None) or {}
    for src in (bound, constraints or {}):
        for k, v in src.items():
            fv = float(Fraction(v)) if not isinstance(v, float) else v
            if k in pinned and pinned[k] != fv:
                raise SampleError(f"conflicting pinned values for {k}")
            pinned[k] = fv
    rng = random.Random(seed)
    last: Optional[SampleError] = None
    for _ in range(MAX_ATTEMPTS):
        try:
            return _try_sample(ctx, pinned, rng, seed)
        except SampleError as ex:
            last = ex
    raise SampleError(f"no consistent sample after {MAX_ATTEMPTS} attempts: {last}")


@dataclass
class NumericVerdict:
    zero_like: bool
    max_residual: float
    residuals: List[float]
    samples: int
    tolerance: float
    seed: int


def _relative_residual(e, p: SamplePoint, ctx: Optional[Context]) -> float:
    """|value| / (1 + largest top-level term contribution)."""
    if isinstance(e, Expr):
        if isinstance(e, Add):
            memo: Dict[int, Tuple[Expr, float]] = {}
            contribs = [_eval_memo(t, p.assignment, memo) for t in e.args]
        else:
            contribs = [eval(e, p, ctx)]
        value = math.fsum(contribs)
    else:
        if ctx is None:
            raise EvalError("evaluating a normal form requires its context")
        vec = [p.assignment.get(v.name, math.nan) for v in ctx.base_vars]
        contribs = []
        for mono, rf in e.items():
            val = rf_eval(ctx, rf, vec)
            for i in ctx.alg_layout.mono_vars(mono):
                val *= p.assignment[ctx.alg_syms[i].name] ** \
                    ctx.alg_layout.exp(mono, i)
            contribs.append(val)
        value = math.fsum(contribs)
    scale = max((abs(c) for c in contribs), default=0.0)
    return abs(value) / (1.0 + scale)


def numeric_zero(e, samples: int, tol: float = 1e-9, seed: int = 0,
                 ctx: Optional[Context] = None,
                 constraints: Optional[Mapping[str, object]] = None
                 ) -> NumericVerdict:
    """Probabilistic zero test: relative residual at `samples` points."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if ctx is None and isinstance(e, Expr):
        ctx = std_context()
    rng = random.Random(seed)
    residuals: List[float] = []
    for _ in range(samples):
        child = rng.getrandbits(48)
        p = sample_point(ctx, constraints, child)
        residuals.append(_relative_residual(e, p, ctx))
    mx = max(residuals)
    return NumericVerdict(zero_like=(mx < tol), max_residual=mx,
                          residuals=residuals, samples=samples,
                          tolerance=tol, seed=seed)


@dataclass
class FDCheck:
    name: str
    wrt: str
    fd: float
    symbolic: float
    rel_error: float


def fd_checks(ctx: Optional[Context] = None, p: Optional[SamplePoint] = None,
              names: Optional[Sequence[str]] = None,
              step: float = FD_STEP) -> List[FDCheck]:
    """Validate every derivative rule against central finite differences.

    Algebraic symbols are re-solved from their relation at the perturbed
    argument on the same branch (nearest root).  P has no direct functional
    dependence on its argument u at a point; its rule dP/du = 6W^2 is checked
    through the chain dP/dW * dW/du with dP/dW finite-differenced in W.
    sc is constant (argument-free) and has nothing to check.
    """
    ctx = ctx or std_context()
    if p is None:
        p = sample_point(ctx, None, 0)
    out: List[FDCheck] = []
    memo: Dict[int, Tuple[Expr, float]] = {}

    def sym_val(name: str) -> float:
        return p.assignment[name]

    for name, fn in _TSYM_FUNCS.items():
        if not ctx.is_base(name) or (names and name not in names):
            continue
        v = ctx.base(name)
        x0 = p.assignment[v.arg]
        fd = (fn(x0 + step) - fn(x0 - step)) / (2 * step)
        symb = _eval_memo(v.derivative, p.assignment, memo)
        out.append(FDCheck(name, v.arg, fd, symb,
                           abs(fd - symb) / (1 + abs(symb))))

    for s in ctx.alg_syms:
        if names and s.name not in names:
            continue
        if s.arg is None:
            continue
        if s.name == "P":
            wrt = "W"
        else:
            wrt = s.arg
        if wrt not in p.assignment:
            continue
        cur = sym_val(s.name)
        vals = []
        for sgn in (+1, -1):
            shifted = dict(p.assignment)
            shifted[wrt] += sgn * step
            coeffs = [_eval_memo(c, shifted, {}) for c in s.minpoly_coeffs]
            vals.append(_solve_sym(coeffs, "nearest", near=cur))
        fd = (vals[0] - vals[1]) / (2 * step)
        symb = _eval_memo(s.derivative, p.assignment, memo)
        if s.name == "P":
            # fd is dP/dW; the rule is dP/du = dP/dW * dW/du with dW/du = P
            fd = fd * p.assignment["P"]
        out.append(FDCheck(s.name, wrt, fd, symb,
                           abs(fd - symb) / (1 + abs(symb))))
    return out
