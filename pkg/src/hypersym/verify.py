"""Compatibility machinery for fifth-order symmetries of u_xy = F.

The central object is the determining residual: with H = u_5 + G,

    R = D_x D_y (H) - F_{u_1} D_x(H) - F_{v_1} D_y(H) - F_u H,

reduced to a normal form over {u, u_1..u_6, v_1} and the symbol tower.
The pair (F, G) is compatible exactly when R is identically zero.  The
module also exposes the u_5-coefficient condition, the splitting of that
condition into a pair of lower-order identities once dG/du_4 = 5 u_2 g(u_1),
the second-order ODE test behind the known g/F table, and extraction of the
parameter conditions carried by a nonzero residual.

Every exact verdict here comes from the normal-form route; the numeric
cross-check in verify_pair rebuilds the residual independently as an
expression tree (opposite derivative order, separate engine) and samples it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .catalog import Catalog, PairingClaim
from .errors import HypersymError, LemmaPremiseError
from .expr import normal as N
from .expr import poly as _poly_mod  # noqa: F401  (re-exported for tests)
from .expr import tree
from .expr.context import AUX, PARAM, TSYM, XJET, YJET, Context, std_context
from .expr.parser import print_expr
from .expr.poly import (
    Poly,
    padd_inplace,
    pmul,
    pscale,
    psorted,
)
from .expr.ratfunc import RatFunc, rf_from_poly
from .expr.tree import Expr, Name
from .jet import EvolutionEq, HyperbolicEq, JetEngine, NFJet, partial, swap_xy

DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------

def _shared_ctx(F: HyperbolicEq, G: EvolutionEq) -> Context:
    if F.ctx is not G.ctx:
        raise ValueError(
            "F and G must share one context (bind parameters through the "
            "same catalog so the symbol relations agree)")
    return F.ctx


def determining_residual(F: HyperbolicEq, G: EvolutionEq) -> N.NF:
    """Normal form of the compatibility residual for u_t = u_5 + G.

    G must be given in the x-direction; for a y-direction claim, swap the
    hyperbolic side first (see verify_pair).
    """
    if G.direction != "x":
        raise ValueError("determining_residual expects an x-direction G; "
                         "swap the hyperbolic side for y-direction claims")
    ctx = _shared_ctx(F, G)
    nfj = NFJet(F)
    H = N.nf_add(ctx, N.nf_base(ctx, "u5"), N.normalize(ctx, G.G))
    Fn = nfj.F
    Fu1 = N.nf_partial(ctx, Fn, "u1")
    Fv1 = N.nf_partial(ctx, Fn, "v1")
    Fu = N.nf_partial(ctx, Fn, "u")
    dxH = nfj.d_x(H)
    dyH = nfj.d_y(H)
    mixed = nfj.d_y(dxH)
    R = N.nf_sub(ctx, mixed, N.nf_mul(ctx, Fu1, dxH))
    R = N.nf_sub(ctx, R, N.nf_mul(ctx, Fv1, dyH))
    R = N.nf_sub(ctx, R, N.nf_mul(ctx, Fu, H))
    return R


def _tree_residual(F: HyperbolicEq, G: EvolutionEq) -> Expr:
    """The same residual as an expression tree, built independently of the
    normal-form route (fresh engine, mixed derivative in the other order)."""
    ctx = _shared_ctx(F, G)
    eng = JetEngine(F)
    H = tree.add(Name("u5"), G.G)
    dyH = eng.d_y(H)
    dxH = eng.d_x(H)
    mixed = eng.d_x(dyH)
    Fu1 = partial(F.F, "u1", ctx)
    Fv1 = partial(F.F, "v1", ctx)
    Fu = partial(F.F, "u", ctx)
    return tree.sub(
        tree.sub(tree.sub(mixed, tree.mul(Fu1, dxH)), tree.mul(Fv1, dyH)),
        tree.mul(Fu, H))


# ---------------------------------------------------------------------------
# coefficient reporting
# ---------------------------------------------------------------------------

def _clear_denominators(ctx: Context, R: N.NF) -> Tuple[Dict[int, Poly], RatFunc]:
    """Multiply R by the least common denominator of its values.

    Returns (alg-monomial -> integer polynomial, the common denominator as a
    RatFunc with numerator 1).  The cleared form vanishes iff R does, since
    denominators are nonzero by construction.
    """
    scalar = 1
    fmax: Dict[int, Tuple[object, int]] = {}
    for rf in R.values():
        scalar = scalar * rf.den_scalar // math.gcd(scalar, rf.den_scalar)
        for fac, e in rf.den_factors:
            have = fmax.get(fac.fid)
            if have is None or have[1] < e:
                fmax[fac.fid] = (fac, e)
    cleared: Dict[int, Poly] = {}
    for mono, rf in R.items():
        p = pscale(rf.num, scalar // rf.den_scalar)
        have = {fac.fid: e for fac, e in rf.den_factors}
        for fid, (fac, emax) in sorted(fmax.items()):
            for _ in range(emax - have.get(fid, 0)):
                p = pmul(p, fac.poly, ctx.layout, ctx.max_terms)
        cleared[mono] = p
    one = {0: 1}
    den = RatFunc(one, scalar,
                  tuple((fac, e) for _, (fac, e) in sorted(fmax.items())))
    return cleared, den


def _mono_split(ctx: Context, mono: int) -> Tuple[int, int]:
    """Split a packed base monomial into (jet part, coefficient part)."""
    exps = ctx.layout.unpack(mono)
    jet = [0] * len(exps)
    rest = [0] * len(exps)
    for i, e in enumerate(exps):
        if not e:
            continue
        if ctx.base_vars[i].kind in (XJET, YJET):
            jet[i] = e
        else:
            rest[i] = e
    return ctx.layout.pack(jet), ctx.layout.pack(rest)


def _mono_text(ctx: Context, mono: int, layout, names: Sequence[str]) -> str:
    parts = []
    for i in layout.mono_vars(mono):
        e = layout.exp(mono, i)
        parts.append(names[i] if e == 1 else f"{names[i]}^{e}")
    return "*".join(parts) if parts else "1"


def _base_names(ctx: Context) -> List[str]:
    return [v.name for v in ctx.base_vars]


def _alg_names(ctx: Context) -> List[str]:
    return [s.name for s in ctx.alg_syms]


def jet_coefficients(ctx: Context, R: N.NF) -> Tuple[List[Tuple[str, Expr]], Optional[Expr]]:
    """Coefficients of the denominator-cleared residual, grouped by jet
    monomial in descending graded-lex order.

    Returns ([(jet monomial text, coefficient expression)], common denominator
    expression or None).  The coefficient of each jet monomial collects the
    algebraic-symbol and parameter content; all coefficients vanish iff the
    residual is zero.
    """
    if not R:
        return [], None
    cleared, den = _clear_denominators(ctx, R)
    groups: Dict[int, Dict[int, Poly]] = {}
    for alg_mono, p in cleared.items():
        for mono, c in p.items():
            jet, rest = _mono_split(ctx, mono)
            bucket = groups.setdefault(jet, {})
            q = bucket.get(alg_mono)
            if q is None:
                bucket[alg_mono] = {rest: c}
            else:
                padd_inplace(q, {rest: c})
    out: List[Tuple[str, Expr]] = []
    for jet in sorted(groups, reverse=True):
        coeff_nf: N.NF = {}
        for alg_mono, p in groups[jet].items():
            p = {m: c for m, c in p.items() if c}
            if p:
                coeff_nf[alg_mono] = rf_from_poly(ctx, p)
        if not coeff_nf:
            continue
        out.append((_mono_text(ctx, jet, ctx.layout, _base_names(ctx)),
                    N.nf_to_expr(ctx, coeff_nf)))
    den_expr: Optional[Expr] = None
    if den.den_scalar != 1 or den.den_factors:
        den_expr = N.nf_to_expr(ctx, {0: RatFunc(
            {0: den.den_scalar}, 1, ())})
        for fac, e in den.den_factors:
            den_expr = tree.mul(den_expr, tree.pow_(
                N._poly_to_expr(ctx, fac.poly), e))
    return out, den_expr


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    pairing: Optional[PairingClaim]
    hyperbolic_id: str
    evolution_id: str
    direction: str
    bindings: Tuple[Tuple[str, Fraction], ...]
    residual_is_zero: bool
    residual_term_count: int
    failing_coefficients: List[Tuple[str, str]]
    cleared_denominator: Optional[str]
    numeric_max_residual: Optional[float]
    numeric_residuals: List[float]
    samples: int
    tolerance: float
    seed: int
    elapsed: float

    @property
    def key(self) -> str:
        parts = [self.hyperbolic_id, self.evolution_id, self.direction]
        parts += [f"{k}={v}" for k, v in self.bindings]
        return " ".join(parts)

    def structured_lines(self) -> List[str]:
        """Stable line-oriented serialization (elapsed deliberately omitted
        so identical runs are byte-identical)."""
        ls = [
            f"pair = {self.key}",
            f"status = {self.pairing.status if self.pairing else 'ad-hoc'}",
            f"residual_is_zero = {str(self.residual_is_zero).lower()}",
            f"residual_term_count = {self.residual_term_count}",
            f"failing_count = {len(self.failing_coefficients)}",
        ]
        for i, (mono, coeff) in enumerate(self.failing_coefficients):
            ls.append(f"failing[{i}].monomial = {mono}")
            ls.append(f"failing[{i}].coefficient = {coeff}")
        if self.cleared_denominator is not None:
            ls.append(f"cleared_denominator = {self.cleared_denominator}")
        ls.append(f"samples = {self.samples}")
        if self.numeric_max_residual is not None:
            ls.append(f"numeric_max_residual = {self.numeric_max_residual!r}")
        ls.append(f"tolerance = {self.tolerance!r}")
        ls.append(f"seed = {self.seed}")
        return ls


MAX_REPORTED_COEFFS = 64


def verify_pair(F: HyperbolicEq, G: EvolutionEq, samples: int = 0,
                seed: int = 0, tol: float = DEFAULT_TOL,
                direction: str = "x",
                pairing: Optional[PairingClaim] = None) -> VerificationReport:
    """Exact verdict on the pair plus an independent numeric cross-check.

    For direction 'y' the hyperbolic side is swapped (u_k <-> v_k, mirrored
    symbols) and G is read in x-jets, which is the same claim expressed in
    the swapped coordinates.
    """
    t0 = time.perf_counter()
    if direction not in ("x", "y"):
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    hyp_id, ev_id = F.id, G.id
    if direction == "y":
        F = HyperbolicEq(F.id, swap_xy(F.F, F.ctx), params=F.params,
                         ctx=F.ctx)
    ctx = _shared_ctx(F, G)
    R = determining_residual(F, G)
    zero = N.nf_is_zero(R)
    count = N.nf_size(R)
    failing: List[Tuple[str, str]] = []
    den_text: Optional[str] = None
    if not zero:
        coeffs, den = jet_coefficients(ctx, R)
        failing = [(m, print_expr(c, ctx)) for m, c in
                   coeffs[:MAX_REPORTED_COEFFS]]
        if den is not None:
            den_text = print_expr(den, ctx)
    residuals: List[float] = []
    if samples > 0:
        from . import numeval
        rtree = _tree_residual(F, G)
        verdict = numeval.numeric_zero(rtree, samples, tol, seed, ctx=ctx)
        residuals = verdict.residuals
    bindings = tuple(sorted(
        (k, v) for k, v in {**F.params, **G.params}.items() if v is not None))
    return VerificationReport(
        pairing=pairing,
        hyperbolic_id=hyp_id,
        evolution_id=ev_id,
        direction=direction,
        bindings=bindings,
        residual_is_zero=zero,
        residual_term_count=count,
        failing_coefficients=failing,
        cleared_denominator=den_text,
        numeric_max_residual=(max(residuals) if residuals else None),
        numeric_residuals=residuals,
        samples=samples,
        tolerance=tol,
        seed=seed,
        elapsed=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# u_5 condition and its splitting
# ---------------------------------------------------------------------------

def u5_constraint(F: HyperbolicEq, G: EvolutionEq) -> N.NF:
    """Normal form of D_y(dG/du_4) + 5 D_x(dF/du_1), the coefficient
    condition produced at the top jet order."""
    ctx = _shared_ctx(F, G)
    nfj = NFJet(F)
    Gu4 = N.nf_partial(ctx, N.normalize(ctx, G.G), "u4")
    Fu1 = N.nf_partial(ctx, nfj.F, "u1")
    return N.nf_add(ctx, nfj.d_y(Gu4), N.nf_scale(ctx, nfj.d_x(Fu1), 5))


_G_ALLOWED_KINDS = (PARAM,)


def extract_g(G: EvolutionEq) -> Expr:
    """The function g(u_1) with dG/du_4 = 5 u_2 g(u_1).

    Raises LemmaPremiseError when dG/du_4 is not linear in u_2 or depends on
    jet variables other than u_1."""
    ctx = G.ctx
    if G.direction != "x":
        raise ValueError("extract_g expects an x-direction equation")
    Gu4 = N.nf_partial(ctx, N.normalize(ctx, G.G), "u4")
    five_u2 = N.nf_scale(ctx, N.nf_base(ctx, "u2"), 5)
    g = N.nf_mul(ctx, Gu4, N.nf_inverse(ctx, five_u2))
    for nm in sorted(N.nf_free_vars(ctx, g)):
        if nm == "u1":
            continue
        if ctx.is_alg(nm):
            if ctx.alg(nm).arg == "u1":
                continue
            raise LemmaPremiseError(
                f"dG/du_4 carries symbol {nm} not based on u_1")
        kind = ctx.base(nm).kind
        if kind in _G_ALLOWED_KINDS:
            continue
        if kind == TSYM and ctx.base(nm).arg == "u1":
            continue
        raise LemmaPremiseError(
            f"dG/du_4 is not 5*u2*g(u_1): stray variable {nm}")
    return N.nf_to_expr(ctx, g)


@dataclass
class LemmaDecomposition:
    g: Expr
    eq28: N.NF
    eq29: N.NF


def lemma_split(F: HyperbolicEq, g: Expr) -> LemmaDecomposition:
    """Split the top-order condition into its u_2 coefficient and remainder:

        eq28 = F_{u1 u1} + g F_{u1} + g' F
        eq29 = u_1 (F_{u1 u} + g F_u) + F (F_{u1 v1} + g F_{v1})

    and cross-check that 5 (eq28 u_2 + eq29) reproduces the expansion of
    D_y(5 u_2 g) + 5 D_x(F_{u1}) exactly.
    """
    ctx = F.ctx
    gn = N.normalize(ctx, g)
    gp = N.nf_partial(ctx, gn, "u1")
    Fn = N.normalize(ctx, F.F)
    Fu1 = N.nf_partial(ctx, Fn, "u1")
    Fu = N.nf_partial(ctx, Fn, "u")
    Fv1 = N.nf_partial(ctx, Fn, "v1")
    Fu1u1 = N.nf_partial(ctx, Fu1, "u1")
    Fu1u = N.nf_partial(ctx, Fu1, "u")
    Fu1v1 = N.nf_partial(ctx, Fu1, "v1")
    eq28 = N.nf_sum(ctx, [Fu1u1, N.nf_mul(ctx, gn, Fu1),
                          N.nf_mul(ctx, gp, Fn)])
    eq29 = N.nf_add(
        ctx,
        N.nf_mul(ctx, N.nf_base(ctx, "u1"),
                 N.nf_add(ctx, Fu1u, N.nf_mul(ctx, gn, Fu))),
        N.nf_mul(ctx, Fn,
                 N.nf_add(ctx, Fu1v1, N.nf_mul(ctx, gn, Fv1))))
    nfj = NFJet(F)
    lhs = N.nf_add(
        ctx,
        nfj.d_y(N.nf_scale(ctx, N.nf_mul(ctx, N.nf_base(ctx, "u2"), gn), 5)),
        N.nf_scale(ctx, nfj.d_x(Fu1), 5))
    rhs = N.nf_scale(
        ctx,
        N.nf_add(ctx, N.nf_mul(ctx, eq28, N.nf_base(ctx, "u2")), eq29), 5)
    if not N.nf_equal(ctx, lhs, rhs):
        raise HypersymError(
            "internal cross-check failed: top-order expansion does not match "
            "eq28*u2 + eq29")
    return LemmaDecomposition(g=g, eq28=eq28, eq29=eq29)


def ode_check(w: Expr, g: Expr, ctx: Optional[Context] = None) -> N.NF:
    """Normal form of w'' + g w' + g' w with ' = d/du_1."""
    ctx = ctx or std_context()
    wn = N.normalize(ctx, w)
    gn = N.normalize(ctx, g)
    w1 = N.nf_partial(ctx, wn, "u1")
    w2 = N.nf_partial(ctx, w1, "u1")
    gp = N.nf_partial(ctx, gn, "u1")
    return N.nf_sum(ctx, [w2, N.nf_mul(ctx, gn, w1), N.nf_mul(ctx, gp, wn)])


# ---------------------------------------------------------------------------
# parameter conditions
# ---------------------------------------------------------------------------

def param_conditions(F: HyperbolicEq, G: EvolutionEq) -> List[Tuple[str, Expr]]:
    """Coefficient conditions on the symbolic parameters.

    The denominator-cleared residual is regrouped by its non-parameter
    content (jet variables, transcendental and algebraic symbols); each group
    yields one polynomial in the parameters.  All conditions vanish iff the
    residual is zero, so a candidate binding can be tested by substitution
    into the returned polynomials (or by re-running verify_pair bound).
    """
    ctx = _shared_ctx(F, G)
    R = determining_residual(F, G)
    if not R:
        return []
    cleared, _den = _clear_denominators(ctx, R)
    param_idx = {i for i, v in enumerate(ctx.base_vars) if v.kind == PARAM}
    layout = ctx.layout
    groups: Dict[Tuple[int, int], Poly] = {}
    for alg_mono, p in cleared.items():
        for mono, c in p.items():
            exps = layout.unpack(mono)
            par = [e if i in param_idx else 0 for i, e in enumerate(exps)]
            rest = [e if i not in param_idx else 0 for i, e in enumerate(exps)]
            key = (alg_mono, layout.pack(rest))
            bucket = groups.setdefault(key, {})
            pm = layout.pack(par)
            bucket[pm] = bucket.get(pm, 0) + c
    out: List[Tuple[str, Expr]] = []
    for alg_mono, rest in sorted(groups, key=lambda k: (k[1], k[0]),
                                 reverse=True):
        poly = {m: c for m, c in groups[(alg_mono, rest)].items() if c}
        if not poly:
            continue
        rest_text = _mono_text(ctx, rest, layout, _base_names(ctx))
        alg_text = _mono_text(ctx, alg_mono, ctx.alg_layout, _alg_names(ctx))
        if alg_text == "1":
            mono_text = rest_text
        elif rest_text == "1":
            mono_text = alg_text
        else:
            mono_text = f"{rest_text}*{alg_text}"
        out.append((mono_text, N._poly_to_expr(ctx, poly)))
    return out


def conditions_hold(conditions: Sequence[Tuple[str, Expr]],
                    bindings: Dict[str, object],
                    ctx: Optional[Context] = None) -> bool:
    """Substitute a candidate parameter binding into every condition."""
    ctx = ctx or std_context()
    subs = {k: tree.Const(Fraction(v)) for k, v in bindings.items()}
    for _mono, cond in conditions:
        val = N.normalize(ctx, tree.substitute(cond, subs))
        if not N.nf_is_zero(val):
            return False
    return True


# ---------------------------------------------------------------------------
# batch verification
# ---------------------------------------------------------------------------

def verify_claim(catalog: Catalog, claim: PairingClaim, samples: int = 0,
                 seed: int = 0, tol: float = DEFAULT_TOL) -> VerificationReport:
    bindings = dict(claim.bindings)
    F = catalog.get(claim.hyperbolic_id, bindings)
    G = catalog.get(claim.evolution_id, bindings)
    return verify_pair(F, G, samples=samples, seed=seed, tol=tol,
                       direction=claim.direction, pairing=claim)


_WORKER_CATALOG: Optional[Catalog] = None
_WORKER_PATHS: Tuple[str, ...] = ()


def _worker_init(extra_paths: Tuple[str, ...]) -> None:
    global _WORKER_CATALOG, _WORKER_PATHS
    _WORKER_PATHS = extra_paths
    _WORKER_CATALOG = Catalog(extra_paths)


def _worker_run(args) -> VerificationReport:
    claim, samples, seed, tol = args
    global _WORKER_CATALOG
    if _WORKER_CATALOG is None:  # direct call without initializer
        _WORKER_CATALOG = Catalog(_WORKER_PATHS)
    return verify_claim(_WORKER_CATALOG, claim, samples, seed, tol)


def verify_all(catalog: Catalog, samples: int = 0, seed: int = 0,
               tol: float = DEFAULT_TOL, jobs: int = 0,
               extra_paths: Sequence[str] = ()) -> List[VerificationReport]:
    """Verify every shipped pairing claim, deterministically ordered by
    pairing id.  jobs > 1 fans the independent checks out over processes;
    the output order does not depend on completion order."""
    claims = sorted(catalog.pairings(), key=lambda c: c.key)
    work = [(c, samples, seed, tol) for c in claims]
    if jobs <= 0:
        import os
        jobs = min(len(claims), os.cpu_count() or 1, 8)
    if jobs <= 1 or len(claims) <= 1:
        _worker_init(tuple(extra_paths))
        return [_worker_run(w) for w in work]
    import multiprocessing as mp
    with mp.Pool(processes=min(jobs, len(claims)),
                 initializer=_worker_init,
                 initargs=(tuple(extra_paths),)) as pool:
        return pool.map(_worker_run, work)
