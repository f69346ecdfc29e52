"""Variable and symbol registry.

A Context owns the ordered list of base variables (jet variables,
transcendental symbols, auxiliary names, parameters), the algebraic symbols
with their minimal polynomials and derivative rules, and the packing layouts
used by the polynomial layer.  Contexts are read-only after construction;
the lazy caches hanging off one behave as pure functions of it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..errors import UnknownNameError
from . import tree
from .poly import Layout
from .tree import Const, Expr, Name

XJET = "xjet"
YJET = "yjet"
PARAM = "param"
AUX = "aux"
TSYM = "tsym"  # transcendental symbol: lives in coefficients, has a chain rule


class BaseVar:
    __slots__ = ("name", "index", "kind", "order", "arg", "derivative", "call")

    def __init__(self, name: str, index: int, kind: str, order: int = -1,
                 arg: Optional[str] = None, derivative: Optional[Expr] = None,
                 call: Optional[Tuple[str, Expr]] = None):
        self.name = name
        self.index = index
        self.kind = kind
        self.order = order
        self.arg = arg
        self.derivative = derivative
        self.call = call

    def __repr__(self):
        return f"BaseVar({self.name})"


class SymbolDef:
    """Algebraic symbol: finite degree over the base-variable field."""

    __slots__ = ("name", "alg_index", "arg", "derivative", "minpoly_coeffs",
                 "degree", "call", "mirror")

    def __init__(self, name: str, alg_index: int, arg: Optional[str],
                 derivative: Optional[Expr], minpoly_coeffs: Tuple[Expr, ...],
                 call: Optional[Tuple[str, Expr]], mirror: Optional[str]):
        self.name = name
        self.alg_index = alg_index
        self.arg = arg
        self.derivative = derivative
        self.minpoly_coeffs = minpoly_coeffs
        self.degree = len(minpoly_coeffs) - 1
        self.call = call
        self.mirror = mirror

    @property
    def minpoly_expr(self) -> Expr:
        s = Name(self.name)
        out = tree.ZERO
        for k, c in enumerate(self.minpoly_coeffs):
            out = out + c * s ** k
        return out

    def __repr__(self):
        return f"SymbolDef({self.name})"


class Context:
    def __init__(self, max_x_jet: int = 10, max_y_jet: int = 6,
                 max_terms: int = 2_000_000):
        self.max_x_jet = max_x_jet
        self.max_y_jet = max_y_jet
        self.max_terms = max_terms
        self.base_vars: List[BaseVar] = []
        self.alg_syms: List[SymbolDef] = []
        self._by_name: Dict[str, BaseVar] = {}
        self._alg_by_name: Dict[str, SymbolDef] = {}
        self._aliases: Dict[str, str] = {}
        self.layout: Optional[Layout] = None
        self.alg_layout: Optional[Layout] = None
        self.bound: Dict[str, Fraction] = {}
        # lazy caches, filled by the normal-form layer
        self._deriv_nf: Dict[str, object] = {}
        self._reduction: Dict[Tuple[int, int], object] = {}
        self._minpoly_nf: Dict[str, object] = {}
        self._factor_intern: Dict[tuple, object] = {}
        self.den_atoms: List[object] = []
        self._bind_cache: Dict[tuple, "Context"] = {}
        self._misc: Dict[object, object] = {}

    # -- construction ------------------------------------------------------

    def add_base(self, name: str, kind: str, order: int = -1,
                 arg: Optional[str] = None, derivative: Optional[Expr] = None,
                 call: Optional[Tuple[str, Expr]] = None) -> BaseVar:
        if name in self._by_name or name in self._alg_by_name:
            raise ValueError(f"duplicate name {name}")
        v = BaseVar(name, len(self.base_vars), kind, order, arg, derivative, call)
        self.base_vars.append(v)
        self._by_name[name] = v
        return v

    def add_alg(self, name: str, arg: Optional[str], derivative: Optional[Expr],
                minpoly_coeffs: Tuple[Expr, ...],
                call: Optional[Tuple[str, Expr]] = None,
                mirror: Optional[str] = None) -> SymbolDef:
        if name in self._by_name or name in self._alg_by_name:
            raise ValueError(f"duplicate name {name}")
        s = SymbolDef(name, len(self.alg_syms), arg, derivative,
                      tuple(minpoly_coeffs), call, mirror)
        self.alg_syms.append(s)
        self._alg_by_name[name] = s
        return s

    def add_alias(self, alias: str, target: str) -> None:
        self._aliases[alias] = target

    def freeze(self) -> None:
        self.layout = Layout(len(self.base_vars))
        self.alg_layout = Layout(len(self.alg_syms))

    # -- lookup ------------------------------------------------------------

    def resolve(self, name: str) -> str:
        return self._aliases.get(name, name)

    def base(self, name: str) -> BaseVar:
        v = self._by_name.get(self.resolve(name))
        if v is None:
            raise UnknownNameError(f"unknown base variable {name!r}")
        return v

    def alg(self, name: str) -> SymbolDef:
        s = self._alg_by_name.get(name)
        if s is None:
            raise UnknownNameError(f"unknown algebraic symbol {name!r}")
        return s

    def is_base(self, name: str) -> bool:
        return self.resolve(name) in self._by_name

    def is_alg(self, name: str) -> bool:
        return name in self._alg_by_name

    def kind_of(self, name: str) -> str:
        if self.is_alg(name):
            return "alg"
        return self.base(name).kind

    def xjet(self, k: int) -> str:
        if k == 0:
            return "u"
        if k > self.max_x_jet:
            from ..errors import JetOrderError
            raise JetOrderError(f"x-jet order {k} exceeds max_x_jet={self.max_x_jet}")
        return f"u{k}"

    def yjet(self, k: int) -> str:
        if k < 1 or k > self.max_y_jet:
            from ..errors import JetOrderError
            raise JetOrderError(f"y-jet order {k} exceeds max_y_jet={self.max_y_jet}")
        return f"v{k}"

    def params(self) -> List[BaseVar]:
        return [v for v in self.base_vars if v.kind == PARAM]

    def symbols_with_arg(self, var_name: str):
        """All symbols (transcendental and algebraic) whose argument is var_name."""
        out = []
        for v in self.base_vars:
            if v.kind == TSYM and v.arg == var_name:
                out.append(v)
        for s in self.alg_syms:
            if s.arg == var_name:
                out.append(s)
        return out

    def mirror_of(self, name: str) -> Optional[str]:
        """swap_xy image of a name, or None when no mirror is registered."""
        name = self.resolve(name)
        if name in self._alg_by_name:
            return self._alg_by_name[name].mirror
        v = self._by_name.get(name)
        if v is None:
            return None
        if v.kind == XJET:
            k = v.order
            if k == 0:
                return "u"
            return f"v{k}" if k <= self.max_y_jet else None
        if v.kind == YJET:
            k = v.order
            return f"u{k}" if k <= self.max_x_jet else None
        if v.name == "L":
            return "Ly"
        if v.name == "Ly":
            return "L"
        return v.name  # E, V, W, aux, params are fixed under x <-> y

    # -- call forms for the parser / printer --------------------------------

    def call_table(self) -> Dict[Tuple[str, Expr], str]:
        tbl: Dict[Tuple[str, Expr], str] = {}
        for v in self.base_vars:
            if v.call is not None:
                tbl[v.call] = v.name
        for s in self.alg_syms:
            if s.call is not None:
                tbl[s.call] = s.name
        return tbl

    def call_form(self, name: str) -> Optional[Tuple[str, Expr]]:
        if self.is_alg(name):
            return self._alg_by_name[name].call
        v = self._by_name.get(name)
        return v.call if v is not None else None

    # -- parameter binding ---------------------------------------------------

    def bind(self, bindings: Dict[str, Fraction]) -> "Context":
        """A derived context with parameters fixed to exact rationals.

        Symbol derivative rules and minimal polynomials have the binding
        substituted, so reduction happens against the specialized relations.
        The variable layout is unchanged (bound parameters simply no longer
        occur).
        """
        items = tuple(sorted((k, Fraction(v)) for k, v in bindings.items()))
        if not items:
            return self
        cached = self._bind_cache.get(items)
        if cached is not None:
            return cached
        for k, _ in items:
            v = self._by_name.get(k)
            if v is None or v.kind != PARAM:
                raise UnknownNameError(f"{k!r} is not a bindable parameter")
        subs = {k: Const(v) for k, v in items}
        ctx = Context(self.max_x_jet, self.max_y_jet, self.max_terms)
        for v in self.base_vars:
            ctx.add_base(v.name, v.kind, v.order, v.arg,
                         tree.substitute(v.derivative, subs) if v.derivative is not None else None,
                         v.call)
        for s in self.alg_syms:
            ctx.add_alg(s.name, s.arg,
                        tree.substitute(s.derivative, subs) if s.derivative is not None else None,
                        tuple(tree.substitute(c, subs) for c in s.minpoly_coeffs),
                        s.call, s.mirror)
        ctx._aliases = dict(self._aliases)
        ctx.freeze()
        ctx.bound = dict(self.bound)
        ctx.bound.update({k: v for k, v in items})
        self._bind_cache[items] = ctx
        return ctx


_STD: Optional[Context] = None


def std_context() -> Context:
    """Process-wide shared default context."""
    global _STD
    if _STD is None:
        _STD = default_context()
    return _STD


def default_context(max_x_jet: int = 10, max_y_jet: int = 6,
                    max_terms: int = 2_000_000) -> Context:
    """The standard registry used by the catalog and the verifier."""
    ctx = Context(max_x_jet, max_y_jet, max_terms)
    u = Name("u")
    u1 = Name("u1")
    v1 = Name("v1")

    ctx.add_base("u", XJET, 0)
    for k in range(1, max_x_jet + 1):
        ctx.add_base(f"u{k}", XJET, k)
    for k in range(1, max_y_jet + 1):
        ctx.add_base(f"v{k}", YJET, k)
    ctx.add_alias("uy", "v1")
    ctx.add_alias("uyy", "v2")
    ctx.add_alias("uyyy", "v3")
    ctx.add_alias("u0", "u")

    ctx.add_base("E", TSYM, arg="u", derivative=Name("E"), call=("exp", u))
    ctx.add_base("V", AUX)
    ctx.add_base("W", TSYM, arg="u", derivative=Name("P"), call=("w", u))
    ctx.add_base("L", TSYM, arg="u1", derivative=1 / u1, call=("ln", u1))
    ctx.add_base("Ly", TSYM, arg="v1", derivative=1 / v1, call=("ln", v1))
    ctx.add_base("phi", AUX)
    ctx.add_base("s", AUX)
    for p in ("C2", "a", "b", "c", "lam1", "lam2", "mu", "mu1", "mu2"):
        ctx.add_base(p, PARAM)

    one = Const(1)

    def cubic(t: Expr, kappa: Expr) -> Tuple[Expr, ...]:
        # 2*s^3 + 3*t*s^2 - t^3 + kappa, the expanded (s+t)^2 (2s-t) + kappa
        return (kappa - t ** 3, tree.ZERO, 3 * t, Const(2))

    a3 = Name("a") ** 3
    vb = v1 + Name("b")

    ctx.add_alg("r", "u1", 1 / (2 * Name("r")), (-u1, tree.ZERO, one),
                call=("sqrt", u1), mirror="ry")
    ctx.add_alg("ry", "v1", 1 / (2 * Name("ry")), (-v1, tree.ZERO, one),
                call=("sqrt", v1), mirror="r")
    ctx.add_alg("f", "u1", (u1 - Name("f")) / (2 * Name("f")),
                cubic(u1, one), call=("f", u1), mirror="fy")
    ctx.add_alg("fy", "v1", (v1 - Name("fy")) / (2 * Name("fy")),
                cubic(v1, one), call=("f", v1), mirror="f")
    ctx.add_alg("fa", "v1", (v1 - Name("fa")) / (2 * Name("fa")),
                cubic(v1, a3), call=("fa", v1), mirror="fax")
    ctx.add_alg("fax", "u1", (u1 - Name("fax")) / (2 * Name("fax")),
                cubic(u1, a3), call=("fa", u1), mirror="fa")
    ctx.add_alg("fb", "v1", (vb - Name("fb")) / (2 * Name("fb")),
                cubic(vb, a3), call=("fa", vb), mirror=None)
    ctx.add_alg("rb", "v1", 1 / (2 * Name("rb")), (-vb, tree.ZERO, one),
                call=("sqrt", vb), mirror=None)
    ctx.add_alg("P", "u", 6 * Name("W") ** 2,
                (-4 * Name("W") ** 3 - Name("c"), tree.ZERO, one),
                call=("wp", u), mirror="P")
    ctx.add_alg("sc", None, None, (-Name("c"), tree.ZERO, one),
                call=None, mirror="sc")

    ctx.freeze()
    return ctx
