"""Constraint expression AST, type checking, and evaluation.

Expressions are pure and side-effect free. Quantifiers range over the finite
element sets of one architecture (`components`, `connectors`, `ports`).
Evaluation is total: anything that could fail at runtime is rejected by
`check_expr` beforehand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .errors import ConstraintTypeError

if TYPE_CHECKING:
    from .model import Architecture, ResolvedStyle

DOMAINS = ("components", "connectors", "ports")

# Built-in predicate name -> arity
PREDICATES = {
    "acyclic": 0,
    "attached": 1,
    "connected": 2,
    "reachable": 2,
    "precedes": 2,
    "has": 2,
}

COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass
class Span:
    file: str = "<input>"
    line: int = 1
    col: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass
class Expr:
    span: Optional[Span] = field(default=None, compare=False, kw_only=True)


@dataclass
class Literal(Expr):
    value: object = None  # str | float | bool


@dataclass
class Var(Expr):
    name: str = ""


@dataclass
class PropAccess(Expr):
    var: str = ""
    prop: str = ""


@dataclass
class Compare(Expr):
    op: str = "=="
    left: Expr = None
    right: Expr = None


@dataclass
class Not(Expr):
    operand: Expr = None


@dataclass
class BoolOp(Expr):
    op: str = "and"  # "and" | "or" | "->"
    left: Expr = None
    right: Expr = None


@dataclass
class Quantifier(Expr):
    kind: str = "forall"  # "forall" | "exists"
    var: str = ""
    domain: str = "components"
    body: Expr = None


@dataclass
class Call(Expr):
    name: str = ""
    args: tuple = ()  # Expr tuple; `precedes` args are bare Var nodes naming types


@dataclass
class EvalResult:
    holds: bool
    witnesses: list[str] = field(default_factory=list)


def check_expr(expr: Expr, style: "ResolvedStyle", scope: frozenset = frozenset()) -> None:
    """Reject ill-formed expressions before evaluation. Raises ConstraintTypeError."""
    if isinstance(expr, Literal):
        return
    if isinstance(expr, Var):
        if expr.name not in scope:
            raise ConstraintTypeError(f"unbound variable '{expr.name}'")
        return
    if isinstance(expr, PropAccess):
        if expr.var not in scope:
            raise ConstraintTypeError(f"unbound variable '{expr.var}' in property access")
        return
    if isinstance(expr, Compare):
        if expr.op not in COMPARE_OPS:
            raise ConstraintTypeError(f"unknown comparison operator '{expr.op}'")
        check_expr(expr.left, style, scope)
        check_expr(expr.right, style, scope)
        return
    if isinstance(expr, Not):
        check_expr(expr.operand, style, scope)
        return
    if isinstance(expr, BoolOp):
        check_expr(expr.left, style, scope)
        check_expr(expr.right, style, scope)
        return
    if isinstance(expr, Quantifier):
        if expr.domain not in DOMAINS:
            raise ConstraintTypeError(f"unknown quantifier domain '{expr.domain}'")
        if expr.var in scope:
            raise ConstraintTypeError(f"variable '{expr.var}' shadows an outer binding")
        check_expr(expr.body, style, scope | {expr.var})
        return
    if isinstance(expr, Call):
        arity = PREDICATES.get(expr.name)
        if arity is None:
            raise ConstraintTypeError(f"unknown predicate '{expr.name}'")
        if len(expr.args) != arity:
            raise ConstraintTypeError(
                f"'{expr.name}' expects {arity} argument(s), got {len(expr.args)}")
        if expr.name == "precedes":
            for a in expr.args:
                if not isinstance(a, Var):
                    raise ConstraintTypeError("precedes() arguments must be component type names")
                if a.name not in style.component_types:
                    raise ConstraintTypeError(
                        f"precedes() references undeclared component type '{a.name}'")
        elif expr.name == "has":
            if not isinstance(expr.args[0], Var):
                raise ConstraintTypeError("has() first argument must be a bound variable")
            check_expr(expr.args[0], style, scope)
            if not (isinstance(expr.args[1], Literal) and isinstance(expr.args[1].value, str)):
                raise ConstraintTypeError("has() second argument must be a string literal")
        else:
            for a in expr.args:
                check_expr(a, style, scope)
        return
    raise ConstraintTypeError(f"unknown expression node {type(expr).__name__}")


class _Env:
    """Evaluation context: one architecture plus lazily computed graph facts."""

    def __init__(self, arch: "Architecture", style: "ResolvedStyle"):
        self.arch = arch
        self.style = style
        self._edges = None
        self._closure = None

    # Edges of the directed dataflow graph (out-port -> in-port via connector).
    def edges(self):
        if self._edges is None:
            from .conformance import dataflow_edges
            self._edges = dataflow_edges(self.arch, self.style)
        return self._edges

    def closure(self):
        if self._closure is None:
            reach = {c: set() for c in self.arch.components}
            adj = {c: set() for c in self.arch.components}
            for u, v in self.edges():
                adj[u].add(v)
            for start in self.arch.components:
                stack, seen = [start], set()
                while stack:
                    n = stack.pop()
                    for m in adj.get(n, ()):
                        if m not in seen:
                            seen.add(m)
                            stack.append(m)
                reach[start] = seen
            self._closure = reach
        return self._closure

    def domain(self, name):
        arch = self.arch
        if name == "components":
            return [("component", c) for c in sorted(arch.components)]
        if name == "connectors":
            return [("connector", c) for c in sorted(arch.connectors)]
        ports = []
        for cid in sorted(arch.components):
            inst = arch.components[cid]
            decl = self.style.component_types.get(inst.type)
            if decl is None:
                continue
            for p in decl.ports:
                ports.append(("port", (cid, p.name)))
        return ports


def _witness_id(value):
    kind, v = value
    if kind == "port":
        return f"{v[0]}.{v[1]}"
    return v


def find_cycle(nodes, edges):
    """Return the node list of one directed cycle, or None. Iterative DFS."""
    adj = {n: [] for n in nodes}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
    color = {n: 0 for n in adj}  # 0 white, 1 on stack, 2 done
    parent = {}
    for root in sorted(adj):
        if color[root]:
            continue
        stack = [(root, iter(sorted(adj[root])))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt, 2) == 1:
                    # found a back edge: recover the cycle from the parent chain
                    cycle = [node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
                if color.get(nxt, 2) == 0:
                    parent[nxt] = node
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(adj[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return None


def _eval_precedes(env: _Env, before_type: str, after_type: str) -> EvalResult:
    """Safety check: on every source-to-X path, a `before_type` component occurs
    before each `after_type` component X. Witnesses are the violating X."""
    arch = env.arch
    edges = env.edges()
    guards = {c for c, inst in arch.components.items() if inst.type == before_type}
    targets = sorted(c for c, inst in arch.components.items() if inst.type == after_type)
    indeg = {c: 0 for c in arch.components}
    for _, v in edges:
        indeg[v] += 1
    adj = {c: set() for c in arch.components}
    for u, v in edges:
        adj[u].add(v)
    # Reachability from any source while avoiding guard components.
    reachable_unguarded = set()
    stack = [c for c in arch.components if indeg[c] == 0 and c not in guards]
    reachable_unguarded.update(stack)
    while stack:
        n = stack.pop()
        for m in adj[n]:
            if m not in guards and m not in reachable_unguarded:
                reachable_unguarded.add(m)
                stack.append(m)
    bad = [t for t in targets if t in reachable_unguarded]
    return EvalResult(not bad, bad)


def eval_expr(expr: Expr, env: _Env, bindings: dict) -> EvalResult:
    if isinstance(expr, Literal):
        return EvalResult(bool(expr.value))
    if isinstance(expr, Var):
        return EvalResult(bool(bindings[expr.name]))
    if isinstance(expr, Compare):
        lv = _value(expr.left, env, bindings)
        rv = _value(expr.right, env, bindings)
        if lv is None or rv is None:
            return EvalResult(False)
        try:
            if expr.op == "==":
                ok = lv == rv
            elif expr.op == "!=":
                ok = lv != rv
            elif expr.op == "<":
                ok = lv < rv
            elif expr.op == "<=":
                ok = lv <= rv
            elif expr.op == ">":
                ok = lv > rv
            else:
                ok = lv >= rv
        except TypeError:
            ok = False
        return EvalResult(ok)
    if isinstance(expr, Not):
        inner = eval_expr(expr.operand, env, bindings)
        return EvalResult(not inner.holds)
    if isinstance(expr, BoolOp):
        left = eval_expr(expr.left, env, bindings)
        if expr.op == "and":
            if not left.holds:
                right = eval_expr(expr.right, env, bindings)
                wit = left.witnesses + ([] if right.holds else right.witnesses)
                return EvalResult(False, wit)
            return eval_expr(expr.right, env, bindings)
        if expr.op == "or":
            if left.holds:
                return EvalResult(True)
            right = eval_expr(expr.right, env, bindings)
            if right.holds:
                return EvalResult(True)
            return EvalResult(False, left.witnesses + right.witnesses)
        # implication
        if not left.holds:
            return EvalResult(True)
        return eval_expr(expr.right, env, bindings)
    if isinstance(expr, Quantifier):
        domain = env.domain(expr.domain)
        if expr.kind == "forall":
            bad = []
            for value in domain:
                sub = dict(bindings)
                sub[expr.var] = value
                r = eval_expr(expr.body, env, sub)
                if not r.holds:
                    bad.append(_witness_id(value))
            return EvalResult(not bad, bad)
        for value in domain:
            sub = dict(bindings)
            sub[expr.var] = value
            if eval_expr(expr.body, env, sub).holds:
                return EvalResult(True)
        return EvalResult(False, [])
    if isinstance(expr, Call):
        return _eval_call(expr, env, bindings)
    raise AssertionError(f"unreachable node {type(expr).__name__}")


def _eval_call(expr: Call, env: _Env, bindings: dict) -> EvalResult:
    arch = env.arch
    if expr.name == "acyclic":
        cycle = find_cycle(arch.components, env.edges())
        if cycle is None:
            return EvalResult(True)
        return EvalResult(False, sorted(cycle))
    if expr.name == "attached":
        kind, val = bindings[expr.args[0].name]
        cid, port = val
        ok = any(a.component == cid and a.port == port for a in arch.attachments)
        return EvalResult(ok, [] if ok else [f"{cid}.{port}"])
    if expr.name == "connected":
        k1, (c1, p1) = bindings[expr.args[0].name]
        k2, (c2, p2) = bindings[expr.args[1].name]
        conns1 = {a.connector for a in arch.attachments if a.component == c1 and a.port == p1}
        conns2 = {a.connector for a in arch.attachments if a.component == c2 and a.port == p2}
        return EvalResult(bool(conns1 & conns2))
    if expr.name == "reachable":
        _, a = bindings[expr.args[0].name]
        _, b = bindings[expr.args[1].name]
        # reflexive-transitive: a component always reaches itself
        return EvalResult(a == b or b in env.closure()[a])
    if expr.name == "precedes":
        return _eval_precedes(env, expr.args[0].name, expr.args[1].name)
    if expr.name == "has":
        _, cid = bindings[expr.args[0].name]
        prop = expr.args[1].value
        return EvalResult(_lookup_prop(env, cid, prop) is not None)
    raise AssertionError(f"unreachable predicate {expr.name}")


def _lookup_prop(env: _Env, cid: str, prop: str):
    inst = env.arch.components[cid]
    if prop in inst.props:
        return inst.props[prop]
    decl = env.style.component_types.get(inst.type)
    if decl is not None:
        spec = decl.properties.get(prop)
        if spec is not None and spec.default is not None:
            return spec.default
    return env.style.default_properties.get(prop)


def _value(expr: Expr, env: _Env, bindings: dict):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, PropAccess):
        kind, v = bindings[expr.var]
        if kind != "component":
            return None
        return _lookup_prop(env, v, expr.prop)
    if isinstance(expr, Var):
        return bindings.get(expr.name)
    raise AssertionError("comparison operands are literals or property accesses")


def evaluate(arch: "Architecture", style: "ResolvedStyle", expr: Expr) -> EvalResult:
    """Type-check then evaluate one constraint against an architecture."""
    check_expr(expr, style)
    return eval_expr(expr, _Env(arch, style), {})


# -- deterministic printing (shared by the ADL printer and constraint ids) ----

_PREC = {"->": 1, "or": 2, "and": 3}


def format_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, Literal):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        if isinstance(expr.value, str):
            escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        v = expr.value
        if isinstance(v, float) and v.is_integer():
            return str(int(v))
        return str(v)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, PropAccess):
        return f"{expr.var}.{expr.prop}"
    if isinstance(expr, Compare):
        return f"{format_expr(expr.left)} {expr.op} {format_expr(expr.right)}"
    if isinstance(expr, Not):
        return f"not {format_expr(expr.operand, 4)}"
    if isinstance(expr, BoolOp):
        prec = _PREC[expr.op]
        # -> is right-associative; and/or left-associative, printed flat
        left = format_expr(expr.left, prec + (1 if expr.op == "->" else 0))
        right = format_expr(expr.right, prec if expr.op == "->" else prec + 1)
        text = f"{left} {expr.op} {right}"
        if prec < parent_prec:
            return f"({text})"
        return text
    if isinstance(expr, Quantifier):
        body = format_expr(expr.body)
        text = f"{expr.kind} {expr.var} in {expr.domain} | {body}"
        if parent_prec > 0:
            return f"({text})"
        return text
    if isinstance(expr, Call):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    raise AssertionError(f"unknown node {type(expr).__name__}")
