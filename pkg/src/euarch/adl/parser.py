"""Recursive-descent parser for `.eus` style and `.eua` architecture sources.

Either a complete AST comes back or :class:`ParseFailure` is raised with
located diagnostics; a partial AST never escapes.
"""

from __future__ import annotations

from ..constraints import (
    BoolOp, Call, Compare, Literal, Not, PropAccess, Quantifier, Var,
)
from . import ast
from .ast import Diagnostic, ParseFailure
from .lexer import Token, tokenize

KINDS = ("transformer", "source", "sink", "widget", "converter")
DIRECTIONS = ("in", "out", "publish", "subscribe")
SIMPLE_PTYPES = ("string", "number", "boolean", "format")


class _Parser:
    def __init__(self, text: str, filename: str):
        self.tokens = tokenize(text, filename)
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def fail(self, message: str, expected: tuple = ()):
        raise ParseFailure([Diagnostic(self.cur.span, message, expected=expected)])

    def at_ident(self, *values: str) -> bool:
        return self.cur.kind == "IDENT" and (not values or self.cur.value in values)

    def at_punct(self, value: str) -> bool:
        return self.cur.kind == "PUNCT" and self.cur.value == value

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def expect_ident(self, *values: str) -> Token:
        if not self.at_ident(*values):
            want = " or ".join(f"`{v}`" for v in values) if values else "identifier"
            self.fail(f"expected {want}", expected=values or ("identifier",))
        return self.advance()

    def expect_punct(self, value: str) -> Token:
        if not self.at_punct(value):
            self.fail(f"expected `{value}`", expected=(value,))
        return self.advance()

    def expect_string(self) -> Token:
        if self.cur.kind != "STRING":
            self.fail("expected string literal", expected=("string",))
        return self.advance()

    def literal(self):
        if self.cur.kind in ("NUMBER", "STRING"):
            return self.advance().value
        if self.at_ident("true"):
            self.advance()
            return True
        if self.at_ident("false"):
            self.advance()
            return False
        self.fail("expected literal value", expected=("number", "string", "true", "false"))

    # -- style grammar -------------------------------------------------------

    def style(self) -> ast.StyleDecl:
        span = self.cur.span
        self.expect_ident("style")
        name = self.expect_ident().value
        parents = []
        if self.at_ident("extends"):
            self.advance()
            parents.append(self.expect_ident().value)
            while self.at_punct(","):
                self.advance()
                parents.append(self.expect_ident().value)
        self.expect_punct("{")
        decl = ast.StyleDecl(name=name, parents=parents, span=span)
        while not self.at_punct("}"):
            self.style_item(decl)
        self.expect_punct("}")
        if self.cur.kind != "EOF":
            self.fail("expected end of file")
        return decl

    def style_item(self, decl: ast.StyleDecl):
        if self.at_ident("format"):
            span = self.advance().span
            name = self.expect_ident().value
            self.expect_punct(";")
            decl.formats.append(ast.FormatDecl(name=name, span=span))
        elif self.at_ident("default"):
            span = self.advance().span
            name = self.expect_ident().value
            self.expect_punct("=")
            value = self.literal()
            self.expect_punct(";")
            decl.defaults.append(ast.DefaultPropNode(name=name, value=value, span=span))
        elif self.at_ident("component"):
            decl.component_types.append(self.component_type())
        elif self.at_ident("connector"):
            decl.connector_types.append(self.connector_type())
        elif self.at_ident("port"):
            decl.port_types.append(self.port_type())
        elif self.at_ident("rule"):
            decl.rules.append(self.rule())
        else:
            self.fail("expected a style item (`format`, `component`, `connector`, "
                      "`port`, `rule`, or `default`)",
                      expected=("format", "component", "connector", "port", "rule", "default"))

    def component_type(self) -> ast.ComponentTypeNode:
        span = self.expect_ident("component").span
        self.expect_ident("type")
        override = False
        if self.at_ident("override"):
            self.advance()
            override = True
        name = self.expect_ident().value
        self.expect_punct(":")
        kind = self.expect_ident(*KINDS).value
        self.expect_punct("{")
        node = ast.ComponentTypeNode(name=name, kind=kind, override=override, span=span)
        while not self.at_punct("}"):
            if self.at_ident("port"):
                node.ports.append(self.port_member())
            elif self.at_ident("property"):
                node.properties.append(self.property_member())
            elif self.at_ident("param"):
                node.params.append(self.param_member())
            else:
                self.fail("expected `port`, `property`, or `param`",
                          expected=("port", "property", "param"))
        self.expect_punct("}")
        return node

    def port_member(self) -> ast.PortNode:
        span = self.expect_ident("port").span
        direction = self.expect_ident(*DIRECTIONS).value
        name = self.expect_ident().value
        self.expect_punct(":")
        type_ref = self.expect_ident().value
        channel = None
        if self.at_ident("on"):
            self.advance()
            channel = self.expect_string().value
        optional = False
        if self.at_ident("optional"):
            self.advance()
            optional = True
        self.expect_punct(";")
        return ast.PortNode(direction=direction, name=name, type_ref=type_ref,
                            channel=channel, optional=optional, span=span)

    def ptype(self):
        if self.at_ident("enum"):
            self.advance()
            self.expect_punct("{")
            values = [self.expect_ident().value]
            while self.at_punct(","):
                self.advance()
                values.append(self.expect_ident().value)
            self.expect_punct("}")
            return "enum", tuple(values)
        tok = self.expect_ident(*SIMPLE_PTYPES)
        return tok.value, ()

    def property_member(self) -> ast.PropertyNode:
        span = self.expect_ident("property").span
        name = self.expect_ident().value
        self.expect_punct(":")
        ptype, enum_values = self.ptype()
        default = None
        if self.at_punct("="):
            self.advance()
            default = self.literal()
        self.expect_punct(";")
        return ast.PropertyNode(name=name, ptype=ptype, enum_values=enum_values,
                                default=default, span=span)

    def param_member(self) -> ast.ParamNode:
        span = self.expect_ident("param").span
        name = self.expect_ident().value
        self.expect_punct(":")
        ptype, _ = self.ptype()
        default = None
        if self.at_punct("="):
            self.advance()
            default = self.literal()
        required = False
        if self.at_ident("required"):
            self.advance()
            required = True
        self.expect_punct(";")
        return ast.ParamNode(name=name, ptype=ptype, default=default,
                             required=required, span=span)

    def connector_type(self) -> ast.ConnectorTypeNode:
        span = self.expect_ident("connector").span
        self.expect_ident("type")
        override = False
        if self.at_ident("override"):
            self.advance()
            override = True
        name = self.expect_ident().value
        self.expect_punct("{")
        roles = []
        while not self.at_punct("}"):
            self.expect_ident("role")
            roles.append(self.expect_ident().value)
            self.expect_punct(";")
        self.expect_punct("}")
        return ast.ConnectorTypeNode(name=name, override=override, roles=roles, span=span)

    def port_type(self) -> ast.PortTypeNode:
        span = self.expect_ident("port").span
        self.expect_ident("type")
        override = False
        if self.at_ident("override"):
            self.advance()
            override = True
        name = self.expect_ident().value
        self.expect_punct(":")
        data_format = self.expect_ident().value
        channel = None
        if self.at_ident("on"):
            self.advance()
            channel = self.expect_string().value
        self.expect_punct(";")
        return ast.PortTypeNode(name=name, data_format=data_format,
                                channel=channel, override=override, span=span)

    def rule(self) -> ast.RuleNode:
        span = self.expect_ident("rule").span
        # Named form: `rule <id> [error|warning] ["msg"] : expr ;`
        # Anonymous form: `rule expr ;`
        named = (self.cur.kind == "IDENT"
                 and self.cur.value not in ("forall", "exists", "not", "true", "false")
                 and (self.peek().kind == "STRING"
                      or (self.peek().kind == "PUNCT" and self.peek().value == ":")
                      or (self.peek().kind == "IDENT"
                          and self.peek().value in ("error", "warning"))))
        name, severity, message = None, "error", ""
        if named:
            name = self.advance().value
            if self.at_ident("error", "warning"):
                severity = self.advance().value
            if self.cur.kind == "STRING":
                message = self.advance().value
            self.expect_punct(":")
        expr = self.expr()
        self.expect_punct(";")
        return ast.RuleNode(expr=expr, name=name, severity=severity,
                            message=message, span=span)

    # -- constraint expressions ----------------------------------------------

    def expr(self):
        return self.implication()

    def implication(self):
        left = self.disjunction()
        if self.at_punct("->"):
            span = self.advance().span
            right = self.implication()  # right-associative
            return BoolOp(op="->", left=left, right=right, span=span)
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at_ident("or"):
            span = self.advance().span
            left = BoolOp(op="or", left=left, right=self.conjunction(), span=span)
        return left

    def conjunction(self):
        left = self.negation()
        while self.at_ident("and"):
            span = self.advance().span
            left = BoolOp(op="and", left=left, right=self.negation(), span=span)
        return left

    def negation(self):
        if self.at_ident("not"):
            span = self.advance().span
            return Not(operand=self.negation(), span=span)
        return self.comparison()

    def comparison(self):
        left = self.atom()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.at_punct(op):
                span = self.advance().span
                return Compare(op=op, left=left, right=self.atom(), span=span)
        return left

    def atom(self):
        span = self.cur.span
        if self.at_punct("("):
            self.advance()
            inner = self.expr()
            self.expect_punct(")")
            return inner
        if self.cur.kind in ("NUMBER", "STRING"):
            return Literal(value=self.advance().value, span=span)
        if self.at_ident("true"):
            self.advance()
            return Literal(value=True, span=span)
        if self.at_ident("false"):
            self.advance()
            return Literal(value=False, span=span)
        if self.at_ident("forall", "exists"):
            kind = self.advance().value
            var = self.expect_ident().value
            self.expect_ident("in")
            domain = self.expect_ident("components", "connectors", "ports").value
            self.expect_punct("|")
            body = self.expr()
            return Quantifier(kind=kind, var=var, domain=domain, body=body, span=span)
        if self.cur.kind == "IDENT":
            name = self.advance().value
            if self.at_punct("("):
                self.advance()
                args = []
                if not self.at_punct(")"):
                    args.append(self.atom())
                    while self.at_punct(","):
                        self.advance()
                        args.append(self.atom())
                self.expect_punct(")")
                return Call(name=name, args=tuple(args), span=span)
            if self.at_punct("."):
                self.advance()
                prop = self.expect_ident().value
                return PropAccess(var=name, prop=prop, span=span)
            return Var(name=name, span=span)
        self.fail("expected an expression")

    # -- architecture grammar ------------------------------------------------

    def architecture(self) -> ast.ArchDecl:
        span = self.cur.span
        self.expect_ident("architecture")
        name = self.expect_ident().value
        self.expect_punct(":")
        style = self.expect_ident().value
        self.expect_punct("{")
        decl = ast.ArchDecl(name=name, style=style, span=span)
        while not self.at_punct("}"):
            self.arch_item(decl)
        self.expect_punct("}")
        if self.cur.kind != "EOF":
            self.fail("expected end of file")
        decl.attachments.sort(key=lambda a: a.sort_key())
        for comp in decl.composites:
            comp.attachments.sort(key=lambda a: a.sort_key())
        return decl

    def arch_item(self, decl):
        if self.at_ident("component"):
            decl.components.append(self.component_instance())
        elif self.at_ident("connector"):
            span = self.advance().span
            cid = self.expect_ident().value
            self.expect_punct(":")
            ctype = self.expect_ident().value
            self.expect_punct(";")
            decl.connectors.append(ast.ConnectorNode(id=cid, type=ctype, span=span))
        elif self.at_ident("attach"):
            decl.attachments.append(self.attach())
        elif self.at_ident("restrict"):
            decl.restricts.append(self.restrict())
        elif self.at_ident("composite"):
            decl.composites.append(self.composite())
        else:
            self.fail("expected `component`, `connector`, `attach`, `restrict`, "
                      "or `composite`",
                      expected=("component", "connector", "attach", "restrict", "composite"))

    def component_instance(self) -> ast.ComponentNode:
        span = self.expect_ident("component").span
        cid = self.expect_ident().value
        self.expect_punct(":")
        ctype = self.expect_ident().value
        node = ast.ComponentNode(id=cid, type=ctype, span=span)
        if self.at_punct("{"):
            self.advance()
            while not self.at_punct("}"):
                node.bindings.append(self.binding())
            self.expect_punct("}")
        else:
            self.expect_punct(";")
        return node

    def binding(self) -> ast.BindingNode:
        span = self.cur.span
        is_param = False
        if self.at_ident("param") and self.peek().kind == "IDENT" \
                and self.peek(2).kind == "PUNCT" and self.peek(2).value == "=":
            self.advance()
            is_param = True
        name = self.expect_ident().value
        self.expect_punct("=")
        if self.at_ident("param"):
            self.advance()
            ref = self.expect_ident().value
            value = ast.ParamRefNode(name=ref, span=span)
        else:
            value = self.literal()
        self.expect_punct(";")
        return ast.BindingNode(name=name, value=value, is_param=is_param, span=span)

    def attach(self) -> ast.AttachNode:
        span = self.expect_ident("attach").span
        comp = self.expect_ident().value
        self.expect_punct(".")
        port = self.expect_ident().value
        self.expect_ident("to")
        conn = self.expect_ident().value
        self.expect_punct(".")
        role = self.expect_ident().value
        self.expect_punct(";")
        return ast.AttachNode(component=comp, port=port, connector=conn, role=role, span=span)

    def restrict(self) -> ast.RestrictNode:
        span = self.expect_ident("restrict").span
        self.expect_ident("channel")
        channel = self.expect_string().value
        self.expect_ident("to")
        pairs = [self.pair()]
        while self.at_punct(","):
            self.advance()
            pairs.append(self.pair())
        self.expect_punct(";")
        return ast.RestrictNode(channel=channel, pairs=pairs, span=span)

    def pair(self):
        self.expect_punct("(")
        a = self.expect_ident().value
        self.expect_punct(",")
        b = self.expect_ident().value
        self.expect_punct(")")
        return (a, b)

    def composite(self) -> ast.CompositeNode:
        span = self.expect_ident("composite").span
        name = self.expect_ident().value
        node = ast.CompositeNode(name=name, span=span)
        if self.at_punct("("):
            self.advance()
            if not self.at_punct(")"):
                node.params.append(self.formal_param())
                while self.at_punct(","):
                    self.advance()
                    node.params.append(self.formal_param())
            self.expect_punct(")")
        self.expect_punct("{")
        while not self.at_punct("}"):
            if self.at_ident("expose"):
                espan = self.advance().span
                exposed = self.expect_ident().value
                self.expect_ident("as")
                comp = self.expect_ident().value
                self.expect_punct(".")
                port = self.expect_ident().value
                self.expect_punct(";")
                node.exposes.append(ast.ExposeNode(exposed=exposed, component=comp,
                                                   port=port, span=espan))
            elif self.at_ident("component"):
                node.components.append(self.component_instance())
            elif self.at_ident("connector"):
                span2 = self.advance().span
                cid = self.expect_ident().value
                self.expect_punct(":")
                ctype = self.expect_ident().value
                self.expect_punct(";")
                node.connectors.append(ast.ConnectorNode(id=cid, type=ctype, span=span2))
            elif self.at_ident("attach"):
                node.attachments.append(self.attach())
            elif self.at_ident("composite"):
                node.composites.append(self.composite())
            else:
                self.fail("expected a composite item",
                          expected=("component", "connector", "attach", "composite", "expose"))
        self.expect_punct("}")
        return node

    def formal_param(self) -> ast.ParamNode:
        span = self.cur.span
        name = self.expect_ident().value
        self.expect_punct(":")
        ptype, _ = self.ptype()
        default = None
        if self.at_punct("="):
            self.advance()
            default = self.literal()
        return ast.ParamNode(name=name, ptype=ptype, default=default, span=span)


def parse_style(text: str, filename: str = "<input>") -> ast.StyleDecl:
    return _Parser(text, filename).style()


def parse_architecture(text: str, filename: str = "<input>") -> ast.ArchDecl:
    return _Parser(text, filename).architecture()
