"""Lexer/parser/printer: diagnostics, structural equality, round trips."""

import random
import string

import pytest

from euarch import fixtures
from euarch.adl import (
    ParseFailure, ast, parse_architecture, parse_style, print_decl,
)
from euarch.adl.printer import print_architecture, print_style


# -- diagnostics --------------------------------------------------------------

def test_empty_style_source_fails_at_origin():
    with pytest.raises(ParseFailure) as exc:
        parse_style("")
    diag = exc.value.diagnostics[0]
    assert (diag.span.line, diag.span.col) == (1, 1)
    assert "style" in diag.expected


def test_diagnostic_carries_file_line_col():
    source = "style S {\n  component type T : transformer {\n    port out r Q;\n  }\n}"
    with pytest.raises(ParseFailure) as exc:
        parse_style(source, "broken.eus")
    text = str(exc.value.diagnostics[0])
    assert text.startswith("broken.eus:3:")
    assert ": error: " in text


MALFORMED_STYLES = [
    "style {",                                     # missing name
    "style S",                                     # missing body
    "style S { component type T }",                # missing kind
    "style S { rule ; }",                          # empty rule
    "style S { port type P : ; }",                 # missing format
    'style S { component type T : transformer { port out r : F on ; } }',
    "style S { format 42; }",                      # number where name expected
    "style S { component type T : nosuchkind { } }",
    'style S { rule r error "m" : forall x : nosuchdomain | true; }',
]

MALFORMED_ARCHS = [
    "architecture A {",                            # missing style
    "architecture A : S { component c }",          # missing type
    "architecture A : S { attach a.b to ; }",
    "architecture A : S { connector ; }",
    'architecture A : S { restrict channel to (a, b); }',
]


@pytest.mark.parametrize("source", MALFORMED_STYLES)
def test_malformed_style_produces_located_diagnostics(source):
    with pytest.raises(ParseFailure) as exc:
        parse_style(source)
    for diag in exc.value.diagnostics:
        assert diag.span.line >= 1 and diag.span.col >= 1
        assert diag.message


@pytest.mark.parametrize("source", MALFORMED_ARCHS)
def test_malformed_architecture_produces_located_diagnostics(source):
    with pytest.raises(ParseFailure) as exc:
        parse_architecture(source)
    for diag in exc.value.diagnostics:
        assert diag.span.line >= 1 and diag.span.col >= 1
        assert diag.message


def test_no_partial_ast_on_failure():
    # a failure late in the file must not leak the components parsed so far
    source = fixtures.FIG5_ARCH.replace("attach mail.mail to k1.src;",
                                        "attach mail.mail to ;")
    with pytest.raises(ParseFailure):
        parse_architecture(source)


# -- fixture round trips ------------------------------------------------------

FIXTURE_STYLES = [fixtures.WORKFLOW_STYLE, fixtures.DNA_STYLE,
                  fixtures.NEURO_STYLE, fixtures.OZONE_STYLE]
FIXTURE_ARCHS = [fixtures.FIG5_ARCH, fixtures.FIG7_ARCH,
                 fixtures.FIG7_FIXED_ARCH, fixtures.DASHBOARD_ARCH,
                 fixtures.RESTRICTED_DASHBOARD_ARCH]


@pytest.mark.parametrize("source", FIXTURE_STYLES)
def test_style_print_parse_round_trip(source):
    decl = parse_style(source)
    assert parse_style(print_style(decl)) == decl


@pytest.mark.parametrize("source", FIXTURE_ARCHS)
def test_architecture_print_parse_round_trip(source):
    decl = parse_architecture(source)
    assert parse_architecture(print_architecture(decl)) == decl


def test_printer_is_idempotent():
    decl = parse_architecture(fixtures.FIG5_ARCH)
    once = print_architecture(decl)
    assert print_architecture(parse_architecture(once)) == once


def test_comments_are_ignored():
    source = "// leading comment\n" + fixtures.WORKFLOW_STYLE.replace(
        "format Text;", "format Text; // trailing comment")
    assert parse_style(source) == parse_style(fixtures.WORKFLOW_STYLE)


# -- generated corpus ---------------------------------------------------------

def _ident(rng, prefix):
    return prefix + "".join(rng.choices(string.ascii_lowercase, k=4))


def _random_style(rng: random.Random) -> ast.StyleDecl:
    formats = [f"Fmt{i}" for i in range(rng.randint(1, 3))]
    decl = ast.StyleDecl(name=_ident(rng, "S").capitalize(),
                         formats=[ast.FormatDecl(name=f) for f in formats])
    decl.connector_types.append(ast.ConnectorTypeNode(
        name="Pipe", roles=["src", "snk"]))
    for i in range(rng.randint(1, 4)):
        kind = rng.choice(["transformer", "source", "sink"])
        ports = []
        if kind != "source":
            ports.append(ast.PortNode(direction="in", name="input",
                                      type_ref=rng.choice(formats)))
        if kind != "sink":
            ports.append(ast.PortNode(direction="out", name="output",
                                      type_ref=rng.choice(formats),
                                      optional=rng.random() < 0.3))
        props = []
        if rng.random() < 0.5:
            props.append(ast.PropertyNode(name="auth", ptype="string",
                                          default="token"))
        params = []
        if rng.random() < 0.5:
            params.append(ast.ParamNode(name=_ident(rng, "p"),
                                        ptype=rng.choice(["string", "number"]),
                                        default=rng.choice(["x", 3, None]),
                                        required=rng.random() < 0.3))
        decl.component_types.append(ast.ComponentTypeNode(
            name=f"T{i}", kind=kind, ports=ports, properties=props,
            params=params))
    if rng.random() < 0.5:
        decl.rules.append(ast.RuleNode(
            expr=parse_style(
                'style X { rule r error "m" : acyclic(); }').rules[0].expr,
            name="r0", severity=rng.choice(["error", "warning"]), message="msg"))
    if rng.random() < 0.3:
        decl.defaults.append(ast.DefaultPropNode(name="owner", value="me"))
    return decl


def _random_arch(rng: random.Random, style: ast.StyleDecl) -> ast.ArchDecl:
    decl = ast.ArchDecl(name=_ident(rng, "A").capitalize(), style=style.name)
    type_names = [ct.name for ct in style.component_types]
    comps = []
    for i in range(rng.randint(1, 5)):
        cid = f"c{i}"
        ct = rng.choice(style.component_types)
        bindings = []
        for prop in ct.properties:
            if rng.random() < 0.5:
                bindings.append(ast.BindingNode(name=prop.name, value="v"))
        for param in ct.params:
            if rng.random() < 0.5:
                bindings.append(ast.BindingNode(name=param.name, value="w",
                                                is_param=True))
        decl.components.append(ast.ComponentNode(id=cid, type=ct.name,
                                                 bindings=bindings))
        comps.append((cid, ct))
    n_conn = rng.randint(0, 3)
    for i in range(n_conn):
        decl.connectors.append(ast.ConnectorNode(id=f"k{i}", type="Pipe"))
        src = rng.choice(comps)
        snk = rng.choice(comps)
        out_port = next((p for p in src[1].ports if p.direction == "out"), None)
        in_port = next((p for p in snk[1].ports if p.direction == "in"), None)
        if out_port:
            decl.attachments.append(ast.AttachNode(
                component=src[0], port=out_port.name, connector=f"k{i}", role="src"))
        if in_port:
            decl.attachments.append(ast.AttachNode(
                component=snk[0], port=in_port.name, connector=f"k{i}", role="snk"))
    decl.attachments.sort(key=lambda a: a.sort_key())
    return decl


def test_round_trip_on_generated_corpus():
    rng = random.Random(20260823)
    count = 0
    for _ in range(260):
        style = _random_style(rng)
        reparsed = parse_style(print_style(style))
        assert reparsed == style, print_style(style)
        count += 1
        arch = _random_arch(rng, style)
        reparsed_arch = parse_architecture(print_architecture(arch))
        assert reparsed_arch == arch, print_architecture(arch)
        count += 1
    assert count >= 500


def test_print_decl_dispatches_both_kinds():
    s = parse_style(fixtures.WORKFLOW_STYLE)
    a = parse_architecture(fixtures.DASHBOARD_ARCH)
    assert print_decl(s) == print_style(s)
    assert print_decl(a) == print_architecture(a)
