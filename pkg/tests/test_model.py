"""Style resolution, instantiation, and composite reuse."""

import pytest

from euarch import errors, fixtures
from euarch.adl import parse_architecture, parse_style, style_from_decl
from euarch.model import (
    ParamRef, ParamSpec, encapsulate, expand, instantiate, resolve_style,
)


def _registry(*sources):
    registry = {}
    for src in sources:
        style = style_from_decl(parse_style(src))
        registry[style.name] = style
    return registry


def _resolve(name, *sources):
    registry = _registry(*sources)
    return resolve_style(registry[name], registry)


# -- inheritance --------------------------------------------------------------

def test_child_style_inherits_constraints_and_adds_types():
    resolved = _resolve("DNA", fixtures.WORKFLOW_STYLE, fixtures.DNA_STYLE)
    rule_ids = {c.rule_id() for c in resolved.constraints}
    # the dataflow root's acyclicity rule survives specialization
    assert any("acyclic" in rid or rid.startswith("rule_") for rid in rule_ids)
    assert "MailExtractor" in resolved.component_types
    assert "Pipe" in resolved.connector_types
    assert {"Text", "DyNetML", "Report"} <= resolved.formats


def test_cyclic_inheritance_reports_the_chain():
    a = "style A extends B { }"
    b = "style B extends A { }"
    with pytest.raises(errors.CyclicInheritance) as exc:
        _resolve("A", a, b)
    assert "A" in str(exc.value) and "B" in str(exc.value)


def test_missing_parent():
    with pytest.raises(errors.MissingParent):
        _resolve("A", "style A extends Ghost { }")


def test_redeclaration_without_override_marker_conflicts():
    parent = """style P {
      component type T : transformer { port in input : F; port out output : F; }
      format F;
    }"""
    child = """style C extends P {
      component type T : transformer { port in input : F; }
    }"""
    with pytest.raises(errors.ConflictingDecl):
        _resolve("C", parent, child)


def test_redeclaration_with_override_marker_wins():
    parent = """style P {
      format F;
      component type T : transformer { port in input : F; port out output : F; }
    }"""
    child = """style C extends P {
      component type override T : transformer { port in input : F; }
    }"""
    resolved = _resolve("C", parent, child)
    assert len(resolved.component_types["T"].ports) == 1


def test_diamond_inheritance_deduplicates_shared_rule():
    root = 'style R { format F; rule keep error "m" : acyclic(); }'
    left = "style L extends R { }"
    right = "style G extends R { }"
    join = "style J extends L, G { }"
    resolved = _resolve("J", root, left, right, join)
    assert sum(1 for c in resolved.constraints if c.rule_id() == "keep") == 1


def test_same_rule_id_different_expr_conflicts():
    left = 'style L { rule r error "m" : acyclic(); }'
    right = 'style G { rule r error "m" : forall c in components | has(c, "auth"); }'
    join = "style J extends L, G { }"
    with pytest.raises(errors.ConflictingDecl):
        _resolve("J", left, right, join)


def test_port_format_must_be_registered():
    bad = """style S {
      component type T : transformer { port out output : Nope; }
    }"""
    with pytest.raises(errors.UnknownFormat):
        _resolve("S", bad)


def test_family_detection():
    assert fixtures.resolved("DNA").family == "workflow"
    assert fixtures.resolved("Ozone").family == "pubsub"


# -- instantiation ------------------------------------------------------------

def test_instantiate_demo_architecture(dna_style):
    arch = fixtures.architecture(fixtures.FIG5_ARCH, dna_style)
    assert set(arch.components) == {"mail", "patterns_src", "config_src",
                                    "filter", "delete", "meta", "topics"}
    assert len(arch.connectors) == 6
    assert arch.components["mail"].props["auth"] == "password"
    assert arch.components["mail"].params["server"] == "mail.example.org"


def test_instantiate_rejects_unknown_type(dna_style):
    src = "architecture A : DNA { component x : Ghost; }"
    with pytest.raises(errors.UnknownType):
        instantiate(dna_style, parse_architecture(src))


def test_instantiate_rejects_duplicate_ids(dna_style):
    src = ("architecture A : DNA { component x : Delete; "
           "component x : Delete; }")
    with pytest.raises(errors.DuplicateId):
        instantiate(dna_style, parse_architecture(src))


def test_instantiate_rejects_bad_attachment(dna_style):
    src = ("architecture A : DNA { component x : Delete; connector k : Pipe; "
           "attach x.nope to k.src; }")
    with pytest.raises(errors.BadAttachment):
        instantiate(dna_style, parse_architecture(src))


def test_instantiate_rejects_unknown_role(dna_style):
    src = ("architecture A : DNA { component x : Delete; connector k : Pipe; "
           "attach x.cleaned to k.middle; }")
    with pytest.raises(errors.BadAttachment):
        instantiate(dna_style, parse_architecture(src))


# -- composites ---------------------------------------------------------------

COMPOSITE_ARCH = """\
architecture C : DNA {
  component front : Cleaner {
    param dict = "x,y";
  }
  component meta : GenerateMetaNetwork;
  component config_src : DataSource;
  connector k1 : Pipe;
  connector k2 : Pipe;
  attach front.result to k1.src;
  attach meta.text to k1.snk;
  attach config_src.data to k2.src;
  attach meta.config to k2.snk;
  composite Cleaner(dict : string = "a,the") {
    component src : MailExtractor;
    component del : Delete {
      param dictionary = param dict;
    }
    connector c1 : Pipe;
    attach src.mail to c1.src;
    attach del.text to c1.snk;
    expose result as del.cleaned;
  }
}
"""


def test_composite_expansion_prefixes_and_rewires(dna_style):
    arch = fixtures.architecture(COMPOSITE_ARCH, dna_style)
    flat = expand(arch)
    assert "front.src" in flat.components
    assert "front.del" in flat.components
    assert "front" not in flat.components
    # the exposed port now attaches the inner component directly
    assert any(a.component == "front.del" and a.port == "cleaned"
               and a.connector == "k1" for a in flat.attachments)
    # actual parameter flows into the inner component
    assert flat.components["front.del"].params["dictionary"] == "x,y"


def test_composite_default_actual_applies(dna_style):
    src = COMPOSITE_ARCH.replace('{\n    param dict = "x,y";\n  }', ";")
    flat = expand(fixtures.architecture(src, dna_style))
    assert flat.components["front.del"].params["dictionary"] == "a,the"


def test_expand_without_composites_is_identity_shaped(dna_style, email_arch):
    flat = expand(email_arch)
    assert set(flat.components) == set(email_arch.components)
    assert set(flat.connectors) == set(email_arch.connectors)
    assert len(flat.attachments) == len(email_arch.attachments)


def test_encapsulate_rejects_attached_exposed_port(dna_style, email_arch):
    with pytest.raises(errors.BadPortMap):
        encapsulate(email_arch, [], {"out": ("mail", "mail")})


def test_encapsulate_rejects_unknown_component(dna_style, email_arch):
    with pytest.raises(errors.BadPortMap):
        encapsulate(email_arch, [], {"out": ("ghost", "p")})


def test_encapsulate_requires_declared_formals(dna_style, email_arch):
    arch = expand(email_arch)
    arch.components["mail"].params["server"] = ParamRef(name="host")
    with pytest.raises(errors.UnboundParam):
        encapsulate(arch, [], {})
    comp = encapsulate(arch, [ParamSpec(name="host")], {})
    assert comp.formal_params[0].name == "host"


def test_recursive_composite_rejected(dna_style):
    src = """architecture R : DNA {
      component a : Loop;
      composite Loop {
        component inner : Loop;
      }
    }"""
    arch = fixtures.architecture(src, dna_style)
    with pytest.raises(errors.RecursiveComposite):
        expand(arch)
