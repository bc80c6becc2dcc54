"""Turn an invocation history back into a workflow declaration.

One component per record; a connector wherever a record consumed an earlier
record's output (matched by digest). Inputs that match nothing become source
components seeded with the artifact content, so recompiling and running the
synthesized workflow reproduces the original digests.
"""

from __future__ import annotations

from .. import errors
from ..adl import ast
from ..model import ResolvedStyle
from .history import HistoryRecord
from .store import ArtifactStore


def _ports(style: ResolvedStyle, type_name: str):
    decl = style.component_types.get(type_name)
    if decl is None:
        raise errors.UnknownOperation(f"operation '{type_name}' is not a registered "
                                      f"component type")
    ins = [p for p in decl.ports if p.direction == "in"]
    outs = [p for p in decl.ports if p.direction == "out"]
    return decl, ins, outs


def _source_type(style: ResolvedStyle) -> str:
    """A source-kind type with a `text` param, used for unmatched inputs."""
    for name in sorted(style.component_types):
        decl = style.component_types[name]
        if decl.kind == "source" and any(s.name == "text" for s in decl.param_specs):
            return name
    raise errors.UnknownOperation(
        "style has no source component type with a 'text' param to carry "
        "unmatched history inputs")


def _connector_type(style: ResolvedStyle) -> str:
    if not style.connector_types:
        raise errors.UnknownOperation("style declares no connector type")
    return sorted(style.connector_types)[0]


def synthesize_workflow(records: list[HistoryRecord], style: ResolvedStyle,
                        store: ArtifactStore = None,
                        name: str = "synthesized") -> ast.ArchDecl:
    decl = ast.ArchDecl(name=name, style=style.name)
    if not records:
        return decl
    conn_type = _connector_type(style)
    roles = style.connector_types[conn_type].roles
    src_role, snk_role = (roles[0], roles[1]) if len(roles) >= 2 else ("src", "snk")

    produced = {}   # digest -> (component id, out port name)
    n_conn = 0
    n_src = 0
    for i, rec in enumerate(records):
        _, ins, outs = _ports(style, rec.operation)
        cid = f"n{i}_{rec.operation}"
        bindings = [ast.BindingNode(name=k, value=v, is_param=True)
                    for k, v in sorted(rec.params.items())]
        decl.components.append(ast.ComponentNode(id=cid, type=rec.operation,
                                                 bindings=bindings))
        if len(rec.input_digests) > len(ins):
            raise errors.UnknownOperation(
                f"record '{rec.record_id}' has {len(rec.input_digests)} inputs but "
                f"type '{rec.operation}' declares {len(ins)} in-ports")
        for port, digest in zip(ins, rec.input_digests):
            if digest in produced:
                producer, out_port = produced[digest]
            else:
                # unmatched input: materialize it as a source component
                if store is None or digest not in store:
                    raise errors.MissingArtifact(
                        f"input {digest} of record '{rec.record_id}' matches no "
                        f"earlier output and is not in the store")
                stype = _source_type(style)
                sdecl, _, souts = _ports(style, stype)
                producer = f"src{n_src}_{stype}"
                n_src += 1
                text = store.get(digest).decode()
                decl.components.append(ast.ComponentNode(
                    id=producer, type=stype,
                    bindings=[ast.BindingNode(name="text", value=text, is_param=True)]))
                out_port = souts[0].name
            kid = f"k{n_conn}"
            n_conn += 1
            decl.connectors.append(ast.ConnectorNode(id=kid, type=conn_type))
            decl.attachments.append(ast.AttachNode(component=producer, port=out_port,
                                                   connector=kid, role=src_role))
            decl.attachments.append(ast.AttachNode(component=cid, port=port.name,
                                                   connector=kid, role=snk_role))
        for port, digest in zip(outs, rec.output_digests):
            produced.setdefault(digest, (cid, port.name))
    decl.attachments.sort(key=lambda a: a.sort_key())
    return decl
