"""Component repository: ontology-organized, searchable, versioned.

Persists as a directory of declaration files plus one JSON metadata index;
the ontology is a nested-list configuration document (YAML or JSON).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import errors
from .analyses.ordering import WorkflowCorpus
from .analyses.performance import CostEntry
from .conformance import dataflow_graph
from .model import Architecture, ComponentTypeDecl, ResolvedStyle


@dataclass
class Ontology:
    """Rooted category tree; names unique among siblings."""
    name: str = "root"
    children: list["Ontology"] = field(default_factory=list)

    def __post_init__(self):
        names = [c.name for c in self.children]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate sibling categories under '{self.name}'")

    @classmethod
    def from_config(cls, data) -> "Ontology":
        """Accepts {'name': ..., 'children': [...]} or {name: [children]} shorthand."""
        if isinstance(data, str):
            return cls(name=data)
        if isinstance(data, dict) and "name" in data:
            return cls(name=data["name"],
                       children=[cls.from_config(c) for c in data.get("children", [])])
        if isinstance(data, dict) and len(data) == 1:
            name, children = next(iter(data.items()))
            return cls(name=name, children=[cls.from_config(c) for c in children or []])
        raise ValueError(f"bad ontology node: {data!r}")

    def to_config(self) -> dict:
        return {"name": self.name,
                "children": [c.to_config() for c in self.children]}

    def has_path(self, path: list[str]) -> bool:
        if not path or path[0] != self.name:
            return False
        node = self
        for name in path[1:]:
            nxt = next((c for c in node.children if c.name == name), None)
            if nxt is None:
                return False
            node = nxt
        return True

    def leaf_paths(self) -> list[list[str]]:
        if not self.children:
            return [[self.name]]
        out = []
        for c in self.children:
            out.extend([[self.name] + p for p in c.leaf_paths()])
        return out


@dataclass
class RepoMetadata:
    description: str = ""
    ontology_path: list[str] = field(default_factory=list)
    param_count: int = 0
    provider: str = ""
    auth: str = ""
    consumes: list[str] = field(default_factory=list)   # format tags
    produces: list[str] = field(default_factory=list)
    cost: Optional[CostEntry] = None

    def to_dict(self):
        return {
            "description": self.description,
            "ontology_path": list(self.ontology_path),
            "param_count": self.param_count,
            "provider": self.provider,
            "auth": self.auth,
            "consumes": list(self.consumes),
            "produces": list(self.produces),
            "cost": None if self.cost is None else
                    {"fixed_seconds": self.cost.fixed_seconds,
                     "per_megabyte_seconds": self.cost.per_megabyte_seconds},
        }

    @classmethod
    def from_dict(cls, d):
        cost = d.get("cost")
        return cls(description=d.get("description", ""),
                   ontology_path=list(d.get("ontology_path", [])),
                   param_count=d.get("param_count", 0),
                   provider=d.get("provider", ""), auth=d.get("auth", ""),
                   consumes=list(d.get("consumes", [])),
                   produces=list(d.get("produces", [])),
                   cost=None if cost is None else CostEntry(**cost))


@dataclass
class RepoEntry:
    entry_id: str
    name: str
    version: int
    decl: ComponentTypeDecl
    metadata: RepoMetadata

    def to_dict(self):
        return {"entry_id": self.entry_id, "name": self.name,
                "version": self.version, "metadata": self.metadata.to_dict()}


def metadata_for(decl: ComponentTypeDecl, style: ResolvedStyle,
                 description: str = "", ontology_path: list[str] = None,
                 provider: str = "", auth: str = "",
                 cost: CostEntry = None) -> RepoMetadata:
    """Derive the searchable facets (formats, param count) from a declaration."""
    consumes = sorted({style.port_format(p) for p in decl.ports
                       if p.direction in ("in", "subscribe")})
    produces = sorted({style.port_format(p) for p in decl.ports
                       if p.direction in ("out", "publish")})
    return RepoMetadata(description=description,
                        ontology_path=list(ontology_path or []),
                        param_count=len(decl.param_specs),
                        provider=provider, auth=auth,
                        consumes=consumes, produces=produces, cost=cost)


class Repository:
    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._entries: dict[str, RepoEntry] = {}
        self._versions: dict[str, int] = {}

    # -- registration --------------------------------------------------------

    def register(self, decl: ComponentTypeDecl, metadata: RepoMetadata) -> str:
        if not isinstance(decl, ComponentTypeDecl):
            raise errors.InvalidDecl(f"not a component type declaration: {decl!r}")
        decl.validate()
        if not metadata.ontology_path:
            raise errors.UnknownCategory("ontology path must be non-empty")
        if not self.ontology.has_path(metadata.ontology_path):
            raise errors.UnknownCategory(
                "unknown ontology path: " + "/".join(metadata.ontology_path))
        if metadata.param_count != len(decl.param_specs):
            metadata.param_count = len(decl.param_specs)
        version = self._versions.get(decl.name, 0) + 1
        self._versions[decl.name] = version
        entry_id = f"{decl.name}@{version}"
        self._entries[entry_id] = RepoEntry(entry_id=entry_id, name=decl.name,
                                            version=version, decl=decl,
                                            metadata=metadata)
        return entry_id

    def get(self, entry_id: str) -> RepoEntry:
        return self._entries[entry_id]

    def entries(self) -> list[RepoEntry]:
        return sorted(self._entries.values(), key=lambda e: (e.name, -e.version))

    def latest(self, name: str) -> Optional[RepoEntry]:
        version = self._versions.get(name)
        return None if version is None else self._entries[f"{name}@{version}"]

    # -- search --------------------------------------------------------------

    def search(self, ontology_prefix: list[str] = None, text: str = None,
               consumed_format: str = None, produced_format: str = None,
               max_param_count: int = None) -> list[str]:
        """Conjunctive filtering; results ordered by name then version
        descending; deterministic."""
        out = []
        for entry in self.entries():
            md = entry.metadata
            if ontology_prefix is not None and \
                    md.ontology_path[:len(ontology_prefix)] != list(ontology_prefix):
                continue
            if text is not None:
                haystack = (entry.name + " " + md.description).lower()
                if text.lower() not in haystack:
                    continue
            if consumed_format is not None and consumed_format not in md.consumes:
                continue
            if produced_format is not None and produced_format not in md.produces:
                continue
            if max_param_count is not None and md.param_count > max_param_count:
                continue
            out.append(entry.entry_id)
        return out

    # -- recommendation ------------------------------------------------------

    def recommend_next(self, partial: Architecture, style: ResolvedStyle,
                       corpus: WorkflowCorpus, k: int = 5,
                       format_filter: bool = False) -> list[str]:
        """Rank candidate next component types by how often they directly follow
        the current sinks' types in prior workflows."""
        adj = dataflow_graph(partial, style)
        sinks = [c for c, vs in adj.items() if not vs]
        sink_types = {partial.components[c].type for c in sinks}
        sink_formats = set()
        for c in sinks:
            decl = style.component_types.get(partial.components[c].type)
            if decl:
                sink_formats |= {style.port_format(p) for p in decl.ports
                                 if p.direction == "out"}
        succ = corpus.successor_counts()
        scores = {}
        for st in sink_types:
            for candidate, count in succ.get(st, {}).items():
                scores[candidate] = scores.get(candidate, 0) + count
        if format_filter:
            for candidate in list(scores):
                entry = self.latest(candidate)
                consumes = set(entry.metadata.consumes) if entry else set()
                if consumes and not consumes & sink_formats:
                    del scores[candidate]
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return [name for name, _ in ranked[:k]]

    # -- persistence ---------------------------------------------------------

    def save(self, root: str | Path):
        from .adl.printer import print_style
        from .adl import ast as adl_ast
        root = Path(root)
        (root / "decls").mkdir(parents=True, exist_ok=True)
        index = {"ontology": self.ontology.to_config(), "entries": []}
        for entry in self.entries():
            decl_file = f"decls/{entry.name}@{entry.version}.eus"
            style_decl = _decl_to_style_source(entry.decl)
            (root / decl_file).write_text(style_decl)
            index["entries"].append({**entry.to_dict(), "decl_file": decl_file})
        (root / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True))

    @classmethod
    def load(cls, root: str | Path) -> "Repository":
        from .adl import parse_style, style_from_decl
        root = Path(root)
        index = json.loads((root / "index.json").read_text())
        repo = cls(Ontology.from_config(index["ontology"]))
        for item in sorted(index["entries"], key=lambda e: (e["name"], e["version"])):
            source = (root / item["decl_file"]).read_text()
            style = style_from_decl(parse_style(source, item["decl_file"]))
            decl = style.component_types[item["name"]]
            version = item["version"]
            entry = RepoEntry(entry_id=item["entry_id"], name=item["name"],
                              version=version, decl=decl,
                              metadata=RepoMetadata.from_dict(item["metadata"]))
            repo._entries[entry.entry_id] = entry
            repo._versions[entry.name] = max(repo._versions.get(entry.name, 0), version)
        return repo


def _decl_to_style_source(decl: ComponentTypeDecl) -> str:
    """One-declaration style wrapper so entries persist in plain ADL text."""
    from .adl import ast as A
    from .adl.printer import print_style
    formats = sorted({p.port_type for p in decl.ports})
    node = A.ComponentTypeNode(
        name=decl.name, kind=decl.kind,
        ports=[A.PortNode(direction=p.direction, name=p.name, type_ref=p.port_type,
                          optional=p.optional) for p in decl.ports],
        properties=[A.PropertyNode(name=s.name, ptype=s.type,
                                   enum_values=s.enum_values, default=s.default)
                    for s in decl.properties.values()],
        params=[A.ParamNode(name=s.name, ptype=s.type, default=s.default,
                            required=s.required) for s in decl.param_specs])
    style = A.StyleDecl(name=f"{decl.name}Entry",
                        formats=[A.FormatDecl(name=f) for f in formats],
                        component_types=[node])
    return print_style(style)


def scale_fixture(n: int) -> Repository:
    """Seed n synthetic entries across a 3-level ontology for scale tests."""
    if n < 1:
        raise ValueError("n must be >= 1")
    areas = ["TextProcessing", "NetworkAnalysis", "Imaging"]
    leaves = ["Extract", "Transform", "Report"]
    ontology = Ontology(name="root", children=[
        Ontology(name=area, children=[Ontology(name=leaf) for leaf in leaves])
        for area in areas])
    repo = Repository(ontology)
    from .model import ParamSpec, PortDecl
    for i in range(n):
        area = areas[i % len(areas)]
        leaf = leaves[(i // len(areas)) % len(leaves)]
        name = f"Op{i:04d}"
        decl = ComponentTypeDecl(
            name=name, kind="transformer",
            ports=[PortDecl(name="input", port_type="Text", direction="in"),
                   PortDecl(name="output", port_type="Text", direction="out")],
            param_specs=[ParamSpec(name=f"p{j}") for j in range(5 + (i % 21))])
        metadata = RepoMetadata(description=f"synthetic operation {i}",
                                ontology_path=["root", area, leaf],
                                param_count=len(decl.param_specs),
                                consumes=["Text"], produces=["Text"])
        repo.register(decl, metadata)
    return repo
