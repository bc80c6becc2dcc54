"""Corpus-based ordering checks: deterministic frequency statistics over
previously accepted workflows stand in for the usual learned model."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..conformance import Violation, dataflow_graph
from ..model import Architecture, ResolvedStyle

DEFAULT_MIN_SUPPORT = 3


@dataclass
class CorpusEntry:
    id: str
    edges: list[tuple[str, str]] = field(default_factory=list)  # component type names


@dataclass
class WorkflowCorpus:
    entries: list[CorpusEntry] = field(default_factory=list)

    def precedence_counts(self) -> dict[str, dict[str, int]]:
        """P[x][y] = number of corpus workflows with a directed path from a
        component of type x to one of type y."""
        counts: dict[str, dict[str, int]] = {}
        for entry in self.entries:
            nodes = {n for e in entry.edges for n in e}
            adj = {n: set() for n in nodes}
            for u, v in entry.edges:
                adj[u].add(v)
            for x in nodes:
                seen, stack = set(), [x]
                while stack:
                    n = stack.pop()
                    for m in adj[n]:
                        if m not in seen:
                            seen.add(m)
                            stack.append(m)
                for y in seen:
                    counts.setdefault(x, {}).setdefault(y, 0)
                    counts[x][y] += 1
        return counts

    def successor_counts(self) -> dict[str, dict[str, int]]:
        """S[x][y] = number of corpus workflows with a direct edge x -> y."""
        counts: dict[str, dict[str, int]] = {}
        for entry in self.entries:
            for x, y in set(entry.edges):
                counts.setdefault(x, {}).setdefault(y, 0)
                counts[x][y] += 1
        return counts


def ordering_analysis(arch: Architecture, style: ResolvedStyle,
                      corpus: WorkflowCorpus,
                      min_support: int = DEFAULT_MIN_SUPPORT) -> list[Violation]:
    """Warn on edges whose reverse ordering dominates the corpus: edge u->v of
    types x->y is anomalous when P[y][x] >= min_support and P[x][y] == 0."""
    counts = corpus.precedence_counts()
    out = []
    adj = dataflow_graph(arch, style)
    for u in sorted(adj):
        for v in sorted(adj[u]):
            x = arch.components[u].type
            y = arch.components[v].type
            forward = counts.get(x, {}).get(y, 0)
            backward = counts.get(y, {}).get(x, 0)
            if backward >= min_support and forward == 0:
                out.append(Violation(
                    rule_id="ANOMALOUS_ORDER", culprits=[u, v],
                    message=f"edge '{u}' -> '{v}' orders {x} before {y}, but "
                            f"{backward} prior workflow(s) order {y} before {x} "
                            f"and none order {x} before {y}",
                    severity="warning"))
    return out
