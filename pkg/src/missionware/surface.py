"""Attack surface listing and exploit-chain enumeration.

Only Connectivity edges carry attack traversal; the functional edge kinds
model behavior, not digital reachability.  Chains are simple directed paths
that start at an entry-point node, end at a critical component, and contain
at least one hop, enumerated exhaustively up to a hop budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Collection

from .errors import InputError
from .graph import EdgeKind, SGraph
from .hazards import CriticalSet, require_ready
from .threatdb import Mapping, ThreatCorpus, map_component

__all__ = [
    "SurfaceEntry",
    "AttackSurface",
    "ExploitChain",
    "attack_surface",
    "exploit_chains",
    "annotate_chains",
]

DEFAULT_MAX_LEN = 8


@dataclass(frozen=True)
class SurfaceEntry:
    """One entry-point node with its threat-record mapping."""

    entry: str
    mapping: Mapping

    def to_document(self) -> dict[str, Any]:
        return {"entry": self.entry, "mapping": self.mapping.to_document()}


@dataclass(frozen=True)
class AttackSurface:
    entries: tuple[SurfaceEntry, ...]

    def to_document(self) -> dict[str, Any]:
        return {"entries": [e.to_document() for e in self.entries]}


@dataclass(frozen=True)
class ExploitChain:
    """A simple Connectivity path from an entry point to a critical node.

    ``per_hop_vectors`` optionally carries one threat mapping per path node
    (``None`` where a node has no descriptor tokens).
    """

    path: tuple[str, ...]
    per_hop_vectors: tuple[Mapping | None, ...] | None = None

    @property
    def length(self) -> int:
        return len(self.path) - 1

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"path": list(self.path), "length": self.length}
        if self.per_hop_vectors is not None:
            doc["per_hop_vectors"] = [
                None if m is None else m.to_document() for m in self.per_hop_vectors
            ]
        return doc


def attack_surface(
    g: SGraph,
    corpus: ThreatCorpus,
    top_k: int = 10,
    threshold: float = 0.0,
) -> AttackSurface:
    """Map every entry-point node onto the corpus, sorted by node id.

    The entry set depends only on the model's ``entry_point`` flags; a node
    with no descriptor tokens is still listed, with an empty mapping.
    """
    require_ready(g)
    entries = []
    for nid, node in g.nodes.items():
        if not node.entry_point:
            continue
        try:
            mapping = map_component(corpus, node, top_k=top_k, threshold=threshold)
        except InputError as exc:
            if exc.code != "EmptyDescriptor":
                raise
            mapping = Mapping(nid, ())
        entries.append(SurfaceEntry(nid, mapping))
    return AttackSurface(tuple(entries))


def _critical_ids(critical: CriticalSet | Collection[str]) -> set[str]:
    if isinstance(critical, CriticalSet):
        return set(critical.components)
    return set(critical)


def exploit_chains(
    g: SGraph,
    critical: CriticalSet | Collection[str],
    max_len: int = DEFAULT_MAX_LEN,
) -> tuple[ExploitChain, ...]:
    """Every simple Connectivity path from an entry point into the critical set.

    Paths have between 1 and ``max_len`` hops and are returned in lexicographic
    order of their node-id sequence.  An entry point that is itself critical
    does not yield a zero-hop chain; reaching it needs no traversal at all and
    it is already listed by :func:`attack_surface`.
    """
    require_ready(g)
    if max_len < 1:
        raise InputError("BadParams", f"max_len must be at least 1, got {max_len}")
    targets = _critical_ids(critical) & set(g.nodes)
    adjacency: dict[str, tuple[str, ...]] = {nid: () for nid in g.nodes}
    neighbors: dict[str, set[str]] = {}
    for edge in g.edges:
        if edge.kind is EdgeKind.CONNECTIVITY:
            neighbors.setdefault(edge.src, set()).add(edge.dst)
    adjacency.update({nid: tuple(sorted(s)) for nid, s in neighbors.items()})

    found: list[tuple[str, ...]] = []

    def extend(path: list[str], on_path: set[str]) -> None:
        if len(path) - 1 >= max_len:
            return
        for nxt in adjacency[path[-1]]:
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            if nxt in targets:
                found.append(tuple(path))
            extend(path, on_path)
            on_path.discard(nxt)
            path.pop()

    for entry in (nid for nid, node in g.nodes.items() if node.entry_point):
        extend([entry], {entry})

    found.sort()
    return tuple(ExploitChain(path) for path in found)


def annotate_chains(
    chains: tuple[ExploitChain, ...],
    corpus: ThreatCorpus,
    g: SGraph,
    top_k: int = 10,
    threshold: float = 0.0,
) -> tuple[ExploitChain, ...]:
    """Attach a per-node threat mapping to each chain."""
    cache: dict[str, Mapping | None] = {}

    def mapping_for(nid: str) -> Mapping | None:
        if nid not in cache:
            try:
                cache[nid] = map_component(
                    corpus, g.node(nid), top_k=top_k, threshold=threshold
                )
            except InputError as exc:
                if exc.code != "EmptyDescriptor":
                    raise
                cache[nid] = None
        return cache[nid]

    return tuple(
        ExploitChain(c.path, tuple(mapping_for(nid) for nid in c.path)) for c in chains
    )
