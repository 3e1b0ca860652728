"""Weakness / attack-pattern / vulnerability corpus and component mapping.

Records follow the public CWE, CAPEC, and CVE numbering conventions and are
ingested from a normalized JSON fixture document (shape:
``{"weaknesses": [...], "patterns": [...], "vulns": [...]}``).  The corpus
keeps the weakness parent hierarchy (ChildOf links, acyclic) and an inverted
token index.

Mapping a graph node onto the corpus scores every record by the sum of
``idf(token) = ln(record_count / document_frequency)`` over the tokens shared
between the node's descriptor (keywords, label, attribute values; case-folded
alphanumeric tokens) and the record's text.  Matched vulnerabilities are then
expanded upward: each referenced weakness and all of its ancestors join the
hit list as derived hits carrying the source score and the derivation chain.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping as TMapping

from .errors import InputError
from .graph import Node

__all__ = [
    "WeaknessRecord",
    "AttackPatternRecord",
    "VulnRecord",
    "ThreatCorpus",
    "Hit",
    "Mapping",
    "ingest",
    "load_corpus",
    "document_from_corpus",
    "map_component",
    "expand_hierarchy",
    "tokenize",
]

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_CWE_RE = re.compile(r"^CWE-[0-9]+$")
_CAPEC_RE = re.compile(r"^CAPEC-[0-9]+$")
_CVE_RE = re.compile(r"^CVE-[0-9]{4}-[0-9]{4,}$")

_TOP_KEYS = {"weaknesses", "patterns", "vulns"}
_WEAKNESS_KEYS = {"id", "name", "description", "parents"}
_PATTERN_KEYS = {"id", "name", "description", "related_weaknesses"}
_VULN_KEYS = {"id", "description", "weakness_refs"}


def tokenize(text: str) -> frozenset[str]:
    """Case-folded alphanumeric tokens of a text."""
    return frozenset(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class WeaknessRecord:
    id: str
    name: str
    description: str
    parents: tuple[str, ...] = ()

    def tokens(self) -> frozenset[str]:
        return tokenize(f"{self.id} {self.name} {self.description}")


@dataclass(frozen=True)
class AttackPatternRecord:
    id: str
    name: str
    description: str
    related_weaknesses: tuple[str, ...] = ()

    def tokens(self) -> frozenset[str]:
        return tokenize(f"{self.id} {self.name} {self.description}")


@dataclass(frozen=True)
class VulnRecord:
    id: str
    description: str
    weakness_refs: tuple[str, ...] = ()

    def tokens(self) -> frozenset[str]:
        return tokenize(f"{self.id} {self.description}")


AnyRecord = WeaknessRecord | AttackPatternRecord | VulnRecord


@dataclass(frozen=True)
class Hit:
    """One mapped record.  Derived hits inherit the score of their source
    vulnerability and carry the climb path (vuln, weakness, ..., ancestor)."""

    record_id: str
    score: float
    derived: bool = False
    derivation: tuple[str, ...] = ()

    def to_document(self) -> dict[str, Any]:
        return {
            "record": self.record_id,
            "score": self.score,
            "derived": self.derived,
            "derivation": list(self.derivation),
        }


@dataclass(frozen=True)
class Mapping:
    """Ranked threat hits for one graph node."""

    component: str
    hits: tuple[Hit, ...]

    def to_document(self) -> dict[str, Any]:
        return {"component": self.component, "hits": [h.to_document() for h in self.hits]}


@dataclass(frozen=True)
class ThreatCorpus:
    """Validated record collections plus a rebuildable token index."""

    weaknesses: TMapping[str, WeaknessRecord]
    patterns: TMapping[str, AttackPatternRecord]
    vulns: TMapping[str, VulnRecord]
    token_index: TMapping[str, tuple[str, ...]] = field(compare=False)
    idf: TMapping[str, float] = field(compare=False)

    def __len__(self) -> int:
        return len(self.weaknesses) + len(self.patterns) + len(self.vulns)

    def record(self, record_id: str) -> AnyRecord:
        for table in (self.weaknesses, self.patterns, self.vulns):
            if record_id in table:
                return table[record_id]
        raise InputError("UnknownRecord", f"no record with id {record_id!r}", record_id)


def _numeric_suffix(record_id: str) -> tuple[int, ...]:
    return tuple(int(part) for part in re.findall(r"[0-9]+", record_id))


def _schema_error(message: str, subject: str | None = None) -> InputError:
    return InputError("SchemaError", message, subject)


def _require_keys(obj: Any, allowed: set[str], required: set[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise _schema_error(f"{what} entries must be objects")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise _schema_error(f"{what} has unknown key {unknown[0]!r}")
    missing = sorted(required - set(obj))
    if missing:
        raise _schema_error(f"{what} is missing required key {missing[0]!r}")


def _string_list(value: Any, what: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise _schema_error(f"{what} must be a list of strings")
    return tuple(value)


def _check_id(record_id: Any, pattern: re.Pattern[str], what: str) -> str:
    if not isinstance(record_id, str) or not pattern.match(record_id):
        raise _schema_error(f"{what} id {record_id!r} is malformed", str(record_id))
    return record_id


def _detect_hierarchy_cycle(weaknesses: dict[str, WeaknessRecord]) -> None:
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(wid: str, stack: list[str]) -> None:
        state[wid] = 0
        stack.append(wid)
        for parent in weaknesses[wid].parents:
            if state.get(parent) == 0:
                raise InputError(
                    "HierarchyCycle",
                    f"weakness parent links form a cycle through {parent!r}",
                    parent,
                )
            if parent not in state:
                visit(parent, stack)
        stack.pop()
        state[wid] = 1

    for wid in weaknesses:
        if wid not in state:
            visit(wid, [])


def ingest(doc: Any) -> ThreatCorpus:
    """Validate a corpus document and build the indexed corpus.

    Raises ``SchemaError`` for malformed documents, ``HierarchyCycle`` for
    circular parent links, and ``DanglingReference`` when a record points at
    a weakness id that is not in the document.
    """
    if not isinstance(doc, dict):
        raise _schema_error("corpus document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise _schema_error(f"corpus document has unknown key {unknown[0]!r}")

    weaknesses: dict[str, WeaknessRecord] = {}
    for entry in doc.get("weaknesses", []):
        _require_keys(entry, _WEAKNESS_KEYS, {"id", "name", "description"}, "weakness")
        wid = _check_id(entry["id"], _CWE_RE, "weakness")
        if wid in weaknesses:
            raise _schema_error(f"duplicate weakness id {wid!r}", wid)
        if not isinstance(entry["name"], str) or not isinstance(entry["description"], str):
            raise _schema_error(f"weakness {wid!r} name/description must be strings", wid)
        weaknesses[wid] = WeaknessRecord(
            id=wid,
            name=entry["name"],
            description=entry["description"],
            parents=_string_list(entry.get("parents", []), f"weakness {wid!r} parents"),
        )

    patterns: dict[str, AttackPatternRecord] = {}
    for entry in doc.get("patterns", []):
        _require_keys(entry, _PATTERN_KEYS, {"id", "name", "description"}, "pattern")
        pid = _check_id(entry["id"], _CAPEC_RE, "pattern")
        if pid in patterns:
            raise _schema_error(f"duplicate pattern id {pid!r}", pid)
        if not isinstance(entry["name"], str) or not isinstance(entry["description"], str):
            raise _schema_error(f"pattern {pid!r} name/description must be strings", pid)
        patterns[pid] = AttackPatternRecord(
            id=pid,
            name=entry["name"],
            description=entry["description"],
            related_weaknesses=_string_list(
                entry.get("related_weaknesses", []), f"pattern {pid!r} related_weaknesses"
            ),
        )

    vulns: dict[str, VulnRecord] = {}
    for entry in doc.get("vulns", []):
        _require_keys(entry, _VULN_KEYS, {"id", "description"}, "vuln")
        vid = _check_id(entry["id"], _CVE_RE, "vuln")
        if vid in vulns:
            raise _schema_error(f"duplicate vuln id {vid!r}", vid)
        if not isinstance(entry["description"], str):
            raise _schema_error(f"vuln {vid!r} description must be a string", vid)
        vulns[vid] = VulnRecord(
            id=vid,
            description=entry["description"],
            weakness_refs=_string_list(
                entry.get("weakness_refs", []), f"vuln {vid!r} weakness_refs"
            ),
        )

    for record in weaknesses.values():
        for parent in record.parents:
            if parent not in weaknesses:
                raise InputError(
                    "DanglingReference",
                    f"weakness {record.id!r} lists unknown parent {parent!r}",
                    record.id,
                )
    for pattern in patterns.values():
        for ref in pattern.related_weaknesses:
            if ref not in weaknesses:
                raise InputError(
                    "DanglingReference",
                    f"pattern {pattern.id!r} references unknown weakness {ref!r}",
                    pattern.id,
                )
    for vuln in vulns.values():
        for ref in vuln.weakness_refs:
            if ref not in weaknesses:
                raise InputError(
                    "DanglingReference",
                    f"vuln {vuln.id!r} references unknown weakness {ref!r}",
                    vuln.id,
                )

    _detect_hierarchy_cycle(weaknesses)

    weaknesses = dict(sorted(weaknesses.items(), key=lambda kv: _numeric_suffix(kv[0])))
    patterns = dict(sorted(patterns.items(), key=lambda kv: _numeric_suffix(kv[0])))
    vulns = dict(sorted(vulns.items(), key=lambda kv: _numeric_suffix(kv[0])))

    index: dict[str, list[str]] = {}
    all_records: list[AnyRecord] = [
        *weaknesses.values(),
        *patterns.values(),
        *vulns.values(),
    ]
    for record in all_records:
        for token in record.tokens():
            index.setdefault(token, []).append(record.id)
    token_index = {
        token: tuple(sorted(ids)) for token, ids in sorted(index.items())
    }
    total = len(all_records)
    idf = {
        token: math.log(total / len(ids)) for token, ids in token_index.items()
    }

    return ThreatCorpus(weaknesses, patterns, vulns, token_index, idf)


def load_corpus(path: str | Path) -> ThreatCorpus:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _schema_error(f"cannot read corpus file {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _schema_error(f"corpus file {path} is not valid JSON: {exc}")
    return ingest(doc)


def document_from_corpus(corpus: ThreatCorpus) -> dict[str, Any]:
    """Canonical serialized form; ingest(document_from_corpus(c)) == c."""
    return {
        "weaknesses": [
            {
                "id": w.id,
                "name": w.name,
                "description": w.description,
                "parents": list(w.parents),
            }
            for w in corpus.weaknesses.values()
        ],
        "patterns": [
            {
                "id": p.id,
                "name": p.name,
                "description": p.description,
                "related_weaknesses": list(p.related_weaknesses),
            }
            for p in corpus.patterns.values()
        ],
        "vulns": [
            {
                "id": v.id,
                "description": v.description,
                "weakness_refs": list(v.weakness_refs),
            }
            for v in corpus.vulns.values()
        ],
    }


def expand_hierarchy(corpus: ThreatCorpus, weakness_id: str) -> tuple[str, ...]:
    """All ancestors of a weakness in deterministic breadth-first order."""
    if weakness_id not in corpus.weaknesses:
        raise InputError(
            "UnknownRecord", f"no weakness with id {weakness_id!r}", weakness_id
        )
    seen: list[str] = []
    queue = deque(corpus.weaknesses[weakness_id].parents)
    while queue:
        current = queue.popleft()
        if current in seen:
            continue
        seen.append(current)
        queue.extend(corpus.weaknesses[current].parents)
    return tuple(seen)


def descriptor_tokens(node: Node) -> frozenset[str]:
    """Search tokens of a node: keywords, label, and attribute values."""
    parts = [node.label, " ".join(sorted(node.keywords))]
    parts.extend(str(v) for _, v in sorted(node.attributes.items(), key=lambda kv: kv[0]))
    return tokenize(" ".join(parts))


def _ancestor_chains(
    corpus: ThreatCorpus, weakness_id: str
) -> list[tuple[str, tuple[str, ...]]]:
    """Each ancestor with the first breadth-first climb path reaching it."""
    chains: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    queue: deque[tuple[str, tuple[str, ...]]] = deque(
        (p, (weakness_id, p)) for p in corpus.weaknesses[weakness_id].parents
    )
    while queue:
        current, path = queue.popleft()
        if current in seen:
            continue
        seen.add(current)
        chains.append((current, path))
        queue.extend(
            (p, path + (p,)) for p in corpus.weaknesses[current].parents
        )
    return chains


def map_component(
    corpus: ThreatCorpus,
    node: Node,
    top_k: int = 10,
    threshold: float = 0.0,
) -> Mapping:
    """Rank corpus records against one node's descriptor tokens.

    Up to ``top_k`` records with score strictly above ``threshold`` are
    returned as direct hits; every directly hit vulnerability is then expanded
    through its weakness references and their ancestors into derived hits that
    inherit the source score.  The final list is ordered by score descending,
    then record id, with direct hits before their derived twins.
    """
    if top_k < 1:
        raise InputError("BadParams", f"top_k must be positive, got {top_k}")
    tokens = descriptor_tokens(node)
    if not tokens:
        raise InputError(
            "EmptyDescriptor",
            f"node {node.id!r} has no keywords, label text, or attribute values",
            node.id,
        )

    scores: dict[str, float] = {}
    for token in sorted(tokens):
        weight = corpus.idf.get(token)
        if weight is None:
            continue
        for record_id in corpus.token_index[token]:
            scores[record_id] = scores.get(record_id, 0.0) + weight

    ranked = sorted(
        ((rid, s) for rid, s in scores.items() if s > threshold),
        key=lambda kv: (-kv[1], kv[0]),
    )
    direct = ranked[:top_k]

    hits = [Hit(rid, score) for rid, score in direct]
    derived_seen: set[str] = set()
    for rid, score in direct:
        vuln = corpus.vulns.get(rid)
        if vuln is None:
            continue
        for ref in vuln.weakness_refs:
            if ref not in derived_seen:
                derived_seen.add(ref)
                hits.append(Hit(ref, score, derived=True, derivation=(rid, ref)))
            for ancestor, climb in _ancestor_chains(corpus, ref):
                if ancestor in derived_seen:
                    continue
                derived_seen.add(ancestor)
                hits.append(
                    Hit(ancestor, score, derived=True, derivation=(rid,) + climb)
                )

    hits.sort(key=lambda h: (-h.score, h.record_id, h.derived))
    return Mapping(node.id, tuple(hits))
