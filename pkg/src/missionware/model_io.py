"""Strict JSON interchange for graph models.

A model document is ``{"nodes": [...], "edges": [...]}``.  Node objects accept
exactly ``id``, ``kind``, ``label``, ``keywords``, ``attributes``, and
``truth_table``; edge objects accept ``from``, ``to``, ``kind``, and ``label``.
Unknown keys are rejected.  Truth tables serialize as
``{"inputs": [...], "rows": {"010": false, ...}}`` with row keys as bit strings
ordered by the inputs list.  Serialization is canonical (sorted nodes, edges,
keywords, and rows), so loading and re-saving a model is byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .errors import InputError
from .graph import Edge, EdgeKind, Node, NodeKind, SGraph, TruthTable, build

__all__ = [
    "model_from_document",
    "document_from_model",
    "load_model",
    "save_model",
    "dumps_model",
]

_TOP_KEYS = {"nodes", "edges"}
_NODE_KEYS = {"id", "kind", "label", "keywords", "attributes", "truth_table"}
_EDGE_KEYS = {"from", "to", "kind", "label"}
_TABLE_KEYS = {"inputs", "rows"}


def _schema_error(message: str, subject: str | None = None) -> InputError:
    return InputError("SchemaError", message, subject)


def _require_keys(obj: Mapping[str, Any], allowed: set[str], what: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise _schema_error(f"{what} has unknown key {unknown[0]!r}")


def _string(obj: Mapping[str, Any], key: str, what: str, default: str | None = None) -> str:
    if key not in obj:
        if default is None:
            raise _schema_error(f"{what} is missing required key {key!r}")
        return default
    value = obj[key]
    if not isinstance(value, str):
        raise _schema_error(f"{what} key {key!r} must be a string")
    return value


def _parse_table(doc: Any, node_id: str) -> TruthTable:
    if not isinstance(doc, dict):
        raise _schema_error(f"truth_table of node {node_id!r} must be an object")
    _require_keys(doc, _TABLE_KEYS, f"truth_table of node {node_id!r}")
    inputs = doc.get("inputs")
    rows = doc.get("rows")
    if not isinstance(inputs, list) or not all(isinstance(i, str) for i in inputs):
        raise _schema_error(
            f"truth_table of node {node_id!r} needs an 'inputs' list of strings"
        )
    if not isinstance(rows, dict):
        raise _schema_error(f"truth_table of node {node_id!r} needs a 'rows' object")
    return TruthTable.from_rows_mapping(inputs, rows)


def _parse_node(doc: Any) -> Node:
    if not isinstance(doc, dict):
        raise _schema_error("node entries must be objects")
    _require_keys(doc, _NODE_KEYS, f"node {doc.get('id', '?')!r}")
    node_id = _string(doc, "id", "node")
    kind_name = _string(doc, "kind", f"node {node_id!r}")
    try:
        kind = NodeKind(kind_name)
    except ValueError:
        raise _schema_error(f"node {node_id!r} has unknown kind {kind_name!r}", node_id)
    keywords = doc.get("keywords", [])
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        raise _schema_error(f"node {node_id!r} keywords must be a list of strings", node_id)
    attributes = doc.get("attributes", {})
    if not isinstance(attributes, dict):
        raise _schema_error(f"node {node_id!r} attributes must be an object", node_id)
    table_doc = doc.get("truth_table")
    table = None if table_doc is None else _parse_table(table_doc, node_id)
    return Node(
        id=node_id,
        kind=kind,
        label=_string(doc, "label", f"node {node_id!r}", default=""),
        keywords=frozenset(keywords),
        attributes=dict(attributes),
        truth_table=table,
    )


def _parse_edge(doc: Any) -> Edge:
    if not isinstance(doc, dict):
        raise _schema_error("edge entries must be objects")
    _require_keys(doc, _EDGE_KEYS, "edge")
    src = _string(doc, "from", "edge")
    dst = _string(doc, "to", "edge")
    kind_name = _string(doc, "kind", f"edge {src!r} -> {dst!r}")
    try:
        kind = EdgeKind(kind_name)
    except ValueError:
        raise _schema_error(
            f"edge {src!r} -> {dst!r} has unknown kind {kind_name!r}", f"{src}->{dst}"
        )
    return Edge(src, dst, kind, _string(doc, "label", "edge", default=""))


def model_from_document(doc: Any) -> SGraph:
    """Parse and validate a model document into a graph."""
    if not isinstance(doc, dict):
        raise _schema_error("model document must be a JSON object")
    _require_keys(doc, _TOP_KEYS, "model document")
    nodes_doc = doc.get("nodes")
    edges_doc = doc.get("edges", [])
    if not isinstance(nodes_doc, list):
        raise _schema_error("model document needs a 'nodes' list")
    if not isinstance(edges_doc, list):
        raise _schema_error("model 'edges' must be a list")
    return build(
        [_parse_node(n) for n in nodes_doc],
        [_parse_edge(e) for e in edges_doc],
    )


def document_from_model(g: SGraph) -> dict[str, Any]:
    """Canonical document form of a graph (stable field and element order)."""
    nodes = []
    for node in g.nodes.values():
        entry: dict[str, Any] = {
            "id": node.id,
            "kind": node.kind.value,
            "label": node.label,
            "keywords": sorted(node.keywords),
            "attributes": {k: node.attributes[k] for k in sorted(node.attributes)},
        }
        if node.truth_table is not None:
            entry["truth_table"] = {
                "inputs": list(node.truth_table.inputs),
                "rows": node.truth_table.rows_mapping(),
            }
        nodes.append(entry)
    edges = [
        {"from": e.src, "to": e.dst, "kind": e.kind.value, "label": e.label}
        for e in g.edges
    ]
    return {"nodes": nodes, "edges": edges}


def dumps_model(g: SGraph) -> str:
    return json.dumps(document_from_model(g), indent=2) + "\n"


def load_model(path: str | Path) -> SGraph:
    """Load a model file; JSON syntax problems surface as ``SchemaError``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError("SchemaError", f"cannot read model file {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("SchemaError", f"model file {path} is not valid JSON: {exc}")
    return model_from_document(doc)


def save_model(g: SGraph, path: str | Path) -> None:
    Path(path).write_text(dumps_model(g), encoding="utf-8")
