"""Render a model as Graphviz DOT text.

Output is deterministic: nodes appear in id order, edges in their stored sort
order, and truth-table input references are drawn as gray arrows so the causal
fabric is visible next to the structural edges.  The text renders with plain
``dot`` and needs no plugin shapes.
"""

from __future__ import annotations

from collections.abc import Collection

from .graph import EdgeKind, NodeKind, SGraph

__all__ = ["to_dot", "NODE_SHAPES", "EDGE_STYLES"]

NODE_SHAPES: dict[NodeKind, str] = {
    NodeKind.CONTROLLER: "box",
    NodeKind.ACTUATOR: "trapezium",
    NodeKind.SENSOR: "ellipse",
    NodeKind.PHYSICAL_STATE: "parallelogram",
    NodeKind.LOGIC: "diamond",
    NodeKind.HAZARD: "octagon",
    NodeKind.MISSION_LOSS: "doubleoctagon",
}

EDGE_STYLES: dict[EdgeKind, str] = {
    EdgeKind.CONTROL_ACTION: "solid",
    EdgeKind.FEEDBACK: "dashed",
    EdgeKind.INFLUENCE: "dotted",
    EdgeKind.CONNECTIVITY: "bold",
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g: SGraph, highlight: Collection[str] = ()) -> str:
    """DOT text for the whole model; ``highlight`` ids get a filled accent."""
    marked = set(highlight)
    lines = [
        "digraph model {",
        "  rankdir=LR;",
        '  node [fontname="Helvetica"];',
        '  edge [fontname="Helvetica", fontsize=10];',
    ]
    for nid, node in g.nodes.items():
        attrs = [
            f'label="{_escape(node.label or nid)}"',
            f"shape={NODE_SHAPES[node.kind]}",
        ]
        if node.entry_point:
            attrs.append("peripheries=2")
        if nid in marked:
            attrs.append('style=filled, fillcolor="#ffd27f"')
        lines.append(f'  "{_escape(nid)}" [{", ".join(attrs)}];')
    for edge in g.edges:
        attrs = [f"style={EDGE_STYLES[edge.kind]}"]
        if edge.label:
            attrs.append(f'label="{_escape(edge.label)}"')
        lines.append(
            f'  "{_escape(edge.src)}" -> "{_escape(edge.dst)}" [{", ".join(attrs)}];'
        )
    for nid, node in g.nodes.items():
        if node.truth_table is None:
            continue
        for input_id in node.truth_table.inputs:
            lines.append(
                f'  "{_escape(input_id)}" -> "{_escape(nid)}"'
                ' [color=gray50, arrowhead=open];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
