"""
Export branches to graphviz dot.

Vertices are ranked by depth below the stem. Edges inside the stem are solid
and edges leading into the foliage are dashed. To plot:

    dot -Tpng -O branch.gv
"""

from pathlib import Path

from bttrep.tree.branch import BranchReport
from bttrep.tree.localtree import TreeVertex, tree_distance


def _node_id(v: TreeVertex) -> str:
    return f"{v.center}@{v.level}"


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def branch_to_dot(report: BranchReport, title: str = "branch", note: str = "") -> str:
    lines = [f'digraph "{_escape(title)}" {{', f'\tgraph [label="{_escape(report.place.label)}"]']
    if note:
        lines.append(f'\t"note" [shape = note, label="{_escape(note)}"];')
    depth = {v: 0 for v in report.stem}
    depth.update({e.vertex: e.depth for e in report.foliage})
    layers: dict[int, list[TreeVertex]] = {}
    for v in report.vertices:
        layers.setdefault(depth.get(v, 0), []).append(v)
    for value in sorted(layers):
        lines.append("\t{")
        lines.append("\t\trank = same;")
        for v in layers[value]:
            shape = "doublecircle" if v in report.stem else "circle"
            lines.append(f'\t\t"{_escape(_node_id(v))}" [label="{_escape(v.label)}", shape = {shape}];')
        lines.append("\t}")
    members = report.vertices
    for i, v in enumerate(members):
        for w in members[i + 1 :]:
            if tree_distance(v, w) != 1:
                continue
            tail, head = (v, w) if depth.get(v, 0) <= depth.get(w, 0) else (w, v)
            style = "solid" if tail in report.stem and head in report.stem else "dashed"
            lines.append(f'\t"{_escape(_node_id(tail))}" -> "{_escape(_node_id(head))}" [style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(report: BranchReport, path: str | Path, title: str = "branch", note: str = "") -> Path:
    path = Path(path)
    path.write_text(branch_to_dot(report, title, note), encoding="utf-8")
    return path
