"""Map, network, JSON, and SVG exporters plus the matching readers.

All writers emit UTF-8 with LF line endings and deterministic formatting so
identical inputs reproduce identical bytes. Map coordinates carry exactly
four decimals (round-half-even); the network file has no header and lists
1-based index pairs with i < j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .clustering import Clustering
from .errors import ConsistencyError, ParseError
from .layout import MapLayout
from .network import CoocNetwork, SimilarityMatrix, TermNode

MAP_COLUMNS = ("id", "label", "x", "y", "cluster", "occurrences")

CANVAS_WIDTH = 1000
CANVAS_HEIGHT = 700
_CANVAS_MARGIN = 70.0

# fixed 18-color cluster palette; node fill is PALETTE[cluster % 18]
PALETTE = (
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#dbdb8d",
)


@dataclass(frozen=True)
class MapRecord:
    id: int
    label: str
    x: float
    y: float
    cluster: int
    occurrences: int


def _check_aligned(layout: MapLayout, net: CoocNetwork, clustering: Clustering) -> None:
    n = len(net.terms)
    if len(layout.positions) != n:
        raise ConsistencyError(f"{len(layout.positions)} positions for {n} terms")
    if len(clustering.assignment) != n:
        raise ConsistencyError(f"{len(clustering.assignment)} cluster assignments for {n} terms")


def map_records(layout: MapLayout, net: CoocNetwork, clustering: Clustering) -> list[MapRecord]:
    """One record per term, ids 1-based in term order."""
    _check_aligned(layout, net, clustering)
    return [
        MapRecord(
            id=i + 1,
            label=net.terms[i].term,
            x=layout.positions[i][0],
            y=layout.positions[i][1],
            cluster=clustering.assignment[i],
            occurrences=net.terms[i].occurrences,
        )
        for i in range(len(net.terms))
    ]


def export_map(layout: MapLayout, net: CoocNetwork, clustering: Clustering, path: str | Path) -> Path:
    """Write the map TSV: id, label, x, y, cluster, occurrences."""
    path = Path(path)
    lines = ["\t".join(MAP_COLUMNS)]
    for rec in map_records(layout, net, clustering):
        lines.append(f"{rec.id}\t{rec.label}\t{rec.x:.4f}\t{rec.y:.4f}\t{rec.cluster}\t{rec.occurrences}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_map_file(path: str | Path) -> list[MapRecord]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != MAP_COLUMNS:
        raise ParseError(f"{path}:1: expected header columns {MAP_COLUMNS}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(MAP_COLUMNS):
            raise ParseError(f"{path}:{lineno}: expected {len(MAP_COLUMNS)} columns, got {len(parts)}")
        try:
            records.append(MapRecord(int(parts[0]), parts[1], float(parts[2]), float(parts[3]),
                                     int(parts[4]), int(parts[5])))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return records


def export_network(net: CoocNetwork, path: str | Path, terms_path: str | Path | None = None) -> Path:
    """Write the edge list TSV (no header) and optionally the term sidecar.

    Rows are ``i<TAB>j<TAB>c_ij`` with 1-based indices, i < j, sorted; an
    empty edge set produces an empty file.
    """
    path = Path(path)
    rows = [f"{i + 1}\t{j + 1}\t{c}" for (i, j), c in sorted(net.edges.items())]
    path.write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8", newline="\n")
    if terms_path is not None:
        terms_path = Path(terms_path)
        term_rows = [f"{i + 1}\t{node.term}\t{node.occurrences}" for i, node in enumerate(net.terms)]
        terms_path.write_text("\n".join(term_rows) + ("\n" if term_rows else ""), encoding="utf-8", newline="\n")
    return path


def read_network_file(path: str | Path, terms_path: str | Path, counting_mode: str = "binary") -> CoocNetwork:
    terms: list[TermNode] = []
    terms_path = Path(terms_path)
    for lineno, line in enumerate(terms_path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{terms_path}:{lineno}: expected 'index<TAB>term<TAB>occurrences'")
        index, term, occurrences = parts
        if int(index) != lineno:
            raise ParseError(f"{terms_path}:{lineno}: index {index} out of order")
        terms.append(TermNode(term, int(occurrences)))
    edges: dict[tuple[int, int], int] = {}
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'i<TAB>j<TAB>count'")
        try:
            i, j, count = (int(p) for p in parts)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if not 1 <= i < j <= len(terms):
            raise ParseError(f"{path}:{lineno}: bad index pair ({i}, {j})")
        edges[(i - 1, j - 1)] = count
    return CoocNetwork(tuple(terms), edges, counting_mode, {"imported_from": str(path)})


def export_graph_json(net: CoocNetwork, sim: SimilarityMatrix, layout: MapLayout,
                      clustering: Clustering, path: str | Path) -> Path:
    """Write the combined graph JSON (nodes with positions, weighted edges)."""
    _check_aligned(layout, net, clustering)
    if tuple(sim.terms) != net.term_strings:
        raise ConsistencyError("similarity matrix and network terms differ")
    nodes = [
        {
            "id": i + 1,
            "label": net.terms[i].term,
            "occurrences": net.terms[i].occurrences,
            "cluster": clustering.assignment[i],
            "x": layout.positions[i][0],
            "y": layout.positions[i][1],
        }
        for i in range(len(net.terms))
    ]
    edges = [
        {"source": i + 1, "target": j + 1, "cooccurrences": c, "strength": sim.strengths[(i, j)]}
        for (i, j), c in sorted(net.edges.items())
    ]
    payload = {"nodes": nodes, "edges": edges}
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return path


def _node_radius(occurrences: int, node_scale: float) -> float:
    return 4.0 + node_scale * 3.0 * math.sqrt(occurrences)


def render_svg(layout: MapLayout, net: CoocNetwork, clustering: Clustering, path: str | Path,
               sim: SimilarityMatrix | None = None, node_scale: float = 1.0) -> Path:
    """Render a deterministic SVG map (1000x700).

    Node radius is 4 + node_scale * 3 * sqrt(occurrences); fill comes from
    the fixed 18-color palette via cluster id mod palette size; the label
    sits centered under the node. Only the top quartile of edges by
    strength is drawn (strength falls back to co-occurrence counts when no
    similarity matrix is given), stroke width proportional to strength.
    """
    _check_aligned(layout, net, clustering)
    n = len(net.terms)
    xs = [p[0] for p in layout.positions]
    ys = [p[1] for p in layout.positions]
    span_x = (max(xs) - min(xs)) if n > 1 else 0.0
    span_y = (max(ys) - min(ys)) if n > 1 else 0.0
    scale_x = (CANVAS_WIDTH - 2 * _CANVAS_MARGIN) / span_x if span_x > 0 else 0.0
    scale_y = (CANVAS_HEIGHT - 2 * _CANVAS_MARGIN) / span_y if span_y > 0 else 0.0
    scale = min(s for s in (scale_x, scale_y) if s > 0) if (scale_x > 0 or scale_y > 0) else 0.0
    center_x = (max(xs) + min(xs)) / 2 if n else 0.0
    center_y = (max(ys) + min(ys)) / 2 if n else 0.0

    def to_canvas(px: float, py: float) -> tuple[float, float]:
        # SVG y grows downward
        return (CANVAS_WIDTH / 2 + (px - center_x) * scale,
                CANVAS_HEIGHT / 2 - (py - center_y) * scale)

    weights: dict[tuple[int, int], float]
    if sim is not None:
        if tuple(sim.terms) != net.term_strings:
            raise ConsistencyError("similarity matrix and network terms differ")
        weights = dict(sim.strengths)
    else:
        weights = {pair: float(c) for pair, c in net.edges.items()}
    ranked = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    quartile = ranked[: math.ceil(len(ranked) / 4)] if ranked else []
    max_weight = max((w for _, w in quartile), default=1.0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" '
        f'viewBox="0 0 {CANVAS_WIDTH} {CANVAS_HEIGHT}">',
        f'  <rect width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" fill="#ffffff"/>',
    ]
    for (i, j), weight in sorted(quartile):
        x1, y1 = to_canvas(*layout.positions[i])
        x2, y2 = to_canvas(*layout.positions[j])
        width = 0.75 + 2.25 * (weight / max_weight)
        parts.append(
            f'  <line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="#b0b0b0" stroke-width="{width:.2f}" stroke-opacity="0.6"/>'
        )
    for i in range(n):
        cx, cy = to_canvas(*layout.positions[i])
        radius = _node_radius(net.terms[i].occurrences, node_scale)
        color = PALETTE[clustering.assignment[i] % len(PALETTE)]
        label = escape(net.terms[i].term)
        parts.append(f'  <circle cx="{cx:.2f}" cy="{cy:.2f}" r="{radius:.2f}" fill="{color}" fill-opacity="0.85"/>')
        parts.append(
            f'  <text x="{cx:.2f}" y="{cy + radius + 11.0:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
    return path
