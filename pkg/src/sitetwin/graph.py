"""In-memory typed property graph for schedule/cost traceability.

Nodes are (type, id) pairs with free-form attributes; edges carry a label.
Path queries use a small arrow syntax:

    vendor -supplies-> cost_code -maps_to-> activity[description~curtainwall]

Node filters in brackets support ``key=value``, ``key~substring`` and
``key>=number``; the special key ``criticality`` joins against a live
criticality map passed at query time. Every edit is recorded in an
append-only audit trail.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DanglingReference, MalformedPattern

NODE_TYPES = ("wbs", "bim_element", "cost_code", "vendor", "crew", "activity")


@dataclass(frozen=True)
class GraphNode:
    type: str
    id: str
    attrs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.type not in NODE_TYPES:
            raise ValueError(f"unknown node type {self.type!r}")

    @property
    def key(self) -> tuple[str, str]:
        return (self.type, self.id)


@dataclass(frozen=True)
class GraphEdge:
    src: tuple[str, str]
    label: str
    dst: tuple[str, str]


class KnowledgeGraph:
    def __init__(self):
        self.nodes: dict[tuple[str, str], GraphNode] = {}
        self.edges: list[GraphEdge] = []
        self.audit: list[dict] = []
        self._out: dict[tuple[str, str], list[GraphEdge]] = {}

    def add_node(self, type: str, id: str, attrs: dict | None = None, who: str = "", why: str = "", when: str = "") -> GraphNode:
        node = GraphNode(type, id, attrs or {})
        if node.key in self.nodes:
            raise ValueError(f"duplicate node {node.key}")
        self.nodes[node.key] = node
        self._out[node.key] = []
        self.audit.append({"op": "add_node", "key": node.key, "who": who, "why": why, "when": when})
        return node

    def add_edge(self, src_type: str, src_id: str, label: str, dst_type: str, dst_id: str, who: str = "", why: str = "", when: str = "") -> GraphEdge:
        src, dst = (src_type, src_id), (dst_type, dst_id)
        for key in (src, dst):
            if key not in self.nodes:
                raise DanglingReference(key, "graph edge")
        edge = GraphEdge(src, label, dst)
        self.edges.append(edge)
        self._out[src].append(edge)
        self.audit.append({"op": "add_edge", "edge": (src, label, dst), "who": who, "why": why, "when": when})
        return edge

    def neighbors(self, key: tuple[str, str], label: str | None = None) -> list[GraphEdge]:
        out = self._out.get(key, [])
        return [e for e in out if label is None or e.label == label]

    def clone(self) -> "KnowledgeGraph":
        g = KnowledgeGraph()
        g.nodes = dict(self.nodes)
        g.edges = list(self.edges)
        g.audit = list(self.audit)
        g._out = {k: list(v) for k, v in self._out.items()}
        return g


_STEP = re.compile(r"^\s*(\w+)\s*(?:\[([^\]]*)\])?\s*$")
_ARROW = re.compile(r"-\s*(\w+)\s*->")


@dataclass(frozen=True)
class _NodeTest:
    type: str
    filters: tuple[tuple[str, str, str], ...]  # (key, op, value)


def _parse_pattern(pattern: str) -> tuple[list[_NodeTest], list[str]]:
    parts = _ARROW.split(pattern)
    # parts alternate: node, label, node, label, node ...
    if len(parts) % 2 == 0:
        raise MalformedPattern(f"unbalanced pattern: {pattern!r}")
    node_tests = []
    labels = []
    for i, part in enumerate(parts):
        if i % 2 == 1:
            labels.append(part.strip())
            continue
        m = _STEP.match(part)
        if not m:
            raise MalformedPattern(f"bad node step: {part.strip()!r}")
        ntype, raw_filters = m.group(1), m.group(2)
        if ntype not in NODE_TYPES:
            raise MalformedPattern(f"unknown node type {ntype!r}")
        filters = []
        if raw_filters:
            for clause in raw_filters.split(","):
                fm = re.match(r"^\s*(\w+)\s*(>=|<=|~|=)\s*(.+?)\s*$", clause)
                if not fm:
                    raise MalformedPattern(f"bad filter {clause.strip()!r}")
                filters.append((fm.group(1), fm.group(2), fm.group(3)))
        node_tests.append(_NodeTest(ntype, tuple(filters)))
    return node_tests, labels


def kg_query(
    graph: KnowledgeGraph,
    pattern: str,
    criticality: dict[str, float] | None = None,
) -> dict:
    """All path matches; returns matched nodes, edges, and full path bindings."""
    tests, labels = _parse_pattern(pattern)

    def node_ok(node: GraphNode, test: _NodeTest) -> bool:
        if node.type != test.type:
            return False
        for key, op, value in test.filters:
            if key == "criticality":
                have = (criticality or {}).get(node.id)
            elif key == "id":
                have = node.id
            else:
                have = node.attrs.get(key)
            if have is None:
                return False
            if op == "=":
                if str(have) != value:
                    return False
            elif op == "~":
                if value.lower() not in str(have).lower():
                    return False
            else:
                try:
                    num = float(have)
                    bound = float(value)
                except (TypeError, ValueError):
                    raise MalformedPattern(f"non-numeric comparison on {key!r}")
                if op == ">=" and num < bound:
                    return False
                if op == "<=" and num > bound:
                    return False
        return True

    paths: list[tuple] = []
    starts = [n for n in graph.nodes.values() if node_ok(n, tests[0])]
    stack = [((n.key,), ()) for n in starts]
    while stack:
        node_path, edge_path = stack.pop()
        depth = len(node_path) - 1
        if depth == len(labels):
            paths.append((node_path, edge_path))
            continue
        for edge in graph.neighbors(node_path[-1], labels[depth]):
            if node_ok(graph.nodes[edge.dst], tests[depth + 1]):
                stack.append((node_path + (edge.dst,), edge_path + (edge,)))

    nodes = {key for node_path, _ in paths for key in node_path}
    edges = {e for _, edge_path in paths for e in edge_path}
    return {
        "paths": sorted(paths, key=lambda p: p[0]),
        "nodes": sorted(nodes),
        "edges": sorted(edges, key=lambda e: (e.src, e.label, e.dst)),
    }
