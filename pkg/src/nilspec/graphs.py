"""Finite simple graphs and simplicial-join decomposition.

A graph splits as a simplicial join exactly when its complement is
disconnected; the join factors are the complement's connected components.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import networkx as nx


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __init__(self, vertices: Iterable[str], edges: Iterable[Iterable[str]] = ()):
        verts = tuple(sorted(str(v) for v in vertices))
        if len(set(verts)) != len(verts):
            raise GraphFormatError("duplicate vertex label")
        vset = set(verts)
        es = set()
        for k, e in enumerate(edges):
            e = tuple(str(v) for v in e)
            if len(e) != 2:
                raise GraphFormatError(f"edges[{k}]: an edge has exactly two endpoints")
            a, b = e
            if a == b:
                raise GraphFormatError(f"edges[{k}]: loop at {a!r}")
            for v in e:
                if v not in vset:
                    raise GraphFormatError(f"edges[{k}]: unknown endpoint {v!r}")
            fe = frozenset(e)
            if fe in es:
                raise GraphFormatError(f"edges[{k}]: duplicate edge {a!r}-{b!r}")
            es.add(fe)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(es))

    def __len__(self):
        return len(self.vertices)

    def index(self, v: str) -> int:
        return self.vertices.index(v)

    def adjacent(self, v: str, w: str) -> bool:
        return frozenset((v, w)) in self.edges

    def link(self, v: str) -> set[str]:
        return {w for w in self.vertices if w != v and self.adjacent(v, w)}

    def star(self, v: str) -> set[str]:
        return self.link(v) | {v}

    def non_edges(self) -> list[tuple[int, int]]:
        """Index pairs ``(i, j)``, ``i < j``, of non-adjacent vertices, lexicographic."""
        vs = self.vertices
        return [(i, j) for i, j in combinations(range(len(vs)), 2)
                if not self.adjacent(vs[i], vs[j])]

    def induced(self, part: Iterable[str]) -> Graph:
        part = set(part)
        return Graph(part, [tuple(e) for e in self.edges if e <= part])

    def relabel(self, mapping: dict[str, str]) -> Graph:
        return Graph([mapping[v] for v in self.vertices],
                     [tuple(mapping[v] for v in e) for e in self.edges])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": sorted(sorted(e) for e in self.edges)}


def parse_graph(text: str | dict) -> Graph:
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict):
        raise GraphFormatError("graph JSON must be an object")
    verts = data.get("vertices")
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise GraphFormatError('"vertices" must be a list of strings')
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise GraphFormatError('"edges" must be a list')
    for k, e in enumerate(edges):
        if not isinstance(e, list) or not all(isinstance(v, str) for v in e):
            raise GraphFormatError(f"edges[{k}]: an edge is a list of two vertex labels")
    return Graph(verts, edges)


def complement(g: Graph) -> Graph:
    return Graph(g.vertices, [(g.vertices[i], g.vertices[j]) for i, j in g.non_edges()])


def join(*graphs: Graph) -> Graph:
    """Simplicial join of graphs with pairwise disjoint vertex sets."""
    verts = [v for g in graphs for v in g.vertices]
    edges = [tuple(e) for g in graphs for e in g.edges]
    for g, h in combinations(graphs, 2):
        edges.extend((v, w) for v in g.vertices for w in h.vertices)
    return Graph(verts, edges)


def split_join(g: Graph) -> list[list[str]] | None:
    """Finest join decomposition of ``g``, or ``None`` if ``g`` does not split.

    Parts are sorted labels, ordered by (size, labels).
    """
    if not g.vertices:
        raise ValueError("the empty graph has no join decomposition")
    comps = nx.connected_components(complement(g).to_networkx())
    parts = sorted((sorted(c) for c in comps), key=lambda p: (len(p), p))
    return parts if len(parts) > 1 else None


def is_rationally_indecomposable(g: Graph) -> bool:
    return split_join(g) is None


def path_graph(n: int) -> Graph:
    labels = [chr(ord("a") + i) for i in range(n)]
    return Graph(labels, list(zip(labels, labels[1:])))


def edgeless_graph(n: int) -> Graph:
    return Graph([chr(ord("a") + i) for i in range(n)])


def complete_graph(n: int) -> Graph:
    labels = [chr(ord("a") + i) for i in range(n)]
    return Graph(labels, combinations(labels, 2))


def graph_automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """All automorphisms as index permutations ``p`` with ``v_i -> v_p[i]``, sorted."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    nxg = g.to_networkx()
    matcher = nx.algorithms.isomorphism.GraphMatcher(nxg, nxg)
    perms = {tuple(idx[m[v]] for v in g.vertices) for m in matcher.isomorphisms_iter()}
    return sorted(perms)
