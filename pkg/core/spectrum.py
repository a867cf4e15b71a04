"""Topological graph models of diagonal spectra."""
from collections import Counter
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from core.nccw import twisted_ends
from models.dual import DualData, TwistPerm
from models.topgraph import GraphSummary, HomeomorphismResult, TopGraph, VertexKind
from utils.logger import get_logger

logger = get_logger(__name__)


def spec_b(dual: DualData, twist: TwistPerm) -> TopGraph:
    """Spectrum of B_sigma: vertices X, one edge per y from b_0(y) to b_1(sigma(y))."""
    graph = TopGraph()
    for i, block in dual.x_blocks.items():
        for x in block:
            graph.add_vertex(x, VertexKind.X, block=i)
    tail, head = twisted_ends(dual, twist)
    for p, block in dual.y_blocks.items():
        for y in block:
            graph.add_edge(y, tail.get(y), head.get(y), block=p)
    return graph


def spec_b_gen(stage) -> TopGraph:
    """Spectrum of a tower stage; vertices over the distinguished index are Z-cells."""
    dual = stage.dual
    zcells = set(stage.meta.zcell_blocks)
    graph = TopGraph()
    for i, block in dual.x_blocks.items():
        for x in block:
            if i in zcells:
                graph.add_vertex(x, VertexKind.ZCELL, block=i, base_point="theta")
            else:
                graph.add_vertex(x, VertexKind.X, block=i)
    for p, block in dual.y_blocks.items():
        for y in block:
            graph.add_edge(y, dual.b0.get(y), dual.b1.get(y), block=p)
    return graph


def to_networkx(graph: TopGraph, with_rays: bool = False) -> nx.MultiGraph:
    """MultiGraph on the vertices; edges with a free end are dropped unless ``with_rays``.

    With ``with_rays`` every free end becomes a pendant node ``('ray', index, side)``.
    """
    result = nx.MultiGraph()
    for vid, vertex in graph.vertices.items():
        result.add_node(vid, kind=vertex.kind.value)
    for index, edge in enumerate(graph.edges):
        tail, head = edge.tail, edge.head
        if tail is not None and head is not None:
            result.add_edge(tail, head, label=edge.label)
        elif with_rays:
            if tail is None:
                tail = ("ray", index, 0)
                result.add_node(tail, kind="ray")
            if head is None:
                head = ("ray", index, 1)
                result.add_node(head, kind="ray")
            result.add_edge(tail, head, label=edge.label)
    return result


def analyze(graph: TopGraph) -> GraphSummary:
    """Components, cut vertices, free ends and Euler characteristic."""
    full = to_networkx(graph, with_rays=True)
    pi0 = nx.number_connected_components(full)
    simple = nx.Graph()
    simple.add_nodes_from(full)
    for index, (u, v) in enumerate(full.edges()):
        if u == v:
            nx.add_path(simple, [u, ("loop", index), v])
        else:
            simple.add_edge(u, v)
    cut_vertices = [v for v in nx.articulation_points(simple) if v in graph.vertices]
    free_ends = graph.free_end_count()
    euler = len(graph.vertices) + free_ends - len(graph.edges)
    return GraphSummary(
        pi0=pi0,
        cut_vertices=sorted(cut_vertices, key=repr),
        free_ends=free_ends,
        vertex_count=len(graph.vertices),
        edge_count=len(graph.edges),
        euler=euler,
    )


class _Reduced:
    """Homeomorphism normal form: smoothed multigraph plus free circle/interval counts."""

    def __init__(self, graph: TopGraph):
        self.circles = 0
        self.intervals = 0
        self.rays: Counter = Counter()
        self.kind: Dict[Hashable, str] = {}
        self.multigraph = nx.MultiGraph()
        for vid, vertex in graph.vertices.items():
            self.multigraph.add_node(vid)
            self.kind[vid] = vertex.kind.value
        for edge in graph.edges:
            if edge.tail is None and edge.head is None:
                self.intervals += 1
            elif edge.tail is None or edge.head is None:
                self.rays[edge.tail if edge.head is None else edge.head] += 1
            else:
                self.multigraph.add_edge(edge.tail, edge.head)
        self._smooth()
        for vid in self.multigraph.nodes:
            point = "zcell" if self.kind[vid] == VertexKind.ZCELL.value else "point"
            self.multigraph.nodes[vid]["label"] = f"{point}:{self.rays[vid]}"

    def _smooth(self) -> None:
        work = list(self.multigraph.nodes)
        while work:
            v = work.pop()
            if v not in self.multigraph or self.kind[v] == VertexKind.ZCELL.value:
                continue
            g = self.multigraph
            degree, rays = g.degree(v), self.rays[v]
            if degree == 2 and rays == 0:
                if g.number_of_edges(v, v) == 1:
                    g.remove_node(v)
                    self.circles += 1
                    continue
                u, w = [n for _, n in g.edges(v)]
                g.remove_node(v)
                g.add_edge(u, w)
                work.extend([u, w])
            elif degree == 1 and rays == 1:
                (u,) = [n for _, n in g.edges(v)]
                g.remove_node(v)
                self.rays[u] += 1
                work.append(u)
            elif degree == 0 and rays == 2:
                g.remove_node(v)
                self.intervals += 1
            else:
                continue
            self.rays.pop(v, None)


def graph_homeomorphic(g1: TopGraph, g2: TopGraph) -> HomeomorphismResult:
    """Decide whether two 1-complexes with free ends are homeomorphic.

    Degree-2 vertices are smoothed away, isolated circles and open intervals
    are counted separately, and the remaining multigraphs are compared by
    labelled isomorphism (vertex kind and number of free ends).
    """
    a, b = _Reduced(g1), _Reduced(g2)
    if a.circles != b.circles:
        return HomeomorphismResult(False, reason=f"circle components differ ({a.circles} vs {b.circles})")
    if a.intervals != b.intervals:
        return HomeomorphismResult(False, reason=f"open interval components differ ({a.intervals} vs {b.intervals})")
    if a.multigraph.number_of_nodes() != b.multigraph.number_of_nodes() \
            or a.multigraph.number_of_edges() != b.multigraph.number_of_edges():
        return HomeomorphismResult(False, reason="reduced graphs have different sizes")
    if a.multigraph.number_of_nodes() == 0:
        return HomeomorphismResult(True, witness={})
    mapping = nx.vf2pp_isomorphism(a.multigraph, b.multigraph, node_label="label")
    if mapping is None:
        return HomeomorphismResult(False, reason="reduced graphs are not isomorphic")
    return HomeomorphismResult(True, witness=mapping)


def subdivide(graph: TopGraph, index: int, new_vertex: Hashable) -> TopGraph:
    """Copy of ``graph`` with edge ``index`` split at a new anonymous vertex."""
    result = TopGraph()
    for vid, vertex in graph.vertices.items():
        result.add_vertex(vid, vertex.kind, vertex.block, vertex.base_point)
    result.add_vertex(new_vertex, VertexKind.ANON)
    for position, edge in enumerate(graph.edges):
        if position == index:
            result.add_edge((edge.label, 0), edge.tail, new_vertex, edge.block)
            result.add_edge((edge.label, 1), new_vertex, edge.head, edge.block)
        else:
            result.add_edge(edge.label, edge.tail, edge.head, edge.block)
    return result


def simple_graph(graph: TopGraph) -> nx.Graph:
    """Simple graph on the vertices (free-ended edges, loops and parallels dropped)."""
    result = nx.Graph(to_networkx(graph))
    result.remove_edges_from(list(nx.selfloop_edges(result)))
    return result
