"""One-dimensional CW complexes with possibly free edge-ends."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Hashable, List, Optional, Tuple

VertexId = Hashable


class VertexKind(str, Enum):
    X = "x"
    ZCELL = "zcell"
    ANON = "anon"


@dataclass
class TopVertex:
    vid: VertexId
    kind: VertexKind = VertexKind.X
    block: Optional[str] = None
    base_point: Optional[str] = None


@dataclass
class TopEdge:
    """An edge; ``tail``/``head`` are None for a free end."""
    label: Hashable
    tail: Optional[VertexId]
    head: Optional[VertexId]
    block: Optional[str] = None

    @property
    def free_ends(self) -> int:
        return (self.tail is None) + (self.head is None)


@dataclass
class TopGraph:
    """A finite 1-complex: vertices plus edges glued at attached ends only."""
    vertices: Dict[VertexId, TopVertex] = field(default_factory=dict)
    edges: List[TopEdge] = field(default_factory=list)

    def add_vertex(self, vid: VertexId, kind: VertexKind = VertexKind.X,
                   block: Optional[str] = None, base_point: Optional[str] = None) -> TopVertex:
        vertex = self.vertices.get(vid)
        if vertex is None:
            vertex = self.vertices[vid] = TopVertex(vid, kind, block, base_point)
        return vertex

    def add_edge(self, label: Hashable, tail: Optional[VertexId], head: Optional[VertexId],
                 block: Optional[str] = None) -> TopEdge:
        for end in (tail, head):
            if end is not None and end not in self.vertices:
                raise ValueError(f"Edge {label!r} attached to unknown vertex {end!r}")
        edge = TopEdge(label, tail, head, block)
        self.edges.append(edge)
        return edge

    def free_end_count(self) -> int:
        return sum(edge.free_ends for edge in self.edges)


@dataclass
class GraphSummary:
    """Connectivity data of a TopGraph."""
    pi0: int
    cut_vertices: List[VertexId]
    free_ends: int
    vertex_count: int
    edge_count: int
    euler: int

    @property
    def first_betti(self) -> int:
        return self.pi0 - self.euler


@dataclass
class HomeomorphismResult:
    homeomorphic: bool
    witness: Optional[Dict[Any, Any]] = None
    reason: Optional[str] = None


@dataclass
class K33Witness:
    """Subdivided K_{3,3}: ``paths[(a, b)]`` runs from branch vertex a to b."""
    left: Tuple[VertexId, VertexId, VertexId]
    right: Tuple[VertexId, VertexId, VertexId]
    paths: Dict[Tuple[VertexId, VertexId], List[VertexId]]


class SearchStatus(str, Enum):
    FOUND = "found"
    ABSENT = "absent"
    INCONCLUSIVE = "inconclusive"


@dataclass
class K33Search:
    status: SearchStatus
    witness: Optional[K33Witness] = None
    nodes_explored: int = 0

    @property
    def found(self) -> bool:
        return self.status == SearchStatus.FOUND
