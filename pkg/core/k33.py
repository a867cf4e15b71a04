"""Search and verification of subdivided K_{3,3} inside topological graphs."""
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Set, Tuple

import networkx as nx

from config import config
from core.spectrum import simple_graph
from models.topgraph import K33Search, K33Witness, SearchStatus, TopGraph
from utils.logger import get_logger
from utils.metrics import record_budget_exhausted

logger = get_logger(__name__)


class _BudgetExceeded(Exception):
    pass


class _Search:
    def __init__(self, graph: nx.Graph, budget: int):
        self.graph = graph
        self.budget = budget
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExceeded()

    def connect(self, pairs: List[Tuple], branch: Set, used: Set, paths: Dict) -> bool:
        if not pairs:
            return True
        (a, b), rest = pairs[0], pairs[1:]
        allowed = [v for v in self.graph if v not in used and (v not in branch or v in (a, b))]
        view = self.graph.subgraph(allowed)
        try:
            candidates = nx.shortest_simple_paths(view, a, b)
            for path in candidates:
                self.tick()
                inner = set(path[1:-1])
                paths[(a, b)] = path
                if self.connect(rest, branch, used | inner, paths):
                    return True
                del paths[(a, b)]
        except nx.NetworkXNoPath:
            pass
        return False


def find_k33(graph: TopGraph, budget: Optional[int] = None) -> K33Search:
    """Exact backtracking search for a subdivision of K_{3,3}.

    Branch vertices are chosen among vertices of degree at least 3; the nine
    connecting paths are searched shortest-first and must be internally
    disjoint and avoid the other branch vertices.

    Args:
        graph: Graph to search
        budget: Maximum number of explored paths and partitions

    Returns:
        K33Search with status FOUND (and witness), ABSENT or INCONCLUSIVE
    """
    budget = budget or config.get('spectrum.k33_node_budget', 200000)
    simple = simple_graph(graph)
    candidates = sorted((v for v in simple if simple.degree(v) >= 3), key=repr)
    search = _Search(simple, budget)
    try:
        for six in combinations(candidates, 6):
            first, others = six[0], six[1:]
            for pair in combinations(others, 2):
                search.tick()
                left = (first,) + pair
                right = tuple(v for v in others if v not in pair)
                if not all(nx.has_path(simple, left[0], v) for v in left[1:] + right):
                    continue
                paths: Dict[Tuple, List] = {}
                pairs = [(a, b) for a in left for b in right]
                if search.connect(pairs, set(six), set(), paths):
                    witness = K33Witness(left=left, right=right, paths=dict(paths))
                    logger.debug(f"K33 found after {search.nodes} search nodes")
                    return K33Search(SearchStatus.FOUND, witness, search.nodes)
    except _BudgetExceeded:
        record_budget_exhausted("k33")
        logger.info(f"K33 search inconclusive after {search.nodes} nodes")
        return K33Search(SearchStatus.INCONCLUSIVE, None, search.nodes)
    return K33Search(SearchStatus.ABSENT, None, search.nodes)


def verify_k33(graph: TopGraph, witness: K33Witness) -> List[str]:
    """Independent re-check of a K_{3,3} subdivision; returns the problems found."""
    problems = []
    simple = simple_graph(graph)
    branch = list(witness.left) + list(witness.right)
    if len(set(branch)) != 6:
        problems.append("branch vertices are not six distinct vertices")
    for vertex in branch:
        if vertex not in simple:
            problems.append(f"branch vertex {vertex!r} not in graph")
    expected = {(a, b) for a in witness.left for b in witness.right}
    if set(witness.paths) != expected:
        problems.append("paths do not connect every left vertex to every right vertex")
        return problems

    owner: Dict[Hashable, Tuple] = {}
    for (a, b), path in witness.paths.items():
        if path[0] != a or path[-1] != b:
            problems.append(f"path {(a, b)!r} has wrong endpoints")
        for u, v in zip(path, path[1:]):
            if not simple.has_edge(u, v):
                problems.append(f"path {(a, b)!r} uses missing edge {(u, v)!r}")
        for vertex in path[1:-1]:
            if vertex in branch:
                problems.append(f"path {(a, b)!r} passes through branch vertex {vertex!r}")
            if vertex in owner:
                problems.append(f"paths {owner[vertex]!r} and {(a, b)!r} share {vertex!r}")
            owner[vertex] = (a, b)
    return problems
