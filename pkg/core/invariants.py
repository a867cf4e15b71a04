"""
Invariants read off built towers: free ends, count sequences, the bisection
census and explicit K_{3,3} subdivisions.
"""
from collections import Counter
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple

from config import config
from core.connector import ConnectorMap, compose_projection
from core.k33 import find_k33, verify_k33
from core.spectrum import spec_b_gen
from models.errors import ConditionError, PathError, PreconditionError
from models.topgraph import K33Witness, TopGraph
from models.tower import (
    HALF,
    HALF_KINDS,
    KIND_ORDER,
    BisectionEntry,
    BlockKind,
    EndsTree,
    Flavor,
    K33Certificate,
    Tower,
    TowerComparison,
    TowerStage,
    lam,
)
from utils.logger import get_logger

logger = get_logger(__name__)


# ---------------------------------------------------------------------------
# Ends
# ---------------------------------------------------------------------------

def _stage_ends(stage: TowerStage) -> List[Hashable]:
    dual = stage.dual
    return [y for y in dual.y_blocks[stage.meta.grave] if y not in dual.b1]


def _end_kinds(tower: Tower) -> List[BlockKind]:
    """Kinds whose entries over a free end keep it free: value 1 at t = 1."""
    kinds = [kind for kind in KIND_ORDER if kind not in HALF_KINDS and lam(kind, 1) == 1]
    if tower.family.construction == Flavor.CONN:
        kinds = [kind for kind in kinds if kind == BlockKind.IDENT]
    return kinds


def _end_fiber(tower: Tower, grave: str) -> int:
    """Free ends one level up over each free end: entries of the end kinds from the grave block."""
    spec = tower.connector
    q = spec.grave_target
    return sum(spec.multiplicity(kind, q, grave, grave) for kind in _end_kinds(tower))


def ends_tree(tower: Tower, depth: int) -> EndsTree:
    """Free ends of the built levels 1..depth with their connector parents.

    Raises:
        PreconditionError: unital tower, or depth outside the built levels
    """
    if not tower.family.stably_projectionless:
        raise PreconditionError("ends trees need a stably projectionless tower")
    if depth < 1 or depth > tower.depth:
        raise PreconditionError(f"depth must lie in [1, {tower.depth}], got {depth}")
    tree = EndsTree()
    for level in range(1, depth + 1):
        stage = tower.stage(level)
        ends = _stage_ends(stage)
        if level > 1:
            previous = set(tree.levels[-1])
            for end in ends:
                if end[4] not in previous:
                    raise PreconditionError(f"end {end!r} does not lie over an end of level {level - 1}")
                tree.parent[end] = end[4]
        tree.levels.append(ends)
    tree.materialized = depth
    logger.info(f"Ends tree to depth {depth}: counts {tree.leaf_counts()}, verdict {tree.verdict}")
    return tree


def end_count_formula(tower: Tower, depth: int) -> List[int]:
    """Predicted end counts: the seed's free ends times the block-table fiber per level.

    Needs only the seed stage, so it also predicts levels that were not built.
    """
    if not tower.family.stably_projectionless:
        raise PreconditionError("end counts need a stably projectionless tower")
    seed = tower.stage(1)
    counts = [len(_stage_ends(seed))]
    grave = seed.meta.grave
    for _ in range(2, depth + 1):
        counts.append(counts[-1] * _end_fiber(tower, grave))
        grave = tower.connector.grave_target
    return counts


# ---------------------------------------------------------------------------
# Count sequences
# ---------------------------------------------------------------------------

def invariant_sequence(tower: Tower, depth: int) -> List[Dict[str, int]]:
    """Per level, the map p -> #Y_n^p."""
    if depth < 1 or depth > tower.depth:
        raise PreconditionError(f"depth must lie in [1, {tower.depth}], got {depth}")
    return [tower.stage(level).counts() for level in range(1, depth + 1)]


def compare_towers(t1: Tower, t2: Tower, depth: int) -> TowerComparison:
    """Separate two towers by the smallest count at the first level their insertions differ.

    That count is the minimum of the smaller-insertion tower's level; the
    other tower repeats the shared lower levels, which stay below it, and
    exceeds it from that level on.
    """
    seq1 = invariant_sequence(t1, depth)
    seq2 = invariant_sequence(t2, depth)
    first = next((level for level in range(1, depth + 1)
                  if t1.family.insertion(level) != t2.family.insertion(level)), None)

    if first is None:
        for level, (c1, c2) in enumerate(zip(seq1, seq2), start=1):
            if sorted(c1.values()) != sorted(c2.values()):
                diff = set(c1.values()) ^ set(c2.values())
                return TowerComparison(True, level=level, value=min(diff),
                                       note="count multisets differ without an insertion difference")
        return TowerComparison(False, note=f"indistinguishable to depth {depth}")

    smaller = 1 if t1.family.insertion(first) < t2.family.insertion(first) else 2
    own, other = (seq1, seq2) if smaller == 1 else (seq2, seq1)
    value = min(own[first - 1].values())
    seen = {count for counts in other for count in counts.values()}
    if value in seen:
        logger.info(f"Count {value} at level {first} also occurs in the other tower")
        return TowerComparison(False, level=first, value=value, smaller=smaller,
                               note="minimum count also occurs in the other tower")
    logger.info(f"Towers distinguished at level {first} by the count {value}")
    return TowerComparison(True, level=first, value=value, smaller=smaller)


# ---------------------------------------------------------------------------
# Bisection census
# ---------------------------------------------------------------------------

def _same_slot(slot: Dict, y: Hashable, z: Hashable) -> bool:
    return y in slot and z in slot and slot[y] == slot[z]


def _ordered_pairs(groups: Counter) -> int:
    return sum(size * (size - 1) for size in groups.values())


def bisection_census(tower: Tower, depth: int) -> List[BisectionEntry]:
    """Ordered pairs of one block lying outside both boundary-arrow domains, per level and block."""
    if depth < 1 or depth > tower.depth:
        raise PreconditionError(f"depth must lie in [1, {tower.depth}], got {depth}")
    limit = config.get('tower.census_example_limit', 5)
    entries = []
    for level in range(1, depth + 1):
        dual = tower.stage(level).dual
        for p, block in dual.y_blocks.items():
            size = len(block)
            in0 = _ordered_pairs(Counter(dual.slot0[y] for y in block if y in dual.slot0))
            in1 = _ordered_pairs(Counter(dual.slot1[y] for y in block if y in dual.slot1))
            both = _ordered_pairs(Counter((dual.slot0[y], dual.slot1[y]) for y in block
                                          if y in dual.slot0 and y in dual.slot1))
            count = size * (size - 1) - in0 - in1 + both
            examples = []
            for y in block:
                if len(examples) >= limit or len(examples) >= count:
                    break
                z = next((z for z in block if z != y and not _same_slot(dual.slot0, y, z)
                          and not _same_slot(dual.slot1, y, z)), None)
                if z is not None:
                    examples.append((y, z, (False, False)))
            entries.append(BisectionEntry(level=level, block=p, degree=size, count=count, examples=examples))
    return entries


# ---------------------------------------------------------------------------
# K_{3,3} inside basic open sets
# ---------------------------------------------------------------------------

def _constant_loops(tower: Tower, base: TowerStage, mid: TowerStage, y: Hashable) -> List[Tuple]:
    """Nine constant-1/2 entries over y, all of one kind; they are loops at one embedded copy vertex."""
    spec = tower.connector
    p = base.dual.y_block_of[y]
    grave = base.meta.grave if tower.family.stably_projectionless else None
    counts = {}
    for kind in HALF_KINDS:
        loops = [(kind.value, q, p, k, y) for q in spec.targets
                 for k in range(spec.multiplicity(kind, q, p, grave))]
        loops = [e for e in loops if e in mid.dual.y_block_of]
        if len(loops) >= 9:
            return loops[:9]
        counts[kind.value] = len(loops)
    raise ConditionError("nop1", f"only {counts} constant entries over {y!r}, nine of one kind needed",
                         witness=(y, counts))


def _spread_ends(tower: Tower, mid: TowerStage, top: TowerStage, loop: Tuple,
                 kind: BlockKind, r: int) -> Dict[Hashable, Tuple]:
    """Distinct side-r ends of ``kind`` entries over ``loop``, first entry per end."""
    spec = tower.connector
    p = mid.dual.y_block_of[loop]
    grave = mid.meta.grave if tower.family.stably_projectionless else None
    b = top.dual.b(r)
    found: Dict[Hashable, Tuple] = {}
    for q in spec.targets:
        for k in range(spec.multiplicity(kind, q, p, grave)):
            e = (kind.value, q, p, k, loop)
            if e in b:
                found.setdefault(b[e], e)
    return found


def _branch_set(ends: List[Dict[Hashable, Tuple]], side: str) -> List[Hashable]:
    common = set(ends[0])
    for found in ends[1:]:
        common &= set(found)
    if len(common) < 3:
        raise ConditionError("nop2", f"the constant loops share only {len(common)} {side} ends, three needed",
                             witness=(side, sorted(common, key=repr)))
    return sorted(common, key=repr)[:3]


def _connecting_edge(top: TowerStage, a: Hashable, b: Hashable) -> Hashable:
    dual = top.dual
    for start, finish in ((a, b), (b, a)):
        edge = ("fcopy", start)
        if dual.b0.get(edge) == start and dual.b1.get(edge) == finish:
            return edge
    raise PathError(f"no embedded-copy edge joins {a!r} and {b!r}")


def _audit(tower: Tower, base: TowerStage, mid: TowerStage, top: TowerStage,
           certificate: K33Certificate) -> List[str]:
    maps = [ConnectorMap(mid, top, tower.connector), ConnectorMap(base, mid, tower.connector)]
    lo, hi = certificate.interval
    points = [("v", v) for path in certificate.witness.paths.values() for v in path]
    points += [("e", t, e) for edges in certificate.edges.values() for e in edges
               for t in (Fraction(1, 4), HALF, Fraction(3, 4))]
    problems = []
    for point in points:
        image = compose_projection(maps, point)
        if image[0] != "e" or image[2] != certificate.edge or not lo < image[1] < hi:
            problems.append(f"{point!r} projects to {image!r}, outside the basic open set")
    return problems


def _local_graph(certificate: K33Certificate) -> TopGraph:
    graph = TopGraph()
    for (a, b), path in certificate.witness.paths.items():
        for vertex in path:
            graph.add_vertex(vertex)
        for e, (u, v) in zip(certificate.edges[(a, b)], zip(path, path[1:])):
            graph.add_edge(e, u, v)
    return graph


def k33_witness(tower: Tower, n: int, basic_open: Tuple[Tuple, Hashable],
                graph: Optional[TopGraph] = None) -> K33Certificate:
    """Subdivided K_{3,3} at level n+2 over the basic open set ``I x {y}`` of level n.

    Nine constant-1/2 entries over y are loops at one embedded copy vertex c
    of level n+1. Over each loop, a lower entry leaves a factor vertex over c
    on side 0, the embedded-copy edge crosses between the loop's two copy
    vertices, and an upper entry arrives at a factor vertex over c on side 1.
    The three side-0 and three side-1 factor vertices are the branch vertices.

    ``graph`` may pass a prebuilt spectrum of level n+2 for the re-check.

    Raises:
        PreconditionError: I misses 1/2, unknown y, or levels n..n+2 not built
        ConditionError: 'nop1' or 'nop2' fails over y, or the result fails its re-check
    """
    (lo, hi), y = basic_open
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < HALF < hi:
        raise PreconditionError(f"interval ({lo}, {hi}) does not contain 1/2")
    if tower.family.construction != Flavor.PATH:
        raise PreconditionError("K33 witnesses are built on path-flavor towers")
    if n < 1 or n + 2 > tower.depth:
        raise PreconditionError(f"level {n} needs stages up to {n + 2}, tower has {tower.depth}")
    base, mid, top = tower.stage(n), tower.stage(n + 1), tower.stage(n + 2)
    if y not in base.dual.y_block_of:
        raise PreconditionError(f"{y!r} is not an element of Y_{n}")

    loops = _constant_loops(tower, base, mid, y)
    lower_ends = [_spread_ends(tower, mid, top, loop, BlockKind.LOWER, 0) for loop in loops]
    upper_ends = [_spread_ends(tower, mid, top, loop, BlockKind.UPPER, 1) for loop in loops]
    left = _branch_set(lower_ends, "lower")
    right = _branch_set(upper_ends, "upper")

    paths: Dict[Tuple, List[Hashable]] = {}
    edges: Dict[Tuple, List[Hashable]] = {}
    for index, loop in enumerate(loops):
        a, b = left[index // 3], right[index % 3]
        leave, arrive = lower_ends[index][a], upper_ends[index][b]
        u, v = top.dual.b1[leave], top.dual.b0[arrive]
        cross = _connecting_edge(top, u, v)
        paths[(a, b)] = [a, u, v, b]
        edges[(a, b)] = [leave, cross, arrive]

    witness = K33Witness(left=tuple(left), right=tuple(right), paths=paths)
    certificate = K33Certificate(base_level=n, level=n + 2, edge=y, interval=(lo, hi),
                                 witness=witness, edges=edges)
    problems = verify_k33(graph or spec_b_gen(top), witness) + _audit(tower, base, mid, top, certificate)
    if not find_k33(_local_graph(certificate)).found:
        problems.append("subdivision search finds no K33 in the witness subgraph")
    if problems:
        logger.error(f"K33 witness over {y!r} failed its re-check: {problems[:3]}")
        raise ConditionError("k33", f"witness over {y!r} failed its re-check: {problems[0]}", witness=problems)
    logger.info(f"K33 witness at level {n + 2} over {y!r}")
    return certificate
