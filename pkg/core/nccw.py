"""Validation and dual combinatorics of NCCW boundary data."""
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from models.dual import DualBuilder, DualData, TwistPerm
from models.errors import PreconditionError
from models.nccw import NccwData
from models.results import ValidationReport
from utils.logger import get_logger

logger = get_logger(__name__)

End = Optional[Hashable]


def validate_nccw(data: NccwData) -> ValidationReport:
    """Check block sizes, multiplicities, layouts and assumption (A2).

    Structural problems are collected in the report, never raised.
    """
    report = ValidationReport()

    for p, size in data.p_blocks.items():
        if size <= 0:
            report.errors.append(f"Block size {{{p}}} = {size} must be positive")
    for i, size in data.i_blocks.items():
        if size <= 0:
            report.errors.append(f"Block size [{i}] = {size} must be positive")
    for entry in data.mult:
        if entry.p not in data.p_blocks:
            report.errors.append(f"Multiplicity refers to unknown block p='{entry.p}'")
        if entry.i not in data.i_blocks:
            report.errors.append(f"Multiplicity refers to unknown block i='{entry.i}'")
        if entry.count < 0:
            report.errors.append(f"Multiplicity m_{entry.r}({entry.p},{entry.i}) = {entry.count} is negative")
    if report.errors:
        return report

    for r in (0, 1):
        for p, size in data.p_blocks.items():
            total = data.image_size(r, p)
            report.slot_totals[(r, p)] = total
            report.unital[(r, p)] = total == size
            if total > size:
                report.errors.append(
                    f"beta_{r}^{p} needs {total} diagonal slots but E^{p} has only {size}"
                )

    seen_layouts = set()
    for entry in data.layout:
        key = (entry.r, entry.p)
        if entry.p not in data.p_blocks or entry.r not in (0, 1):
            report.errors.append(f"Layout entry for unknown (r,p) = {key}")
            continue
        if key in seen_layouts:
            report.errors.append(f"Duplicate layout entry for (r,p) = {key}")
        seen_layouts.add(key)
        report.errors.extend(_layout_errors(data, entry.r, entry.p, entry.slots))

    for i in data.i_blocks:
        hits = [(r, p) for r in (0, 1) for p in data.p_blocks if data.m(r, p, i) > 0]
        report.incidence[i] = hits
        if not hits:
            report.a2_ok = False
            report.errors.append(f"(A2) violated: F^{i} lies in the kernel of beta_0 + beta_1")

    non_unital = [key for key, ok in report.unital.items() if not ok]
    if len(non_unital) == 1 and non_unital[0][0] == 1:
        report.grave = non_unital[0][1]
    elif non_unital:
        report.warnings.append(f"Non-unital boundary maps: {sorted(non_unital)}")

    logger.debug(f"Validated data with {len(data.p_blocks)} p-blocks and {len(data.i_blocks)} i-blocks: "
                 f"{report.status}")
    return report


def _layout_errors(data: NccwData, r: int, p: str, slots: List[int]) -> List[str]:
    errors = []
    expected = data.image_size(r, p)
    if len(slots) != expected:
        errors.append(f"Layout for (r,p)=({r},{p}) has {len(slots)} slots, expected {expected}")
        return errors
    if any(not 0 <= slot < data.p_blocks[p] for slot in slots):
        errors.append(f"Layout for (r,p)=({r},{p}) uses a slot outside E^{p}")
    if len(set(slots)) != len(slots):
        errors.append(f"Layout collision for (r,p)=({r},{p})")
    pos = 0
    for i, _copy in data.image_blocks(r, p):
        block = slots[pos:pos + data.i_blocks[i]]
        if any(a >= b for a, b in zip(block, block[1:])):
            errors.append(f"Layout for (r,p)=({r},{p}) is not order-preserving inside an ({i}) block")
            break
        pos += data.i_blocks[i]
    return errors


def dualize(data: NccwData) -> DualData:
    """Build Y, X and the partial maps b_0, b_1 from the slot layout.

    Elements are Y = (p, slot) and X = (i, k).

    Raises:
        PreconditionError: data does not validate
    """
    report = validate_nccw(data)
    if report.has_errors():
        logger.error(f"Cannot dualize invalid data: {report.errors}")
        raise PreconditionError("; ".join(report.errors))

    builder = DualBuilder()
    for i, size in data.i_blocks.items():
        builder.add_x_block(i, [(i, k) for k in range(size)])
    for p, size in data.p_blocks.items():
        builder.add_y_block(p)
        for slot in range(size):
            builder.add_y(p, (p, slot))

    for r in (0, 1):
        for p in data.p_blocks:
            slots = data.layout_for(r, p) or list(range(data.image_size(r, p)))
            pos = 0
            for i, copy in data.image_blocks(r, p):
                for k in range(data.i_blocks[i]):
                    builder.set_end(r, (p, slots[pos]), (i, k), (p, i, copy))
                    pos += 1
    return builder.build()


def twisted_ends(dual: DualData, twist: TwistPerm) -> Tuple[Dict, Dict]:
    """Return (tail, head) with tail = b_0 and head = b_1 o twist, both partial."""
    head = {}
    for y in dual.Y:
        z = twist(y)
        if z in dual.b1:
            head[y] = dual.b1[z]
    return dict(dual.b0), head


def twisted_graphs(dual: DualData, twist: TwistPerm) -> Dict[str, nx.MultiDiGraph]:
    """Directed multigraph per p with edges Y^p, source b_0 and target b_1 o sigma.

    A missing endpoint is replaced by a synthetic node ``('free', r, y)`` of
    kind 'free' and the edge is marked ``half_open``.
    """
    tail, head = twisted_ends(dual, twist)
    graphs = {}
    for p, block in dual.y_blocks.items():
        graph = nx.MultiDiGraph(block=p)
        for i, xs in dual.x_blocks.items():
            graph.add_nodes_from(xs, kind="x", block=i)
        for y in block:
            source = tail.get(y)
            target = head.get(y)
            half_open = source is None or target is None
            if source is None:
                source = ("free", 0, y)
                graph.add_node(source, kind="free", block=None)
            if target is None:
                target = ("free", 1, y)
                graph.add_node(target, kind="free", block=None)
            graph.add_edge(source, target, key=y, label=y, half_open=half_open)
        graphs[p] = graph
    return graphs


def realize(
    p_blocks: Dict[str, int],
    i_blocks: Dict[str, int],
    edge_tables: Dict[str, Sequence[Tuple[End, End]]],
) -> Tuple[NccwData, TwistPerm, DualData]:
    """Rebuild canonical data and a twist from per-block (tail, head) edge lists.

    Tails and heads are X elements ``(i, k)`` or None for a free end. The
    returned twist realizes the edge list: for a bijection of edges onto
    Y^p, b_0(y) is the edge's tail and b_1(sigma(y)) its head.

    Raises:
        PreconditionError: the edge tables are not uniform over some X^i
    """
    mult: Dict[Tuple[int, str, str], int] = {}
    for p, edges in edge_tables.items():
        for r in (0, 1):
            hits: Dict[Hashable, int] = {}
            for edge in edges:
                if edge[r] is not None:
                    hits[edge[r]] = hits.get(edge[r], 0) + 1
            for i, size in i_blocks.items():
                counts = {hits.get((i, k), 0) for k in range(size)}
                if len(counts) != 1:
                    raise PreconditionError(f"Edges of block {p} hit X^{i} non-uniformly on side {r}")
                count = counts.pop()
                if count:
                    mult[(r, p, i)] = count

    data = NccwData.from_table(p_blocks, i_blocks, mult)
    dual = dualize(data)

    mapping = {}
    for p, edges in edge_tables.items():
        unused_y = list(dual.y_blocks[p])
        unused_z = list(dual.y_blocks[p])
        for tail, head in edges:
            y = next(v for v in unused_y if dual.b0.get(v) == tail)
            unused_y.remove(y)
            z = next(v for v in unused_z if dual.b1.get(v) == head)
            unused_z.remove(z)
            mapping[y] = z
    return data, TwistPerm.from_mapping(dual, mapping), dual


def edge_table(dual: DualData, twist: TwistPerm) -> Dict[str, List[Tuple[End, End]]]:
    """Per-block list of (tail, head) of the twisted edges, in Y order."""
    tail, head = twisted_ends(dual, twist)
    return {p: [(tail.get(y), head.get(y)) for y in block] for p, block in dual.y_blocks.items()}
