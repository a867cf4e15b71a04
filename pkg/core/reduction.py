"""Redundancy elimination and direct-sum decomposition of NCCW data."""
from typing import Dict, List, Optional, Tuple

import networkx as nx

from core.nccw import dualize, edge_table, realize
from models.dual import TwistPerm
from models.nccw import LayoutEntry, NccwData
from models.results import RewriteStep, Summand
from utils.logger import get_logger
from utils.metrics import record_reduction_step

logger = get_logger(__name__)

_SIDE_PAIRS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def find_redundancy(data: NccwData) -> Optional[RewriteStep]:
    """First redundant configuration (q, q_bar, j, r, s) in label order, if any.

    q is redundant through j when beta_r^{q_bar, j} and beta_s^{q, j} are
    isomorphisms, no other end touches F^j and no other block hits it.
    """
    for q in data.p_blocks:
        for q_bar in data.p_blocks:
            if q_bar == q:
                continue
            for j, size in data.i_blocks.items():
                if data.p_blocks[q] != size or data.p_blocks[q_bar] != size:
                    continue
                others = any(
                    data.m(r, p, j) for p in data.p_blocks if p not in (q, q_bar) for r in (0, 1)
                )
                if others:
                    continue
                for r, s in _SIDE_PAIRS:
                    if (data.m(r, q_bar, j) == 1 and data.m(s, q, j) == 1
                            and data.m(1 - r, q_bar, j) == 0 and data.m(1 - s, q, j) == 0):
                        return RewriteStep(q=q, q_bar=q_bar, j=j, r=r, s=s)
    return None


def _glue(step: RewriteStep, table: Dict[str, List[Tuple]], dual) -> List[Tuple]:
    """Concatenate the q_bar-edge and the q-edge meeting at each x of X^j."""
    glued = []
    for x in dual.x_blocks[step.j]:
        bar = next(edge for edge in table[step.q_bar] if edge[step.r] == x)
        other = next(edge for edge in table[step.q] if edge[step.s] == x)
        if step.r == 0 and step.s == 0:
            glued.append((bar[1], other[1]))
        elif step.r == 0 and step.s == 1:
            glued.append((other[0], bar[1]))
        elif step.r == 1 and step.s == 1:
            glued.append((bar[0], other[0]))
        else:
            glued.append((bar[0], other[1]))
    return glued


def to_reduced_form(data: NccwData, twist: TwistPerm) -> Tuple[NccwData, TwistPerm, List[RewriteStep]]:
    """Eliminate redundant indices one at a time until none is left.

    Returns:
        Reduced data, the transported twist and the log of rewrite steps
    """
    log: List[RewriteStep] = []
    step = find_redundancy(data)
    while step is not None:
        dual = dualize(data)
        table = edge_table(dual, twist)
        table[step.q_bar] = _glue(step, table, dual)
        del table[step.q]

        p_blocks = {p: size for p, size in data.p_blocks.items() if p != step.q}
        referenced = {x[0] for edges in table.values() for edge in edges for x in edge if x is not None}
        i_blocks = {i: size for i, size in data.i_blocks.items() if i in referenced}
        data, twist, _ = realize(p_blocks, i_blocks, table)

        log.append(step)
        record_reduction_step()
        logger.debug(f"Eliminated redundant block {step.q} into {step.q_bar} through {step.j} "
                     f"(case {step.case})")
        step = find_redundancy(data)
    return data, twist, log


def decompose(data: NccwData) -> List[Summand]:
    """Split data along the classes of P generated by shared i's."""
    incidence = nx.Graph()
    incidence.add_nodes_from(("P", p) for p in data.p_blocks)
    incidence.add_edges_from(
        (("P", p), ("I", i)) for p in data.p_blocks for i in data.i_blocks
        if data.m(0, p, i) or data.m(1, p, i)
    )
    order = {p: k for k, p in enumerate(data.p_blocks)}
    classes = sorted(
        (sorted((node[1] for node in component if node[0] == "P"), key=order.get)
         for component in nx.connected_components(incidence)),
        key=lambda members: order[members[0]],
    )

    summands = []
    for members in classes:
        i_labels = [
            i for i in data.i_blocks
            if any(data.m(r, p, i) for p in members for r in (0, 1))
        ]
        mult = {key: value for key, value in data.table().items() if key[1] in members}
        part = NccwData.from_table(
            {p: data.p_blocks[p] for p in members},
            {i: data.i_blocks[i] for i in i_labels},
            mult,
        )
        part.layout = [LayoutEntry(**entry.model_dump()) for entry in data.layout if entry.p in members]
        summands.append(Summand(data=part, p_labels=members, i_labels=i_labels))
    logger.debug(f"Decomposed data into {len(summands)} summands")
    return summands


def restrict_twist(twist: TwistPerm, p_labels: List[str]) -> TwistPerm:
    return TwistPerm({p: perm for p, perm in twist.perms.items() if p in p_labels})
