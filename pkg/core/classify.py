"""
Conjugacy of diagonals in model form.

Two model diagonals are compared after reduction and decomposition: each
summand becomes a vertex-coloured graph encoding its twisted graphs (one
node per block, two side nodes per block, one node per edge class and per
X element) so that colour-preserving isomorphisms are exactly the
certificates (rho, kappa, o, Theta, Xi).
"""
import time
from collections import Counter
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from core.nccw import dualize, twisted_ends, validate_nccw
from core.reduction import decompose, restrict_twist, to_reduced_form
from models.dual import DualData, TwistPerm
from models.errors import PreconditionError
from models.nccw import NccwData
from models.results import ConjugacyCertificate, Decision, RigidityReport, Verdict
from models.topgraph import TopGraph, VertexKind
from utils.logger import get_logger
from utils.metrics import record_decision, record_search_duration

logger = get_logger(__name__)


class _SummandGraph:
    """Coloured graph of one summand plus the element lists behind each edge class."""

    def __init__(self, data: NccwData, twist: TwistPerm):
        self.data = data
        self.dual: DualData = dualize(data)
        self.tail, self.head = twisted_ends(self.dual, twist)
        self.classes: Dict[Hashable, List[Hashable]] = {}
        self.graph = self._build()

    def _build(self) -> nx.Graph:
        graph = nx.Graph()
        for i, size in self.data.i_blocks.items():
            graph.add_node(("I", i), color=("I", size))
        for x in self.dual.X:
            graph.add_node(("X", x), color=("X",))
            graph.add_edge(("X", x), ("I", self.dual.x_block_of[x]))
        for p, block in self.dual.y_blocks.items():
            graph.add_node(("P", p), color=("P", len(block)))
            for side in (0, 1):
                graph.add_node(("S", p, side), color=("S",))
                graph.add_edge(("S", p, side), ("P", p))
            for y in block:
                key = ("E", p, self.tail.get(y), self.head.get(y))
                self.classes.setdefault(key, []).append(y)
        for key, members in self.classes.items():
            _, p, tail, head = key
            graph.add_node(key, color=("E", len(members)))
            for side, end in ((0, tail), (1, head)):
                half = ("H", key, side)
                graph.add_node(half, color=("H",))
                graph.add_edge(half, key)
                graph.add_edge(half, ("S", p, side))
                if end is not None:
                    graph.add_edge(half, ("X", end))
        return graph

    def sizes(self) -> Tuple:
        return (tuple(sorted(self.data.p_blocks.values())), tuple(sorted(self.data.i_blocks.values())))

    def degree_profile(self) -> Tuple:
        """Per block, the unordered pair of (out-degree, in-degree) multisets over X."""
        profile = []
        for p, block in self.dual.y_blocks.items():
            outs = Counter(self.tail[y] for y in block if y in self.tail)
            ins = Counter(self.head[y] for y in block if y in self.head)
            out_seq = tuple(sorted(outs.get(x, 0) for x in self.dual.X))
            in_seq = tuple(sorted(ins.get(x, 0) for x in self.dual.X))
            profile.append(tuple(sorted([out_seq, in_seq])))
        return tuple(sorted(profile))

    def twin_profile(self) -> Tuple:
        """Per block, sizes of classes of X elements with identical out- resp. in-neighbourhoods."""
        profile = []
        for p, block in self.dual.y_blocks.items():
            sides = []
            for ends, other in ((self.tail, self.head), (self.head, self.tail)):
                neighbours: Dict[Hashable, Counter] = {}
                for y in block:
                    if y in ends:
                        neighbours.setdefault(ends[y], Counter())[other.get(y)] += 1
                groups = Counter(frozenset(c.items()) for c in neighbours.values())
                sides.append(tuple(sorted(n for n in groups.values() if n > 1)))
            profile.append(tuple(sorted(sides)))
        return tuple(sorted(profile))

    def components(self) -> int:
        """Connected components of the spectrum graph (edges Y, vertices X)."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.dual.X)
        for y in self.dual.Y:
            tail = self.tail.get(y, ("free", 0, y))
            head = self.head.get(y, ("free", 1, y))
            graph.add_edge(tail, head)
        return nx.number_connected_components(graph)

    def certificate_to(self, other: "_SummandGraph", mapping: Dict) -> ConjugacyCertificate:
        rho, kappa, xi, theta, orientation = {}, {}, {}, {}, {}
        for node, image in mapping.items():
            kind = node[0]
            if kind == "P":
                rho[node[1]] = image[1]
            elif kind == "I":
                kappa[node[1]] = image[1]
            elif kind == "X":
                xi[node[1]] = image[1]
            elif kind == "S" and node[2] == 0:
                orientation[node[1]] = 1 if image[2] == 0 else -1
            elif kind == "E":
                for y, z in zip(self.classes[node], other.classes[image]):
                    theta[y] = z
        return ConjugacyCertificate(rho=rho, kappa=kappa, theta=theta, xi=xi, orientation=orientation)


def _screen(a: _SummandGraph, b: _SummandGraph) -> Optional[str]:
    """Name of the first invariant telling the summands apart, if any."""
    if a.sizes() != b.sizes():
        return f"block sizes differ ({a.sizes()} vs {b.sizes()})"
    if a.components() != b.components():
        return f"twisted graphs have different component counts ({a.components()} vs {b.components()})"
    if a.degree_profile() != b.degree_profile():
        return "degree multisets of the twisted graphs differ"
    if a.twin_profile() != b.twin_profile():
        return (f"twin-vertex profiles differ ({list(a.twin_profile())} vs "
                f"{list(b.twin_profile())})")
    return None


def _summand_graphs(data: NccwData, twist: TwistPerm) -> List[_SummandGraph]:
    return [
        _SummandGraph(summand.data, restrict_twist(twist, summand.p_labels))
        for summand in decompose(data)
    ]


def decide_conjugacy(
    data: NccwData,
    sigma: TwistPerm,
    tau: TwistPerm,
    data_tau: Optional[NccwData] = None,
) -> Decision:
    """Decide whether (A, B_sigma) and (A', B_tau) are conjugate.

    Args:
        data: Boundary data of the sigma side
        sigma: Twist of the first diagonal
        tau: Twist of the second diagonal
        data_tau: Boundary data of the tau side (defaults to ``data``)

    Returns:
        Decision with a verified certificate relative to the reduced
        instances, or with the obstruction found first
    """
    data_tau = data if data_tau is None else data_tau
    red_a, sig_a, _ = to_reduced_form(data, sigma)
    red_b, tau_b, _ = to_reduced_form(data_tau, tau)
    reduced = (red_a, sig_a, red_b, tau_b)

    parts_a = _summand_graphs(red_a, sig_a)
    parts_b = _summand_graphs(red_b, tau_b)
    if len(parts_a) != len(parts_b):
        return _not_conjugate(f"different number of direct summands ({len(parts_a)} vs {len(parts_b)})", reduced)

    start = time.monotonic()
    used = set()
    pieces: List[ConjugacyCertificate] = []
    for index, part in enumerate(parts_a):
        obstruction = None
        matched = False
        for other_index, other in enumerate(parts_b):
            if other_index in used:
                continue
            reason = _screen(part, other)
            if reason is not None:
                obstruction = obstruction or reason
                continue
            mapping = nx.vf2pp_isomorphism(part.graph, other.graph, node_label="color")
            if mapping is None:
                obstruction = obstruction or "no colour-preserving isomorphism of the twisted graphs"
                continue
            used.add(other_index)
            pieces.append(part.certificate_to(other, mapping))
            matched = True
            break
        if not matched:
            record_search_duration(time.monotonic() - start)
            return _not_conjugate(f"summand {index} ({part.data.P}): {obstruction}", reduced)
    record_search_duration(time.monotonic() - start)

    certificate = _merge(pieces)
    problems = verify_certificate(red_a, sig_a, certificate, red_b, tau_b)
    if problems:
        logger.error(f"Extracted certificate failed verification: {problems[:3]}")
        raise RuntimeError(f"certificate verification failed: {problems[0]}")
    record_decision("graph", Verdict.CONJUGATE.value)
    logger.info(f"Diagonals conjugate ({len(pieces)} summands matched)")
    return Decision(verdict=Verdict.CONJUGATE, method="graph", certificate=certificate, reduced=reduced)


def _not_conjugate(obstruction: str, reduced) -> Decision:
    record_decision("graph", Verdict.NOT_CONJUGATE.value)
    logger.info(f"Diagonals not conjugate: {obstruction}")
    return Decision(verdict=Verdict.NOT_CONJUGATE, method="graph", obstruction=obstruction, reduced=reduced)


def _merge(pieces: List[ConjugacyCertificate]) -> ConjugacyCertificate:
    merged = ConjugacyCertificate(rho={}, kappa={}, theta={}, xi={}, orientation={})
    for piece in pieces:
        merged.rho.update(piece.rho)
        merged.kappa.update(piece.kappa)
        merged.theta.update(piece.theta)
        merged.xi.update(piece.xi)
        merged.orientation.update(piece.orientation)
    return merged


def verify_certificate(
    data: NccwData,
    sigma: TwistPerm,
    certificate: ConjugacyCertificate,
    data_tau: Optional[NccwData] = None,
    tau: Optional[TwistPerm] = None,
) -> List[str]:
    """Re-check a certificate edge by edge; returns the list of violations."""
    data_tau = data if data_tau is None else data_tau
    tau = sigma if tau is None else tau
    dual_a, dual_b = dualize(data), dualize(data_tau)
    tail_a, head_a = twisted_ends(dual_a, sigma)
    tail_b, head_b = twisted_ends(dual_b, tau)
    c = certificate
    problems = []

    if sorted(c.rho) != sorted(data.p_blocks) or sorted(c.rho.values()) != sorted(data_tau.p_blocks):
        problems.append("rho is not a bijection of block labels")
    if sorted(c.kappa) != sorted(data.i_blocks) or sorted(c.kappa.values()) != sorted(data_tau.i_blocks):
        problems.append("kappa is not a bijection of block labels")
    if problems:
        return problems
    for p, q in c.rho.items():
        if data.p_blocks[p] != data_tau.p_blocks[q]:
            problems.append(f"rho({p}) = {q} changes the block size")
        if c.orientation.get(p) not in (1, -1):
            problems.append(f"orientation of {p} is not +1 or -1")
    for i, j in c.kappa.items():
        if data.i_blocks[i] != data_tau.i_blocks[j]:
            problems.append(f"kappa({i}) = {j} changes the block size")

    if set(c.xi) != set(dual_a.X) or len(set(c.xi.values())) != len(c.xi) or set(c.xi.values()) != set(dual_b.X):
        problems.append("Xi is not a bijection X -> X'")
        return problems
    for x, x_image in c.xi.items():
        if dual_b.x_block_of[x_image] != c.kappa[dual_a.x_block_of[x]]:
            problems.append(f"Xi({x}) = {x_image} leaves the block kappa({dual_a.x_block_of[x]})")

    if set(c.theta) != set(dual_a.Y) or len(set(c.theta.values())) != len(c.theta) \
            or set(c.theta.values()) != set(dual_b.Y):
        problems.append("Theta is not a bijection Y -> Y'")
        return problems

    for y, z in c.theta.items():
        p = dual_a.y_block_of[y]
        if dual_b.y_block_of[z] != c.rho[p]:
            problems.append(f"Theta({y}) = {z} leaves the block rho({p})")
            continue
        image_tail = c.xi.get(tail_a[y]) if y in tail_a else None
        image_head = c.xi.get(head_a[y]) if y in head_a else None
        if c.orientation[p] == 1:
            expected = (tail_b.get(z), head_b.get(z))
        else:
            expected = (head_b.get(z), tail_b.get(z))
        if (image_tail, image_head) != expected:
            problems.append(f"edge {y} -> {z} breaks the commuting square (orientation {c.orientation[p]})")
    return problems


def invert_certificate(certificate: ConjugacyCertificate) -> ConjugacyCertificate:
    c = certificate
    return ConjugacyCertificate(
        rho={q: p for p, q in c.rho.items()},
        kappa={j: i for i, j in c.kappa.items()},
        theta={z: y for y, z in c.theta.items()},
        xi={x2: x for x, x2 in c.xi.items()},
        orientation={c.rho[p]: o for p, o in c.orientation.items()},
    )


def compose_certificates(first: ConjugacyCertificate, second: ConjugacyCertificate) -> ConjugacyCertificate:
    """Certificate of ``second`` after ``first``."""
    return ConjugacyCertificate(
        rho={p: second.rho[q] for p, q in first.rho.items()},
        kappa={i: second.kappa[j] for i, j in first.kappa.items()},
        theta={y: second.theta[z] for y, z in first.theta.items()},
        xi={x: second.xi[x2] for x, x2 in first.xi.items()},
        orientation={p: o * second.orientation[first.rho[p]] for p, o in first.orientation.items()},
    )


def rigidity_check(data: NccwData) -> RigidityReport:
    """Evaluate the hypotheses of the two rigidity theorems."""
    details = []
    abbz = True
    for r in (0, 1):
        for p in data.p_blocks:
            if len(data.incident(r, p)) > 1:
                abbz = False
                details.append(f"ABBZ: ({r},{p}) meets {len(data.incident(r, p))} indices")

    abb = True
    if not all(data.is_unital(r, p) for r in (0, 1) for p in data.p_blocks):
        abb = False
        details.append("ABB: some boundary map is not unital")
    for i in data.i_blocks:
        hits = [(r, p) for r in (0, 1) for p in data.p_blocks if data.m(r, p, i)]
        if len(hits) != 1:
            abb = False
            details.append(f"ABB: index {i} is hit by {len(hits)} ends")
    for r in (0, 1):
        for p in data.p_blocks:
            if len(data.incident(r, p)) != 1:
                abb = False
                details.append(f"ABB: end ({r},{p}) meets {len(data.incident(r, p))} indices")
    values = list(data.table().values())
    if any(value == 2 for value in values):
        abb = False
        details.append("ABB: a multiplicity equals 2")
    if len(set(values)) != len(values):
        abb = False
        details.append("ABB: multiplicity map is not injective")
    return RigidityReport(abbz=abbz, abb=abb, details=details)


def decide_via_spectrum(data: NccwData, sigma: TwistPerm, tau: TwistPerm) -> Decision:
    """Decide conjugacy by comparing diagonal spectra (rigid data only).

    Raises:
        PreconditionError: the rigidity hypotheses fail
    """
    from core.spectrum import graph_homeomorphic, spec_b

    report = rigidity_check(data)
    if not report.abb:
        raise PreconditionError(f"spectrum criterion inapplicable: {'; '.join(report.details)}")
    dual = dualize(data)
    result = graph_homeomorphic(spec_b(dual, sigma), spec_b(dual, tau))
    verdict = Verdict.CONJUGATE if result.homeomorphic else Verdict.NOT_CONJUGATE
    record_decision("spectrum", verdict.value)
    return Decision(verdict=verdict, method="spectrum", obstruction=result.reason)


def center_spectrum(data: NccwData) -> TopGraph:
    """Spectrum of the centre: one edge per p, ends glued through shared indices.

    An end whose gluing class contains a non-unital end is removed.
    """
    report = validate_nccw(data)
    if report.has_errors():
        raise PreconditionError("; ".join(report.errors))

    ends = [(r, p) for p in data.p_blocks for r in (0, 1)]
    gluing = nx.Graph()
    gluing.add_nodes_from(("end", end) for end in ends)
    gluing.add_edges_from((("end", (r, p)), ("I", i)) for r, p in ends for i in data.i_blocks if data.m(r, p, i))
    order = {end: k for k, end in enumerate(ends)}
    classes = sorted(
        (sorted((node[1] for node in component if node[0] == "end"), key=order.get)
         for component in nx.connected_components(gluing)),
        key=lambda members: order[members[0]],
    )
    vertex_of = {}
    graph = TopGraph()
    for members in classes:
        if all(data.is_unital(r, p) for r, p in members):
            vid = "z:" + "|".join(f"{r}{p}" for r, p in members)
            graph.add_vertex(vid, VertexKind.ANON)
            for end in members:
                vertex_of[end] = vid
    for p in data.p_blocks:
        graph.add_edge(p, vertex_of.get((0, p)), vertex_of.get((1, p)), block=p)
    return graph
