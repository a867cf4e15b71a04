"""
Dyadic paths over a single stage.

A spectrum point is either ``('v', x)`` for a vertex or ``('e', t, y)`` for
an interior point of the edge y. Points ``[t, y]`` with t in {0, 1} and a
defined end are normalized to the vertex b_t(y).
"""
import random
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from models.dual import DualData
from models.errors import PathError
from models.paths import STOP_VALUES, DyadicPath, StepKind, Token

HALF = Fraction(1, 2)
Point = Tuple


def normalize(dual: DualData, t, y: Hashable) -> Point:
    """Canonical form of the point [t, y].

    Raises:
        PathError: t outside [0, 1], unknown edge, or t at a free end
    """
    t = Fraction(t)
    if y not in dual.y_block_of:
        raise PathError(f"unknown edge {y!r}")
    if not 0 <= t <= 1:
        raise PathError(f"value {t} outside [0, 1]")
    if t in (0, 1):
        end = dual.b(int(t)).get(y)
        if end is None:
            raise PathError(f"[{t}, {y!r}] is a free end")
        return ("v", end)
    return ("e", t, y)


def vertex(x: Hashable) -> Point:
    return ("v", x)


def start_point(dual: DualData, path: DyadicPath) -> Point:
    first = path.tokens[0]
    return normalize(dual, first.start, first.edge)


def end_point(dual: DualData, path: DyadicPath) -> Point:
    last = path.tokens[-1]
    return normalize(dual, last.end, last.edge)


def _crosses_half(token: Token) -> bool:
    low, high = sorted((token.start, token.end))
    return low < HALF < high


def path_errors(dual: DualData, path: DyadicPath) -> List[str]:
    """Problems with a path; empty when it is continuous, monotone per token and visits a stop value."""
    errors = []
    if not path.tokens:
        return ["empty path"]
    for index, token in enumerate(path.tokens):
        if token.edge not in dual.y_block_of:
            errors.append(f"token {index} uses unknown edge {token.edge!r}")
            continue
        for value in (token.start, token.end):
            if not 0 <= value <= 1:
                errors.append(f"token {index} leaves [0, 1]")
            elif value in (0, 1) and token.edge not in dual.b(int(value)):
                errors.append(f"token {index} reaches the free end [{value}, {token.edge!r}]")
        if _crosses_half(token):
            errors.append(f"token {index} moves across 1/2 without stopping")
    if errors:
        return errors

    for index, (prev, token) in enumerate(zip(path.tokens, path.tokens[1:]), start=1):
        if normalize(dual, prev.end, prev.edge) != normalize(dual, token.start, token.edge):
            errors.append(f"tokens {index - 1} and {index} do not meet")
        elif prev.kind == StepKind.MOVE and token.kind == StepKind.MOVE and prev.end in STOP_VALUES:
            errors.append(f"tokens {index - 1} and {index} pass the stop value {prev.end} without a STAY")
    if not path.has_stop:
        errors.append("path never stays at 0, 1/2 or 1")
    if path.starts_moving and path.tokens[0].kind != StepKind.MOVE:
        errors.append("path must start with a MOVE")
    return errors


def is_valid(dual: DualData, path: DyadicPath) -> bool:
    return not path_errors(dual, path)


def regularize(tokens: List[Token], provenance: Optional[List[int]] = None) -> Tuple[List[Token], Optional[List[int]]]:
    """Split moves at 1/2 and insert a STAY wherever two moves meet at a stop value."""
    out: List[Token] = []
    prov: List[int] = []
    tags = provenance if provenance is not None else [0] * len(tokens)

    def push(token: Token, tag: int) -> None:
        if out and out[-1].kind == StepKind.MOVE and token.kind == StepKind.MOVE and out[-1].end in STOP_VALUES:
            out.append(Token.stay(out[-1].edge, out[-1].end))
            prov.append(prov[-1])
        out.append(token)
        prov.append(tag)

    for token, tag in zip(tokens, tags):
        if _crosses_half(token):
            push(Token.move(token.edge, token.start, HALF), tag)
            push(Token.move(token.edge, HALF, token.end), tag)
        else:
            push(token, tag)
    return out, (prov if provenance is not None else None)


def ensure_stop(tokens: List[Token]) -> List[Token]:
    """Add a STAY at the first stop value the path touches, if it has none."""
    if any(token.is_stop for token in tokens):
        return tokens
    for index, token in enumerate(tokens):
        if token.start in STOP_VALUES:
            return tokens[:index] + [Token.stay(token.edge, token.start)] + tokens[index:]
        if token.end in STOP_VALUES:
            return tokens[:index + 1] + [Token.stay(token.edge, token.end)] + tokens[index + 1:]
    raise PathError("path touches no stop value")


def incidence(dual: DualData) -> Dict[Hashable, List[Tuple[Hashable, int]]]:
    """x -> list of (y, side) with b_side(y) = x."""
    result: Dict[Hashable, List[Tuple[Hashable, int]]] = {x: [] for x in dual.X}
    for y in dual.Y:
        for side in (0, 1):
            end = dual.b(side).get(y)
            if end is not None:
                result[end].append((y, side))
    return result


def stage_graph(dual: DualData) -> nx.MultiGraph:
    """Vertices X, one edge keyed by y for every y with both ends defined."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(dual.X)
    for y in dual.Y:
        if y in dual.b0 and y in dual.b1:
            graph.add_edge(dual.b0[y], dual.b1[y], key=y)
    return graph


def _exit(dual: DualData, point: Point) -> Tuple[Hashable, List[Token]]:
    """Vertex reached from ``point`` along its edge, and the tokens getting there."""
    if point[0] == "v":
        return point[1], []
    _, t, y = point
    side = 0 if (t <= HALF and y in dual.b0) or y not in dual.b1 else 1
    if y not in dual.b(side):
        raise PathError(f"edge {y!r} has no vertex to leave through")
    return dual.b(side)[y], [Token.move(y, t, side)]


def _reverse(tokens: List[Token]) -> List[Token]:
    return [Token(token.edge, token.end, token.start) for token in reversed(tokens)]


def _edge_walk(dual: DualData, graph: nx.MultiGraph, u: Hashable, w: Hashable) -> List[Token]:
    try:
        nodes = nx.shortest_path(graph, u, w)
    except nx.NetworkXNoPath as e:
        raise PathError(f"no path from {u!r} to {w!r}") from e
    tokens = []
    for a, b in zip(nodes, nodes[1:]):
        y = next(iter(graph[a][b]))
        if dual.b0[y] == a and dual.b1[y] == b:
            tokens.append(Token.move(y, 0, 1))
        else:
            tokens.append(Token.move(y, 1, 0))
    return tokens


def connect_points(dual: DualData, a: Point, b: Point, graph: Optional[nx.MultiGraph] = None) -> DyadicPath:
    """A valid path from a to b through the stage's closed edges.

    Raises:
        PathError: a and b lie in different components
    """
    if a == b:
        if a[0] == "v":
            edges = incidence(dual).get(a[1])
            if not edges:
                raise PathError(f"vertex {a[1]!r} has no incident edge")
            y, side = edges[0]
            return DyadicPath([Token.stay(y, side)])
        _, t, y = a
        if t == HALF:
            return DyadicPath([Token.stay(y, HALF)])
        return DyadicPath([Token.move(y, t, HALF), Token.stay(y, HALF), Token.move(y, HALF, t)])

    if a[0] == "e" and b[0] == "e" and a[2] == b[2]:
        y = a[2]
        tokens = [Token.move(y, a[1], HALF)] if a[1] != HALF else []
        tokens.append(Token.stay(y, HALF))
        if b[1] != HALF:
            tokens.append(Token.move(y, HALF, b[1]))
        return DyadicPath(tokens)

    u, head = _exit(dual, a)
    w, tail = _exit(dual, b)
    graph = graph if graph is not None else stage_graph(dual)
    tokens = head + _edge_walk(dual, graph, u, w) + _reverse(tail)
    if not tokens:
        raise PathError("degenerate connection")
    tokens, _ = regularize(tokens)
    return DyadicPath(ensure_stop(tokens))


def _dyadic_between(rng: random.Random, low: Fraction, high: Fraction, bits: int = 4) -> Fraction:
    scale = 2 ** bits
    lo, hi = int(low * scale), int(high * scale)
    if hi - lo < 2:
        return (low + high) / 2
    return Fraction(rng.randrange(lo + 1, hi), scale)


def random_path(dual: DualData, rng: random.Random, steps: int = 6, starts_moving: bool = False) -> DyadicPath:
    """Random valid path wandering over closed edges with dyadic stops."""
    closed = [y for y in dual.Y if y in dual.b0 and y in dual.b1]
    if not closed:
        raise PathError("stage has no closed edge")
    around = incidence(dual)
    y = rng.choice(closed)
    t = _dyadic_between(rng, Fraction(0), Fraction(1))
    if t == HALF:
        t = Fraction(1, 4)
    tokens: List[Token] = []
    for _ in range(steps):
        if t in STOP_VALUES:
            tokens.append(Token.stay(y, t))
            if t != HALF:
                choices = [(z, side) for z, side in around[dual.b(int(t))[y]] if z in dual.b0 and z in dual.b1]
                y, side = rng.choice(choices)
                t = Fraction(side)
            low, high = (Fraction(0), HALF) if t == 0 or (t == HALF and rng.random() < 0.5) else (HALF, Fraction(1))
            target = rng.choice([low, high, _dyadic_between(rng, low, high)])
            if target == t:
                target = _dyadic_between(rng, low, high)
        else:
            low, high = (Fraction(0), HALF) if t < HALF else (HALF, Fraction(1))
            target = rng.choice([low, high, _dyadic_between(rng, low, high)])
            if target == t:
                target = low if t != low else high
        tokens.append(Token.move(y, t, target))
        t = target
    if t in STOP_VALUES:
        tokens.append(Token.stay(y, t))
    tokens, _ = regularize(tokens)
    if not any(token.is_stop for token in tokens):
        target = HALF
        tokens.append(Token.move(y, t, target))
        tokens.append(Token.stay(y, target))
    if starts_moving and tokens[0].kind != StepKind.MOVE:
        tokens = tokens[1:]
    return DyadicPath(tokens, starts_moving=starts_moving)
