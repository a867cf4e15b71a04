"""Lifting dyadic paths through one connecting map."""
from dataclasses import dataclass
from typing import Hashable, List, Optional, Tuple

from core.connector import ConnectorMap, element_kind
from core.paths import HALF, Point, connect_points, end_point, normalize, path_errors, regularize, start_point
from core.tower import factor_vertex
from models.errors import PathError, PreconditionError
from models.paths import STOP_VALUES, DyadicPath, StepKind, Token
from models.tower import BlockKind, Flavor, Tower, lam_inverse
from utils.logger import get_logger
from utils.metrics import record_lift

logger = get_logger(__name__)

_UPPER_HALF = (BlockKind.UPPER, BlockKind.UPPER_REV)
_LOWER_HALF = (BlockKind.LOWER, BlockKind.LOWER_REV)


@dataclass
class _Piece:
    """Maximal run of moving tokens on one edge, or of stops."""
    plateau: bool
    indices: List[int]


def _segments(path: DyadicPath) -> List[_Piece]:
    pieces: List[_Piece] = []
    for index, token in enumerate(path.tokens):
        plateau = token.is_stop
        if pieces and pieces[-1].plateau == plateau and (
                plateau or path.tokens[pieces[-1].indices[-1]].edge == token.edge):
            pieces[-1].indices.append(index)
        else:
            pieces.append(_Piece(plateau, [index]))
    return pieces


class _Lifter:
    def __init__(self, base: DyadicPath, conn: ConnectorMap, alternate: bool):
        self.base = base
        self.conn = conn
        self.upper = conn.upper.dual
        self.lower = conn.lower.dual
        self.width = conn.spec.factor_width
        self.alternate = alternate
        self.tokens: List[Token] = []
        self.prov: List[int] = []

    def emit(self, tokens: List[Token], tag: int) -> None:
        self.tokens.extend(tokens)
        self.prov.extend([tag] * len(tokens))

    # -- choices -----------------------------------------------------------

    def candidates(self, first: Token) -> List[Tuple]:
        """Affine entries over the run's edge, in (kind, target, copy) order."""
        y = first.edge
        values = (first.start, first.end)
        kinds = _UPPER_HALF if min(values) >= HALF and max(values) > HALF else _LOWER_HALF
        p = self.lower.y_block_of[y]
        grave = self.conn.lower.meta.grave
        found = []
        for kind in kinds:
            for q in self.conn.spec.targets:
                for k in range(self.conn.spec.multiplicity(kind, q, p, grave)):
                    e = (kind.value, q, p, k, y)
                    if e in self.upper.y_block_of:
                        found.append(e)
        return found

    def choose(self, piece: _Piece, forced: Optional[Point], must_start_at: Optional[Point]) -> Tuple:
        run = [self.base.tokens[i] for i in piece.indices]
        options = self.candidates(run[0])
        if not options:
            raise PathError(f"no affine entry over {run[0].edge!r}")
        if forced is not None:
            _, t, e = forced
            if e not in options or lam_inverse(element_kind(e), run[0].start) != t:
                raise PathError(f"lift endpoint {forced!r} does not lie over the base path's start")
            return e
        if must_start_at is not None:
            options = [e for e in options
                       if normalize(self.upper, lam_inverse(element_kind(e), run[0].start), e) == must_start_at]
            if not options:
                raise PathError(f"no lift of the first run starts at {must_start_at!r}")
        if self.alternate and len(options) > 1:
            return options[1]
        return options[0]

    # -- bridges -----------------------------------------------------------

    def bridge(self, a: Hashable, b: Hashable, always_stop: bool) -> List[Token]:
        """Tokens from vertex a to vertex b inside the fibre over their common image."""
        if a == b:
            return [Token.stay(("fcopy", a), 0)] if always_stop else []
        image = self.conn.project_vertex(a)
        if image != self.conn.project_vertex(b):
            raise PathError(f"cannot bridge {a!r} and {b!r}: different base points")
        if a[0] == "copy":
            if not self.alternate:
                return [Token.stay(("fcopy", a), 0), Token.move(("fcopy", a), 0, 1)]
            return [Token.stay(("fcopy", b), 1), Token.move(("fcopy", b), 1, 0)]
        period = 2 * self.width
        here = a[1] * self.width + a[2]
        there = b[1] * self.width + b[2]
        step = 1 if self.alternate else -1
        tokens: List[Token] = [Token.stay(("fcopy", a), 0)]
        while here != there:
            nxt = (here + step) % period
            if step < 0:
                edge = ("fcopy", factor_vertex(here, a[3], self.width))
                tokens.append(Token.move(edge, 0, 1))
            else:
                edge = ("fcopy", factor_vertex(nxt, a[3], self.width))
                tokens.append(Token.move(edge, 1, 0))
            here = nxt
        return tokens

    # -- main loop ---------------------------------------------------------

    def lift(self, lift0: Point, lift1: Point) -> DyadicPath:
        pieces = _segments(self.base)
        tokens = self.base.tokens
        first_run_forced = lift0 if lift0[0] == "e" and tokens[0].start not in STOP_VALUES else None
        last_run_forced = lift1 if lift1[0] == "e" and tokens[-1].end not in STOP_VALUES else None

        current, lead = self._leave(lift0, forced=first_run_forced is not None)
        self.emit(lead, 0)
        plateau: List[int] = []
        for position, piece in enumerate(pieces):
            if piece.plateau:
                plateau.extend(piece.indices)
                continue
            is_first = position == 0
            is_last = position == len(pieces) - 1
            run = [tokens[i] for i in piece.indices]
            must_start = ("v", current) if is_first and self.base.starts_moving and current is not None else None
            e = self.choose(piece, first_run_forced if is_first else None, must_start)
            if is_last and last_run_forced is not None and last_run_forced[2] != e:
                raise PathError(f"lift endpoint {lift1!r} does not lie over the base path's end")
            kind = element_kind(e)
            start = normalize(self.upper, lam_inverse(kind, run[0].start), e)
            if not (is_first and first_run_forced is not None):
                self._cross(current, start[1], plateau, piece.indices[0])
            plateau = []
            for index, token in zip(piece.indices, run):
                self.emit([Token.move(e, lam_inverse(kind, token.start), lam_inverse(kind, token.end))
                           if token.kind == StepKind.MOVE else Token.stay(e, lam_inverse(kind, token.start))], index)
            end = normalize(self.upper, lam_inverse(kind, run[-1].end), e)
            current = end[1] if end[0] == "v" else None

        if last_run_forced is None:
            target, tail = self._enter(lift1)
            self._cross(current, target, plateau, len(tokens) - 1)
            self.emit(tail, len(tokens) - 1)

        out, prov = regularize(self.tokens, self.prov)
        return DyadicPath(out, starts_moving=self.base.starts_moving, provenance=prov)

    def _cross(self, a: Hashable, b: Hashable, plateau: List[int], fallback: int) -> None:
        """Bridge a -> b for the pending plateau; each further plateau token gets a stop at b."""
        if not plateau:
            self.emit(self.bridge(a, b, always_stop=False), fallback)
            return
        self.emit(self.bridge(a, b, always_stop=True), plateau[0])
        for index in plateau[1:]:
            self.emit([Token.stay(("fcopy", b), 0)], index)

    def _leave(self, point: Point, forced: bool) -> Tuple[Optional[Hashable], List[Token]]:
        if point[0] == "v":
            return point[1], []
        if forced:
            return None, []
        _, t, e = point
        return self.upper.b0[e], [Token.move(e, t, 0)]

    def _enter(self, point: Point) -> Tuple[Hashable, List[Token]]:
        if point[0] == "v":
            return point[1], []
        _, t, e = point
        return self.upper.b0[e], [Token.move(e, 0, t)]


def lift_path(base: DyadicPath, conn: ConnectorMap, lift0: Point, lift1: Point,
              alternate: bool = False) -> DyadicPath:
    """Lift a valid base path to a valid path one level up with the given endpoints.

    Moving runs are lifted along the least affine entry over their edge (the
    next one with ``alternate``); stops are replaced by walks inside the fibre
    over the stop point, through the embedded copy.

    Raises:
        PathError: malformed base path or endpoints not over the base endpoints
    """
    errors = path_errors(conn.lower.dual, base)
    if errors:
        raise PathError(f"malformed base path: {errors[0]}")
    if conn.project(lift0) != start_point(conn.lower.dual, base):
        raise PathError(f"lift0 {lift0!r} does not lie over the start of the base path")
    if conn.project(lift1) != end_point(conn.lower.dual, base):
        raise PathError(f"lift1 {lift1!r} does not lie over the end of the base path")
    lifted = _Lifter(base, conn, alternate).lift(lift0, lift1)
    problems = path_errors(conn.upper.dual, lifted) + projection_errors(conn, base, lifted)
    if problems:
        record_lift(False)
        logger.error(f"Lifted path failed its checks: {problems[:3]}")
        raise PathError(f"lifted path failed its checks: {problems[0]}")
    record_lift(True)
    return lifted


def projection_errors(conn: ConnectorMap, base: DyadicPath, lifted: DyadicPath) -> List[str]:
    """Each base token is traced exactly by the projections of the lifted tokens assigned to it."""
    if lifted.provenance is None or len(lifted.provenance) != len(lifted.tokens):
        return ["lifted path carries no provenance"]
    errors = []
    lower = conn.lower.dual
    for index, token in enumerate(base.tokens):
        assigned = [lifted.tokens[k] for k, tag in enumerate(lifted.provenance) if tag == index]
        if not assigned:
            errors.append(f"base token {index} is not covered")
            continue
        value = token.start
        for piece in assigned:
            image = conn.project_token(piece)
            if image[0] == "const":
                if image[1] != normalize(lower, value, token.edge):
                    errors.append(f"base token {index}: constant piece over {image[1]!r} off the trace")
                    break
            else:
                _, y, a, b = image
                if y != token.edge or a != value:
                    errors.append(f"base token {index}: moving piece {a}->{b} on {y!r} does not continue at {value}")
                    break
                value = b
        else:
            if value != token.end:
                errors.append(f"base token {index}: trace stops at {value}, expected {token.end}")
    if lifted.provenance != sorted(lifted.provenance):
        errors.append("provenance is not monotone")
    return errors


def connect_through_tower(tower: Tower, level: int, a: Point, b: Point) -> DyadicPath:
    """Path from a to b at ``level`` built from the seed upwards.

    The projections of a and b are connected one level down and that path is
    lifted with the given endpoints; the seed stage is walked directly.
    Conn-flavor stages have no path lifting and are walked directly too.

    Raises:
        PreconditionError: level outside the built tower
        PathError: a and b lie in different components
    """
    if level < 1 or level > tower.depth:
        raise PreconditionError(f"level must lie in [1, {tower.depth}], got {level}")
    if level == 1 or tower.family.construction != Flavor.PATH:
        return connect_points(tower.stage(level).dual, a, b)
    conn = ConnectorMap(tower.stage(level - 1), tower.stage(level), tower.connector)
    base = connect_through_tower(tower, level - 1, conn.project(a), conn.project(b))
    return lift_path(base, conn, a, b)
