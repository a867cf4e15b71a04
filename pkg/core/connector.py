"""Projection from a stage's spectrum onto the previous stage's spectrum."""
from typing import Hashable, List, Optional, Tuple

from core.paths import HALF, Point, normalize
from models.errors import PathError
from models.paths import Token
from models.tower import BlockKind, ConnectorSpec, TowerStage, lam, lam_inverse

_KIND_TAGS = {kind.value: kind for kind in BlockKind}
_CONSTANT_TAGS = ("factor", "fcopy", "sccb", "ins")


def element_kind(e: Hashable):
    """BlockKind of a kind entry, or the tag of a constant entry ('factor', 'fcopy', 'sccb', 'ins')."""
    if isinstance(e, tuple) and e:
        if e[0] in _KIND_TAGS and len(e) == 5:
            return _KIND_TAGS[e[0]]
        if e[0] in _CONSTANT_TAGS:
            return e[0]
    raise PathError(f"{e!r} is not an element of a connected stage")


class ConnectorMap:
    """
    Map [t, e] at level n+1 to its image at level n.

    Kind entries (kind, q, p, k, y) go to [lambda(t), y]; factor entries over x
    go to the vertex x; embedded copies go to the image of the copied vertex,
    where ('copy', side, y) sits over [1/2, y] and ('fac', r, k, x) over x.
    """

    def __init__(self, lower: TowerStage, upper: TowerStage, spec: ConnectorSpec):
        if upper.level != lower.level + 1:
            raise PathError(f"stages {lower.level} and {upper.level} are not consecutive")
        self.lower = lower
        self.upper = upper
        self.spec = spec

    def project_vertex(self, x: Hashable) -> Point:
        if x[0] == "copy":
            return ("e", HALF, x[2])
        if x[0] == "fac":
            return ("v", x[3])
        raise PathError(f"{x!r} is not a vertex of a connected stage")

    def _constant_image(self, e: Tuple) -> Point:
        tag = e[0]
        if tag == "factor":
            return ("v", e[4])
        return self.project_vertex(e[-1])

    def formula_point(self, e: Tuple, t) -> Point:
        """Image of [t, e] computed from the entry's formula (raises PathError over a free end)."""
        kind = element_kind(e)
        if isinstance(kind, BlockKind):
            return normalize(self.lower.dual, lam(kind, t), e[4])
        return self._constant_image(e)

    def project(self, point: Point) -> Point:
        if point[0] == "v":
            return self.project_vertex(point[1])
        _, t, e = point
        return self.formula_point(e, t)

    def project_token(self, token: Token) -> Tuple:
        """('affine', y, a, b) when the token moves along y, else ('const', point)."""
        kind = element_kind(token.edge)
        if isinstance(kind, BlockKind) and kind not in (BlockKind.HALF_LOW, BlockKind.HALF_HIGH):
            return ("affine", token.edge[4], lam(kind, token.start), lam(kind, token.end))
        return ("const", self.project(normalize(self.upper.dual, token.start, token.edge)))

    def project_arrow(self, e1: Hashable, e2: Hashable) -> Optional[Tuple]:
        """Pair-groupoid arrow (e1, e2) of one entry block to its image (y1, y2), if defined."""
        if element_kind(e1) != element_kind(e2) or e1[:-1] != e2[:-1]:
            return None
        return (e1[-1], e2[-1])

    def boundary_errors(self) -> List[str]:
        """Every defined end of an upper edge lies over the formula's limit point, and free ends over free ends."""
        errors = []
        dual = self.upper.dual
        for e in dual.Y:
            for r in (0, 1):
                end = dual.b(r).get(e)
                try:
                    expected = self.formula_point(e, r)
                except PathError:
                    expected = None
                if end is None:
                    if expected is not None:
                        errors.append(f"free end [{r}, {e!r}] lies over the closed point {expected!r}")
                elif expected != self.project_vertex(end):
                    errors.append(f"b_{r}({e!r}) = {end!r} does not lie over {expected!r}")
        return errors

    def lifts(self, point: Point) -> List[Point]:
        """Upper points over ``point``: vertices first, then interior points of affine entries."""
        lower = self.lower.dual
        upper = self.upper.dual
        if point[0] == "v":
            x = point[1]
            return [("v", v) for block in upper.x_blocks.values() for v in block if v[0] == "fac" and v[3] == x]
        _, t, y = point
        result: List[Point] = []
        if t == HALF:
            result.extend(("v", ("copy", side, y)) for side in (0, 1) if ("copy", side, y) in upper.x_block_of)
        p = lower.y_block_of[y]
        for q in self.spec.targets:
            for kind in (BlockKind.UPPER, BlockKind.LOWER, BlockKind.UPPER_REV, BlockKind.LOWER_REV):
                value = lam_inverse(kind, t)
                if not 0 < value < 1:
                    continue
                for k in range(self.spec.multiplicity(kind, q, p, self._grave_source())):
                    e = (kind.value, q, p, k, y)
                    if e in upper.y_block_of:
                        result.append(("e", value, e))
        return result

    def _grave_source(self) -> Optional[str]:
        return self.lower.meta.grave


def compose_projection(maps: List[ConnectorMap], point: Point) -> Point:
    """Project through a chain of connectors, highest level first."""
    for conn in maps:
        point = conn.project(point)
    return point


def connector(lower: TowerStage, upper: TowerStage, spec: ConnectorSpec) -> ConnectorMap:
    return ConnectorMap(lower, upper, spec)
