"""
Tower construction: seed stage and the level-by-level connecting maps.

Element encodings at level n+1 (y, x range over level n):

    X: ('copy', side, y)          embedded copy of Y_n^p, block 'c{side}:{p}' (path flavor)
       ('fac', r, k, x)           factor position k on side r, block 'f{r}:{i}'
    Y: (kind, q, p, k, y)         affine / constant / identity block entries
       ('factor', q, i, k, x)     F-factor entries
       ('fcopy', x')              embedded copy of X_{n+1} in the copy target
       ('sccb', j, d, x')         self-gluing copies of factor block j fixing layer d
       ('ins', q, c, x')          inserted identity copies

The seed stage adds ('xcopy', x) to the X-copy block (conn flavor) and
('ins', p, c, x) for the level-1 insertion.
"""
import time
from typing import Dict, Hashable, List, Optional, Tuple

from config import config
from core.nccw import dualize, validate_nccw
from models.dual import DualBuilder, DualData, TwistPerm
from models.errors import ConditionError, PreconditionError
from models.nccw import NccwData
from models.tower import (
    AFFINE_KINDS,
    KIND_ORDER,
    BlockKind,
    ConnectorSpec,
    Flavor,
    Layout,
    StageMeta,
    Toggle,
    Tower,
    TowerFamilySpec,
    TowerStage,
    copy_side,
    lam,
)
from utils.logger import get_logger
from utils.metrics import record_condition_failure, record_stage

logger = get_logger(__name__)


def copy_block(side: int, p: str) -> str:
    return f"c{side}:{p}"


def factor_block(r: int, i: str) -> str:
    return f"f{r}:{i}"


def factor_position(x: Tuple, width: int) -> int:
    """Position l = r*K + k of a factor vertex on its 2K-cycle."""
    return x[1] * width + x[2]


def factor_vertex(position: int, base: Hashable, width: int) -> Tuple:
    position %= 2 * width
    return ("fac", position // width, position % width, base)


def fcopy_successor(x: Tuple, width: int) -> Tuple:
    """b_1 of the F-copy entry over x: swap copy sides, step factor positions down the 2K-cycle."""
    if x[0] == "copy":
        return ("copy", 1 - x[1], x[2])
    return factor_vertex(factor_position(x, width) - 1, x[3], width)


def _cyclic_predecessors(xs: List[Hashable]) -> Dict[Hashable, Hashable]:
    """x_l -> x_{l-1}, with x_1 -> x_last."""
    return {x: xs[pos - 1] for pos, x in enumerate(xs)}


# ---------------------------------------------------------------------------
# Seed stage
# ---------------------------------------------------------------------------

def build_seed_stage(
    seed: NccwData,
    family: TowerFamilySpec,
    twist: Optional[TwistPerm] = None,
) -> TowerStage:
    """Level-1 stage: the seed's dual with its twist folded into b_1.

    Conn flavor adds the X-copy: one element per x in the X-copy block, b_0 the
    identity and b_1 the cyclic predecessor over all of X.

    Raises:
        PreconditionError: the seed does not validate, or the grave flavor is
            requested for a unital seed
    """
    report = validate_nccw(seed)
    if report.has_errors():
        raise PreconditionError("invalid seed: " + "; ".join(report.errors))
    dual = dualize(seed)
    twist = twist or TwistPerm.identity()

    builder = DualBuilder()
    for i, block in dual.x_blocks.items():
        builder.add_x_block(i, block)
    for p, block in dual.y_blocks.items():
        builder.add_y_block(p)
        for y in block:
            builder.add_y(p, y)

    meta = StageMeta(level=1, flavor=family.construction)
    if family.zcell_index is not None:
        if family.zcell_index not in seed.i_blocks:
            raise PreconditionError(f"zcell_index '{family.zcell_index}' is not a seed i-block")
        meta.zcell_blocks = [family.zcell_index]

    xcopy: Dict[Hashable, Hashable] = {}
    if family.construction == Flavor.CONN and family.embed_xcopy:
        target = family.xcopy_block or seed.P[0]
        if target not in seed.p_blocks:
            raise PreconditionError(f"xcopy_block '{target}' is not a seed p-block")
        xcopy = _cyclic_predecessors(dual.X)
        for x in dual.X:
            builder.add_y(target, ("xcopy", x))
        meta.fcopy_block = target
        meta.twists["xcopy"] = dict(xcopy)

    inserted = family.insertion(1)
    insert_block = _insertion_block(family, 1, list(dual.x_blocks), next(iter(dual.x_blocks)))
    if inserted:
        for p in dual.y_blocks:
            for c in range(inserted):
                for x in dual.x_blocks[insert_block]:
                    builder.add_y(p, ("ins", p, c, x))

    for y in dual.Y:
        if y in dual.b0:
            builder.set_end(0, y, dual.b0[y], dual.slot0[y])
        z = twist(y)
        if z in dual.b1:
            builder.set_end(1, y, dual.b1[z], dual.slot1[z])
    if xcopy:
        for x in dual.X:
            builder.set_end(0, ("xcopy", x), x, (meta.fcopy_block, "xcopy", dual.x_block_of[x]))
            prev = xcopy[x]
            builder.set_end(1, ("xcopy", x), prev, (meta.fcopy_block, "xcopy", dual.x_block_of[prev]))
    if inserted:
        _set_insertion_ends(builder, list(dual.y_blocks), inserted, dual.x_blocks[insert_block])
        meta.insert_block = insert_block
        meta.inserted = inserted

    stage = TowerStage(dual=builder.build(), meta=meta)
    try:
        meta.grave = _check_grave(stage.dual, family, expected=None)
    except ConditionError as e:
        raise PreconditionError(f"seed does not fit the tower flavor: {e}") from e
    return stage


def _insertion_block(family: TowerFamilySpec, level: int, candidates: List[str], default: str) -> str:
    if level - 1 < len(family.insert_blocks):
        label = family.insert_blocks[level - 1]
        if label not in candidates:
            raise PreconditionError(f"insertion block '{label}' does not exist at level {level}")
        return label
    return default


def _set_insertion_ends(builder: DualBuilder, blocks: List[str], copies: int, xs: List[Hashable]) -> None:
    for q in blocks:
        for c in range(copies):
            for x in xs:
                for r in (0, 1):
                    builder.set_end(r, ("ins", q, c, x), x, (q, "ins", c))


def _check_grave(dual: DualData, family: TowerFamilySpec, expected: Optional[str]) -> Optional[str]:
    """The block with a non-total b_1; enforces the flavor's grave rules."""
    partial = [p for p, block in dual.y_blocks.items() if any(y not in dual.b1 for y in block)]
    partial0 = [p for p, block in dual.y_blocks.items() if any(y not in dual.b0 for y in block)]
    if partial0:
        raise ConditionError("m>1", f"b_0 is not total on blocks {partial0}", witness=partial0)
    if not family.stably_projectionless:
        if partial:
            raise ConditionError("m>1", f"unital flavor but b_1 is not total on {partial}", witness=partial)
        return None
    if len(partial) != 1 or (expected is not None and partial[0] != expected):
        raise ConditionError(
            "m>1", f"expected exactly one grave block{'' if expected is None else ' ' + expected}, "
                   f"found b_1 non-total on {partial}", witness=partial)
    return partial[0]


# ---------------------------------------------------------------------------
# Connecting maps
# ---------------------------------------------------------------------------

def block_table_violation(spec: ConnectorSpec, family: TowerFamilySpec, sources: List[str],
                          grave_source: Optional[str]) -> Optional[Tuple]:
    """First (q, p, kind) breaking the flavor's positivity requirement, if any.

    Path flavor needs all four affine kinds from every p into every q; with a
    grave block only UPPER and one of LOWER / LOWER_REV are required at
    (grave target, grave source). Conn flavor needs an identity entry, except
    from the grave source into other targets.
    """
    for q in spec.targets:
        for p in sources:
            at_grave = grave_source is not None and p == grave_source
            if family.construction == Flavor.CONN:
                if at_grave and q != spec.grave_target:
                    continue
                if spec.multiplicity(BlockKind.IDENT, q, p, grave_source) < 1:
                    return q, p, BlockKind.IDENT.value
                continue
            if at_grave:
                if q != spec.grave_target:
                    continue
                if spec.multiplicity(BlockKind.UPPER, q, p, grave_source) < 1:
                    return q, p, BlockKind.UPPER.value
                lower = (spec.multiplicity(BlockKind.LOWER, q, p, grave_source)
                         + spec.multiplicity(BlockKind.LOWER_REV, q, p, grave_source))
                if lower < 1:
                    return q, p, "lower|lower_rev"
                continue
            for kind in AFFINE_KINDS:
                if spec.multiplicity(kind, q, p, grave_source) < 1:
                    return q, p, kind.value
    return None


class _StageBuilder:
    """Assemble level n+1 from level n, a connector spec and the family options."""

    def __init__(self, prev: TowerStage, spec: ConnectorSpec, family: TowerFamilySpec):
        self.prev = prev
        self.lower = prev.dual
        self.spec = spec
        self.family = family
        self.level = prev.level + 1
        self.width = spec.factor_width
        self.flavor = family.construction
        self.grave_source = prev.meta.grave if family.stably_projectionless else None
        self.builder = DualBuilder()
        self.meta = StageMeta(level=self.level, flavor=self.flavor)

    def mult(self, kind: BlockKind, q: str, p: str) -> int:
        if self.flavor == Flavor.CONN and kind != BlockKind.IDENT:
            return 0
        return self.spec.multiplicity(kind, q, p, self.grave_source)

    def build(self) -> TowerStage:
        self._check_table()
        self._add_x_blocks()
        self._add_y_elements()
        self._set_kind_ends()
        for q in self.spec.targets:
            for r in (0, 1):
                for i in self.lower.x_blocks:
                    self._lay_factor(r, q, i)
        self._set_copy_ends()
        stage = TowerStage(dual=self.builder.build(), meta=self.meta)
        expected = self.spec.grave_target if self.family.stably_projectionless else None
        self.meta.grave = _check_grave(stage.dual, self.family, expected)
        if self.prev.meta.zcell_blocks:
            self.meta.zcell_blocks = [factor_block(r, i) for i in self.prev.meta.zcell_blocks for r in (0, 1)]
        return stage

    def _check_table(self) -> None:
        if self.family.stably_projectionless and self.spec.grave_target is None:
            raise PreconditionError("stably projectionless towers need connector.grave_target")
        if self.family.stably_projectionless and self.spec.grave_target not in self.spec.targets:
            raise PreconditionError(f"grave_target '{self.spec.grave_target}' is not a target block")
        if self.spec.copy_target not in self.spec.targets:
            raise PreconditionError(f"fcopy_target '{self.spec.copy_target}' is not a target block")
        violation = block_table_violation(self.spec, self.family, list(self.lower.y_blocks), self.grave_source)
        if violation is not None:
            q, p, kind = violation
            record_condition_failure("m>1")
            raise ConditionError("m>1", f"no {kind} block from {p} into {q} at level {self.level}",
                                 witness=violation)
        if self.family.has(Toggle.SCCB) and self.level >= 2 and self.width < 3:
            raise ConditionError("sccb", f"self-gluing copies need factor_width >= 3, got {self.width}")

    # -- X side ------------------------------------------------------------

    def _add_x_blocks(self) -> None:
        b = self.builder
        if self.flavor == Flavor.PATH:
            for p, block in self.lower.y_blocks.items():
                for side in (0, 1):
                    label = copy_block(side, p)
                    b.add_x_block(label, [("copy", side, y) for y in block])
                    self.meta.copy_blocks[(side, p)] = label
        for r in (0, 1):
            for i, block in self.lower.x_blocks.items():
                label = factor_block(r, i)
                b.add_x_block(label, [("fac", r, k, x) for k in range(self.width) for x in block])
                self.meta.factor_blocks[(r, i)] = label

    # -- Y side ------------------------------------------------------------

    def _add_y_elements(self) -> None:
        b = self.builder
        new_x = [x for block in b.x_blocks.values() for x in block]
        self.sccb_target = None
        if self.family.has(Toggle.SCCB) and self.level >= 2:
            self.sccb_target = self.family.sccb_target or self.spec.copy_target
            if self.sccb_target not in self.spec.targets:
                raise PreconditionError(f"sccb_target '{self.sccb_target}' is not a target block")
            self.meta.sccb_block = self.sccb_target
        self.inserted = self.family.insertion(self.level)
        self.insert_block = None
        if self.inserted:
            default = factor_block(0, next(iter(self.lower.x_blocks)))
            self.insert_block = _insertion_block(self.family, self.level, list(b.x_blocks), default)
            self.meta.insert_block = self.insert_block
            self.meta.inserted = self.inserted

        for q in self.spec.targets:
            b.add_y_block(q)
            for kind in KIND_ORDER:
                for p, block in self.lower.y_blocks.items():
                    for k in range(self.mult(kind, q, p)):
                        for y in block:
                            b.add_y(q, (kind.value, q, p, k, y))
            for i, block in self.lower.x_blocks.items():
                for k in range(self.spec.factor_multiplicity(q, i)):
                    for x in block:
                        b.add_y(q, ("factor", q, i, k, x))
            if q == self.spec.copy_target:
                for x in new_x:
                    b.add_y(q, ("fcopy", x))
                self.meta.fcopy_block = q
                self.meta.twists["fcopy"] = {x: fcopy_successor(x, self.width) for x in new_x}
            if q == self.sccb_target:
                for j in self.meta.factor_blocks.values():
                    for d in range(self.width):
                        for x in b.x_blocks[j]:
                            b.add_y(q, ("sccb", j, d, x))
            for c in range(self.inserted):
                for x in b.x_blocks[self.insert_block]:
                    b.add_y(q, ("ins", q, c, x))

    def _set_kind_ends(self) -> None:
        """Ends of kind entries whose value at r is 1/2: the embedded copies."""
        b = self.builder
        for q in self.spec.targets:
            for kind in KIND_ORDER:
                if kind == BlockKind.IDENT:
                    continue
                for p, block in self.lower.y_blocks.items():
                    for k in range(self.mult(kind, q, p)):
                        for r in (0, 1):
                            if lam(kind, r) not in (0, 1):
                                side = copy_side(kind, r)
                                label = (q, "copy", kind.value, p, k)
                                for y in block:
                                    b.set_end(r, (kind.value, q, p, k, y), ("copy", side, y), label)

    def _sources(self, r: int, q: str, i: str) -> List[Tuple[int, Tuple]]:
        """(factor position, source) pairs feeding the side-r ends over F^i in target q."""
        placed: List[Tuple[int, Tuple]] = []
        pos = 0
        for kind in KIND_ORDER:
            s = lam(kind, r)
            if s not in (0, 1):
                continue
            s = int(s)
            layout = self.spec.layout(kind)
            for p in self.lower.y_blocks:
                m = self.mult(kind, q, p)
                labels = self.lower.slot_index.get((s, p, i), [])
                if not m or not labels:
                    continue
                if layout == Layout.ALIGNED:
                    for c, label in enumerate(labels):
                        for t in range(m):
                            placed.append((c % self.width, (kind, p, (c + t) % m, s, label)))
                elif layout == Layout.STACKED:
                    for k in range(m):
                        for label in labels:
                            placed.append((pos % self.width, (kind, p, k, s, label)))
                            pos += 1
                else:
                    for label in labels:
                        for k in range(m):
                            placed.append((pos % self.width, (kind, p, k, s, label)))
                            pos += 1
        for k in range(self.spec.factor_multiplicity(q, i)):
            placed.append((pos % self.width, ("factor", k)))
            pos += 1
        return placed

    def _lay_factor(self, r: int, q: str, i: str) -> None:
        placed = self._sources(r, q, i)
        if not placed:
            return
        buckets: List[List[Tuple]] = [[] for _ in range(self.width)]
        for kappa, source in placed:
            buckets[kappa].append(source)
        sizes = [len(bucket) for bucket in buckets]
        if len(set(sizes)) != 1:
            record_condition_failure("factor_layout")
            raise ConditionError(
                "factor_layout",
                f"sources over F^{i} on side {r} into {q} do not fill the {self.width} factor positions evenly: {sizes}",
                witness=(q, r, i, sizes))
        b = self.builder
        for t in range(sizes[0]):
            label = (q, "fac", i, r, t)
            for kappa in range(self.width):
                source = buckets[kappa][t]
                if source[0] == "factor":
                    for x in self.lower.x_blocks[i]:
                        b.set_end(r, ("factor", q, i, source[1], x), ("fac", r, kappa, x), label)
                    continue
                kind, p, k, s, slot = source
                lower_b = self.lower.b(s)
                for y in self.lower.slot_members[(s, slot)]:
                    b.set_end(r, (kind.value, q, p, k, y), ("fac", r, kappa, lower_b[y]), label)

    def _set_copy_ends(self) -> None:
        b = self.builder
        if self.meta.fcopy_block is not None:
            q = self.meta.fcopy_block
            for x, succ in self.meta.twists["fcopy"].items():
                b.set_end(0, ("fcopy", x), x, (q, "fcopy", b.x_block_of[x]))
                b.set_end(1, ("fcopy", x), succ, (q, "fcopy", b.x_block_of[succ]))
        if self.sccb_target is not None:
            q = self.sccb_target
            for j in self.meta.factor_blocks.values():
                for d in range(self.width):
                    others = [c for c in range(self.width) if c != d]
                    label = (q, "sccb", j, d)
                    for x in b.x_blocks[j]:
                        kappa = x[2]
                        image = x if kappa == d else ("fac", x[1], others[(others.index(kappa) + 1) % len(others)], x[3])
                        b.set_end(0, ("sccb", j, d, x), x, label)
                        b.set_end(1, ("sccb", j, d, x), image, label)
        if self.inserted:
            _set_insertion_ends(b, list(self.spec.targets), self.inserted, b.x_blocks[self.insert_block])


def build_stage(prev: TowerStage, spec: ConnectorSpec, family: TowerFamilySpec) -> TowerStage:
    """Build level n+1 from level n.

    Toggled conditions are checked on the new pair of stages; the first
    failure is raised.

    Raises:
        ConditionError: block-table positivity, factor layout or a toggled condition fails
        PreconditionError: the spec references blocks that do not exist
    """
    start = time.monotonic()
    stage = _StageBuilder(prev, spec, family).build()

    toggled = [t.value for t in family.toggles if t != Toggle.SCCB]
    if toggled:
        from validators import check_conditions

        report = check_conditions(prev, stage, spec, family, names=toggled)
        failure = report.first_failure()
        if failure is not None:
            raise ConditionError(failure.name, failure.message, witness=failure.witness)

    record_stage(family.construction.value, time.monotonic() - start, stage.dual.size_y())
    logger.info(f"Built level {stage.level}: #Y={stage.dual.size_y()}, #X={stage.dual.size_x()}")
    return stage


def max_depth(family: TowerFamilySpec) -> int:
    key = 'tower.max_depth_conn' if family.construction == Flavor.CONN else 'tower.max_depth_path'
    return config.get(key, 6 if family.construction == Flavor.CONN else 4)


def build_tower(
    seed: NccwData,
    connector: ConnectorSpec,
    family: TowerFamilySpec,
    depth: int,
    seed_twist: Optional[TwistPerm] = None,
    depth_cap: Optional[int] = None,
) -> Tower:
    """Seed stage plus depth-1 connecting steps.

    Raises:
        PreconditionError: depth below 1 or above the configured cap
    """
    cap = depth_cap or max_depth(family)
    if depth < 1 or depth > cap:
        raise PreconditionError(f"depth must lie in [1, {cap}], got {depth}")
    tower = Tower(seed=seed, connector=connector, family=family,
                  seed_twist=dict(seed_twist.perms) if seed_twist else {})
    tower.stages.append(build_seed_stage(seed, family, seed_twist))
    while tower.depth < depth:
        tower.stages.append(build_stage(tower.stages[-1], connector, family))
    return tower


def predicted_counts(prev: TowerStage, spec: ConnectorSpec, family: TowerFamilySpec) -> Dict[str, int]:
    """#Y_{n+1}^q from the block table alone."""
    lower = prev.dual
    level = prev.level + 1
    grave = prev.meta.grave if family.stably_projectionless else None
    width = spec.factor_width
    new_x = 2 * width * lower.size_x() + (2 * lower.size_y() if family.construction == Flavor.PATH else 0)
    inserted = family.insertion(level)
    counts = {}
    for q in spec.targets:
        total = 0
        for kind in KIND_ORDER:
            if family.construction == Flavor.CONN and kind != BlockKind.IDENT:
                continue
            total += sum(spec.multiplicity(kind, q, p, grave) * len(block) for p, block in lower.y_blocks.items())
        total += sum(spec.factor_multiplicity(q, i) * len(block) for i, block in lower.x_blocks.items())
        if q == spec.copy_target:
            total += new_x
        if family.has(Toggle.SCCB) and level >= 2 and q == (family.sccb_target or spec.copy_target):
            total += width * 2 * width * lower.size_x()
        if inserted:
            insert_block = family.insert_blocks[level - 1] if level - 1 < len(family.insert_blocks) \
                else factor_block(0, next(iter(lower.x_blocks)))
            total += inserted * _x_block_size(prev, insert_block, width)
        counts[q] = total
    return counts


def _x_block_size(prev: TowerStage, label: str, width: int) -> int:
    kind, _, rest = label.partition(":")
    if kind.startswith("f"):
        return width * len(prev.dual.x_blocks[rest])
    return len(prev.dual.y_blocks[rest])


def stage_invariants(lower: TowerStage, upper: TowerStage) -> List[str]:
    """Structural invariants of a built stage; returns the problems found."""
    problems = []
    dual = upper.dual
    fcopy = upper.meta.fcopy_block
    if fcopy is not None:
        copies = [y for y in dual.y_blocks[fcopy] if isinstance(y, tuple) and y[0] in ("fcopy", "xcopy")]
        embedded = [y[1] for y in copies]
        if sorted(map(repr, embedded)) != sorted(map(repr, dual.X)):
            problems.append(f"embedded copy in {fcopy} is not a copy of X")
        for y in copies:
            if dual.b0.get(y) != y[1]:
                problems.append(f"b_0 is not the identity on the embedded copy at {y!r}")
                break
    for r in (0, 1):
        b = dual.b(r)
        for (side, label), members in dual.slot_members.items():
            if side != r:
                continue
            images = [b[y] for y in members]
            block = dual.x_block_of[images[0]]
            if len(set(images)) != len(images) or set(images) != set(dual.x_blocks[block]):
                problems.append(f"slot block {label!r} on side {r} is not a bijection onto X^{block}")
    return problems
