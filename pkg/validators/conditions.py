"""
Tower conditions checked between consecutive stages.

Each checker inspects the lower stage, the upper stage and the block table
that produced it, and reports the first violating tuple it finds.
"""
from collections import defaultdict
from typing import Dict, Hashable, List, Set, Tuple

from core.tower import block_table_violation, factor_position
from models.tower import AFFINE_KINDS, HALF_KINDS, BlockKind, Flavor, Toggle, lam
from .base_validator import BaseConditionChecker, CheckContext, ConditionResult

_NON_IDENT = AFFINE_KINDS + HALF_KINDS
_MIRROR = {
    BlockKind.UPPER: BlockKind.LOWER,
    BlockKind.LOWER: BlockKind.UPPER,
    BlockKind.UPPER_REV: BlockKind.LOWER_REV,
    BlockKind.LOWER_REV: BlockKind.UPPER_REV,
}


def _mult(ctx: CheckContext, kind: BlockKind, q: str, p: str) -> int:
    if ctx.flavor == Flavor.CONN and kind != BlockKind.IDENT:
        return 0
    return ctx.spec.multiplicity(kind, q, p, ctx.grave_source)


def _entries_over(ctx: CheckContext, kind: BlockKind, q: str, y: Hashable) -> List[Tuple]:
    p = ctx.lower.dual.y_block_of[y]
    return [(kind.value, q, p, k, y) for k in range(_mult(ctx, kind, q, p))]


class BlockTableChecker(BaseConditionChecker):
    """Every (q, p) pair carries the kinds the flavor needs."""

    name = "m>1"
    flavors = (Flavor.PATH,)
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        violation = block_table_violation(ctx.spec, ctx.family, ctx.sources, ctx.grave_source)
        if violation is None:
            return self.ok()
        q, p, kind = violation
        return self.fail(f"no {kind} block from {p} into {q}", violation)


class NoLoopChecker(BaseConditionChecker):
    """No affine kind is used exactly once, each source has two constant entries, and every index gets factor entries."""

    name = "nlc1"
    flavors = (Flavor.PATH,)

    def check(self, ctx: CheckContext) -> ConditionResult:
        for p in ctx.sources:
            for kind in AFFINE_KINDS:
                total = sum(_mult(ctx, kind, q, p) for q in ctx.spec.targets)
                if total == 1:
                    return self.fail(f"{kind.value} entries from {p} are used exactly once", (p, kind.value))
            half = sum(_mult(ctx, kind, q, p) for kind in HALF_KINDS for q in ctx.spec.targets)
            if half < 2:
                return self.fail(f"{half} constant 1/2 entries from {p}, at least 2 needed", (p, "half", half))
        for i in ctx.lower.dual.x_blocks:
            total = sum(ctx.spec.factor_multiplicity(q, i) for q in ctx.spec.targets)
            if total < 2:
                return self.fail(f"F^{i} carries {total} factor entries, at least 2 needed", (i, total))
        return self.ok()


class DistinctEndsChecker(BaseConditionChecker):
    """Entries over one y meeting the same side at a vertex value reach at least two vertices."""

    name = "nlc2"
    flavors = (Flavor.PATH,)

    def check(self, ctx: CheckContext) -> ConditionResult:
        upper = ctx.upper.dual
        for y in ctx.lower.dual.Y:
            groups: Dict[Tuple[int, int], List[Tuple]] = defaultdict(list)
            for q in ctx.spec.targets:
                for kind in AFFINE_KINDS:
                    for r in (0, 1):
                        s = lam(kind, r)
                        if s not in (0, 1):
                            continue
                        for e in _entries_over(ctx, kind, q, y):
                            if e in upper.b(r):
                                groups[(r, int(s))].append(e)
            for (r, _), entries in groups.items():
                ends = {upper.b(r)[e] for e in entries}
                if len(ends) < 2:
                    return self.fail(
                        f"all {len(entries)} entries over {y!r} meet side {r} at {next(iter(ends))!r}",
                        (y, entries[0]))
        return self.ok()


class ConstantCountChecker(BaseConditionChecker):
    """Each source block has at least nine constant entries on one side."""

    name = "nop1"
    flavors = (Flavor.PATH,)

    def check(self, ctx: CheckContext) -> ConditionResult:
        for p in ctx.sources:
            low = sum(_mult(ctx, BlockKind.HALF_LOW, q, p) for q in ctx.spec.targets)
            high = sum(_mult(ctx, BlockKind.HALF_HIGH, q, p) for q in ctx.spec.targets)
            if low < 9 and high < 9:
                return self.fail(f"{p} has {low} low and {high} high constant entries, 9 needed", (p, low, high))
        return self.ok()


class BranchingChecker(BaseConditionChecker):
    """Over every y, UPPER entries reach three distinct b_1 ends and LOWER entries three distinct b_0 ends.

    The entries may come from different targets; others may share ends.
    """

    name = "nop2"
    flavors = (Flavor.PATH,)

    def _spread(self, ctx: CheckContext, kind: BlockKind, r: int, y: Hashable) -> bool:
        b = ctx.upper.dual.b(r)
        ends = {b[e] for q in ctx.spec.targets for e in _entries_over(ctx, kind, q, y) if e in b}
        return len(ends) >= 3

    def check(self, ctx: CheckContext) -> ConditionResult:
        for y in ctx.lower.dual.Y:
            if y in ctx.lower.dual.b1 and not self._spread(ctx, BlockKind.UPPER, 1, y):
                return self.fail(f"fewer than three distinct upper ends over {y!r}", (y, "upper"))
            if not self._spread(ctx, BlockKind.LOWER, 0, y):
                return self.fail(f"fewer than three distinct lower ends over {y!r}", (y, "lower"))
        return self.ok()


class SlotSeparationChecker(BaseConditionChecker):
    """Distinct lower slot blocks of one kind entry go to distinct upper slot blocks."""

    name = "clsg"

    def check(self, ctx: CheckContext) -> ConditionResult:
        lower = ctx.lower.dual
        upper = ctx.upper.dual
        for r in (0, 1):
            for q in ctx.spec.targets:
                for kind in AFFINE_KINDS + (BlockKind.IDENT,):
                    s = lam(kind, r)
                    if s not in (0, 1):
                        continue
                    s = int(s)
                    for p in ctx.sources:
                        for k in range(_mult(ctx, kind, q, p)):
                            seen: Dict[Hashable, Hashable] = {}
                            for (side, pp, _), labels in lower.slot_index.items():
                                if side != s or pp != p:
                                    continue
                                for sigma in labels:
                                    y = lower.slot_members[(s, sigma)][0]
                                    label = upper.slot(r).get((kind.value, q, p, k, y))
                                    if label is None:
                                        continue
                                    if label in seen:
                                        return self.fail(
                                            f"slot blocks {seen[label]!r} and {sigma!r} both land in {label!r}",
                                            (r, q, kind.value, p, k, seen[label], sigma))
                                    seen[label] = sigma
        return self.ok()


class BlockSizeChecker(BaseConditionChecker):
    """#Y^p > 4 #X^i for every pair of blocks, on both stages."""

    name = "np4ni"

    def check(self, ctx: CheckContext) -> ConditionResult:
        for stage in (ctx.lower, ctx.upper):
            dual = stage.dual
            if not dual.y_blocks or not dual.x_blocks:
                continue
            p, ys = min(dual.y_blocks.items(), key=lambda item: len(item[1]))
            i, xs = max(dual.x_blocks.items(), key=lambda item: len(item[1]))
            if len(ys) <= 4 * len(xs):
                return self.fail(f"level {stage.level}: #Y^{p}={len(ys)} is not above 4 #X^{i}={4 * len(xs)}",
                                 (stage.level, p, i))
        return self.ok()


class SelfGluingChecker(BaseConditionChecker):
    """Self-gluing copies fix layer d and cycle the other layers of their factor block."""

    name = "sccb"

    def check(self, ctx: CheckContext) -> ConditionResult:
        if not ctx.family.has(Toggle.SCCB) or ctx.upper.level < 2:
            return self.ok()
        upper = ctx.upper.dual
        width = ctx.spec.factor_width
        for j in ctx.upper.meta.factor_blocks.values():
            for d in range(width):
                for x in upper.x_blocks[j]:
                    e = ("sccb", j, d, x)
                    if e not in upper.y_block_of:
                        return self.fail(f"missing self-gluing entry {e!r}", (j, d))
                    if upper.b0.get(e) != x:
                        return self.fail(f"b_0 of {e!r} is not {x!r}", (j, d))
                    image = upper.b1.get(e)
                    if x[2] == d and image != x:
                        return self.fail(f"layer {d} is not fixed at {x!r}", (j, d))
                    if x[2] != d and (image is None or image[2] == d or image[3] != x[3] or image[1] != x[1]):
                        return self.fail(f"{x!r} leaves the cycle of free layers", (j, d))
                if width > 2 and not self._single_cycle(upper, j, d, width):
                    return self.fail(f"free layers of {j} are not one cycle", (j, d))
        return self.ok()

    @staticmethod
    def _single_cycle(upper, j: str, d: int, width: int) -> bool:
        start = next((x for x in upper.x_blocks[j] if x[2] != d), None)
        if start is None:
            return True
        seen: Set[int] = set()
        x = start
        while factor_position(x, width) not in seen:
            seen.add(factor_position(x, width))
            x = upper.b1[("sccb", j, d, x)]
        return x == start and len(seen) == width - 1


class IdentityEntryChecker(BaseConditionChecker):
    """An identity entry from every source into every target, except from the grave source into other targets."""

    name = "phiCfp"
    flavors = (Flavor.CONN,)
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        for q in ctx.spec.targets:
            for p in ctx.sources:
                if p == ctx.grave_source and q != ctx.spec.grave_target:
                    continue
                if _mult(ctx, BlockKind.IDENT, q, p) < 1:
                    return self.fail(f"no identity entry from {p} into {q}", (q, p))
        return self.ok()


class HalfPointChecker(BaseConditionChecker):
    """An entry taking an interior value at one end takes 0 or 1 at the other."""

    name = "phiCl"
    flavors = (Flavor.CONN,)
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        for kind in _NON_IDENT:
            for q in ctx.spec.targets:
                for p in ctx.sources:
                    if ctx.spec.multiplicity(kind, q, p, ctx.grave_source) == 0:
                        continue
                    return self.fail(f"{kind.value} entry from {p} into {q} takes an interior value in a connected tower",
                                     (q, p, kind.value))
        return self.ok()


class ZCellPathChecker(BaseConditionChecker):
    """Factor paths over a Z-cell index touch the base point at one end."""

    name = "phiCx"
    flavors = (Flavor.CONN,)
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        indices = {ctx.family.zcell_index, *ctx.lower.meta.zcell_blocks} - {None}
        for entry in ctx.spec.zcell_paths:
            if entry.i in indices and not (entry.starts_at_base or entry.ends_at_base):
                return self.fail(f"factor path into {entry.q} over {entry.i} avoids the base point",
                                 (entry.q, entry.i))
        return self.ok()


class MirrorChecker(BaseConditionChecker):
    """Interior-valued entries come in mirrored pairs; from the grave source they vanish at the other end."""

    name = "11*"
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        for q in ctx.spec.targets:
            for p in ctx.sources:
                at_grave = p == ctx.grave_source
                if at_grave and ctx.flavor == Flavor.PATH:
                    continue
                for kind, mirror in _MIRROR.items():
                    if _mult(ctx, kind, q, p) == 0:
                        continue
                    if at_grave:
                        r = next(r for r in (0, 1) if lam(kind, r) not in (0, 1))
                        if lam(kind, 1 - r) != 0:
                            return self.fail(f"{kind.value} entry from grave source {p} does not vanish",
                                             (q, p, kind.value))
                    elif _mult(ctx, mirror, q, p) == 0:
                        return self.fail(f"{kind.value} entry from {p} into {q} has no {mirror.value} partner",
                                         (q, p, kind.value))
        return self.ok()


class HalfCopyChecker(BaseConditionChecker):
    """Every embedded copy block holds each element of its source block exactly once."""

    name = "11reg"
    structural = True

    def check(self, ctx: CheckContext) -> ConditionResult:
        upper = ctx.upper.dual
        for (side, p), label in ctx.upper.meta.copy_blocks.items():
            expected = [("copy", side, y) for y in ctx.lower.dual.y_blocks[p]]
            if sorted(upper.x_blocks.get(label, []), key=repr) != sorted(expected, key=repr):
                return self.fail(f"copy block {label} does not embed Y^{p} once", (side, p))
        return self.ok()


ALL_CHECKERS = [
    BlockTableChecker,
    NoLoopChecker,
    DistinctEndsChecker,
    ConstantCountChecker,
    BranchingChecker,
    SlotSeparationChecker,
    BlockSizeChecker,
    SelfGluingChecker,
    IdentityEntryChecker,
    HalfPointChecker,
    ZCellPathChecker,
    MirrorChecker,
    HalfCopyChecker,
]
