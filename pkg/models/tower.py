"""Tower specifications (pydantic inputs) and stage value types."""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from models.dual import DualData
from models.nccw import NccwData

HALF = Fraction(1, 2)


class BlockKind(str, Enum):
    """Connecting-map block types, named by the affine map they apply to [0,1]."""
    UPPER = "upper"          # 1/2 + t/2
    LOWER = "lower"          # t/2
    UPPER_REV = "upper_rev"  # 1 - t/2
    LOWER_REV = "lower_rev"  # 1/2 - t/2
    HALF_LOW = "half_low"    # constant 1/2, both ends into side-0 copies
    HALF_HIGH = "half_high"  # constant 1/2, both ends into side-1 copies
    IDENT = "ident"          # t


KIND_ORDER = [
    BlockKind.UPPER, BlockKind.LOWER, BlockKind.UPPER_REV, BlockKind.LOWER_REV,
    BlockKind.HALF_LOW, BlockKind.HALF_HIGH, BlockKind.IDENT,
]

AFFINE_KINDS = (BlockKind.UPPER, BlockKind.LOWER, BlockKind.UPPER_REV, BlockKind.LOWER_REV)
HALF_KINDS = (BlockKind.HALF_LOW, BlockKind.HALF_HIGH)

# kind -> (a, b) with lambda(t) = a + b*t
_LAMBDA = {
    BlockKind.UPPER: (HALF, HALF),
    BlockKind.LOWER: (Fraction(0), HALF),
    BlockKind.UPPER_REV: (Fraction(1), -HALF),
    BlockKind.LOWER_REV: (HALF, -HALF),
    BlockKind.HALF_LOW: (HALF, Fraction(0)),
    BlockKind.HALF_HIGH: (HALF, Fraction(0)),
    BlockKind.IDENT: (Fraction(0), Fraction(1)),
}


def lam(kind: BlockKind, t) -> Fraction:
    """Evaluate the block's map on a point of [0,1]."""
    a, b = _LAMBDA[kind]
    return a + b * Fraction(t)


def lam_inverse(kind: BlockKind, value) -> Fraction:
    """Preimage of ``value`` under a non-constant block map."""
    a, b = _LAMBDA[kind]
    if b == 0:
        raise ValueError(f"{kind.value} is constant")
    return (Fraction(value) - a) / b


def copy_side(kind: BlockKind, r: int) -> int:
    """Side of the embedded copy a 1/2-valued end of ``kind`` at r is glued to."""
    if kind in (BlockKind.UPPER, BlockKind.LOWER):
        return r
    if kind in (BlockKind.UPPER_REV, BlockKind.LOWER_REV):
        return 1 - r
    return 0 if kind == BlockKind.HALF_LOW else 1


class Flavor(str, Enum):
    PATH = "path"
    CONN = "conn"


class Layout(str, Enum):
    """Order in which sources of one kind are laid across the factor positions."""
    INTERLEAVED = "interleaved"
    ALIGNED = "aligned"
    STACKED = "stacked"


class Toggle(str, Enum):
    NLC1 = "nlc1"
    NLC2 = "nlc2"
    NOP1 = "nop1"
    NOP2 = "nop2"
    CLSG = "clsg"
    NP4NI = "np4ni"
    SCCB = "sccb"


class BlockOverride(BaseModel):
    """Multiplicity override for one block kind; '*' matches any label."""
    kind: BlockKind
    count: int
    q: str = "*"
    p: str = "*"

    class Config:
        extra = "forbid"


class FactorOverride(BaseModel):
    count: int
    q: str = "*"
    i: str = "*"

    class Config:
        extra = "forbid"


class ZPathEntry(BaseModel):
    """Annotation of an F-factor entry over the distinguished index: where its path sits at 0 and 1."""
    q: str
    i: str
    starts_at_base: bool = True
    ends_at_base: bool = True

    class Config:
        extra = "forbid"


class ConnectorSpec(BaseModel):
    """Block table of the connecting maps, reused at every level.

    Target blocks are named by ``targets``; source blocks are the previous
    level's blocks (the seed's at level 1).
    """
    targets: List[str]
    kinds: Dict[BlockKind, int] = Field(default_factory=dict)
    factor: int = 0
    factor_width: int = 3
    fcopy_target: Optional[str] = None
    grave_target: Optional[str] = None
    overrides: List[BlockOverride] = Field(default_factory=list)
    factor_overrides: List[FactorOverride] = Field(default_factory=list)
    layouts: Dict[BlockKind, Layout] = Field(default_factory=dict)
    zcell_paths: List[ZPathEntry] = Field(default_factory=list)

    class Config:
        extra = "forbid"

    @field_validator('targets')
    @classmethod
    def validate_targets(cls, v):
        """Targets must be a non-empty list of distinct labels."""
        if not v:
            raise ValueError("Connector needs at least one target block")
        if len(set(v)) != len(v):
            raise ValueError("Target block labels must be distinct")
        return v

    @field_validator('factor_width')
    @classmethod
    def validate_width(cls, v):
        if v < 1:
            raise ValueError("factor_width must be positive")
        return v

    @property
    def copy_target(self) -> str:
        """The block receiving the embedded F-copy."""
        return self.fcopy_target or self.targets[0]

    def multiplicity(self, kind: BlockKind, q: str, p: str, grave_source: Optional[str] = None) -> int:
        """Multiplicity of ``kind`` blocks from source p into target q.

        From the grave source only the kinds keeping its free end free are
        allowed: UPPER and IDENT only into the grave target, UPPER_REV never.
        """
        exact = None
        for entry in self.overrides:
            if entry.kind == kind and entry.q in ("*", q) and entry.p in ("*", p):
                exact = entry
        if exact is not None and exact.p == p:
            return exact.count
        count = exact.count if exact is not None else self.kinds.get(kind, 0)
        if grave_source is not None and p == grave_source:
            if kind == BlockKind.UPPER_REV:
                return 0
            if kind in (BlockKind.UPPER, BlockKind.IDENT) and q != self.grave_target:
                return 0
        return count

    def factor_multiplicity(self, q: str, i: str) -> int:
        count = self.factor
        for entry in self.factor_overrides:
            if entry.q in ("*", q) and entry.i in ("*", i):
                count = entry.count
        return count

    def layout(self, kind: BlockKind) -> Layout:
        return self.layouts.get(kind, Layout.INTERLEAVED)


class TowerFamilySpec(BaseModel):
    """
    Family-level choices for a tower.

    Attributes:
        construction: base modification, 'path' or 'conn'
        toggles: conditions enforced while building
        sccb: insertion counts per level (level 1 first)
        insert_blocks: X-block receiving the insertion per level (default: first factor block)
        sccb_target: block q~ receiving the self-gluing copies (default: the F-copy target)
        stably_projectionless: grave-index flavor
        embed_xcopy: add the cyclic X-copy to the seed (conn)
        xcopy_block: seed block receiving that X-copy (default: first seed block)
        zcell_index: distinguished seed X-block whose vertices are Z-cells
    """
    construction: Flavor = Flavor.PATH
    toggles: List[Toggle] = Field(default_factory=list)
    sccb: List[int] = Field(default_factory=list)
    insert_blocks: List[str] = Field(default_factory=list)
    sccb_target: Optional[str] = None
    stably_projectionless: bool = False
    embed_xcopy: bool = True
    xcopy_block: Optional[str] = None
    zcell_index: Optional[str] = None

    class Config:
        extra = "forbid"

    @field_validator('sccb')
    @classmethod
    def validate_sccb(cls, v):
        if any(value < 0 for value in v):
            raise ValueError("sccb sequence entries must be non-negative")
        return v

    def insertion(self, level: int) -> int:
        return self.sccb[level - 1] if level - 1 < len(self.sccb) else 0

    def has(self, toggle: Toggle) -> bool:
        return toggle in self.toggles


class TowerInput(BaseModel):
    """Input document of the tower command."""
    seed: NccwData
    seed_twist: Dict[str, str] = Field(default_factory=dict)
    connector: ConnectorSpec
    family: TowerFamilySpec = Field(default_factory=TowerFamilySpec)

    class Config:
        extra = "forbid"


@dataclass
class StageMeta:
    """
    Bookkeeping of one tower level.

    Attributes:
        level: 1 for the seed stage
        flavor: base modification
        fcopy_block: block holding the embedded copy (X-copy at level 1, F-copy above)
        grave: block whose side-1 map is non-total, if any
        sccb_block: block holding the self-gluing copies, if any
        zcell_blocks: X-blocks whose vertices are Z-cells
        copy_blocks: (side, p) -> X-block embedding Y_{n-1}^p
        factor_blocks: (r, i) -> X-block built on X_{n-1}^i
        twists: name -> explicit permutation realizing a cyclic twist
        insert_block: X-block copied by the insertion, if any
        inserted: number of inserted copies per block
    """
    level: int
    flavor: Flavor
    fcopy_block: Optional[str] = None
    grave: Optional[str] = None
    sccb_block: Optional[str] = None
    zcell_blocks: List[str] = field(default_factory=list)
    copy_blocks: Dict[Tuple[int, str], str] = field(default_factory=dict)
    factor_blocks: Dict[Tuple[int, str], str] = field(default_factory=dict)
    twists: Dict[str, Dict[Hashable, Hashable]] = field(default_factory=dict)
    insert_block: Optional[str] = None
    inserted: int = 0


@dataclass
class TowerStage:
    dual: DualData
    meta: StageMeta

    @property
    def level(self) -> int:
        return self.meta.level

    def counts(self) -> Dict[str, int]:
        return self.dual.counts()


@dataclass
class Tower:
    seed: NccwData
    connector: ConnectorSpec
    family: TowerFamilySpec
    seed_twist: Dict[str, Any] = field(default_factory=dict)
    stages: List[TowerStage] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.stages)

    def stage(self, level: int) -> TowerStage:
        return self.stages[level - 1]


@dataclass
class EndsTree:
    """
    Free ends of the stages and the connector parent map between them.

    Attributes:
        levels: level-n ends (elements y of the grave block with b_1(y) undefined)
        parent: end at level n+1 -> end at level n
        materialized: number of leading levels read off built stages
    """
    levels: List[List[Hashable]] = field(default_factory=list)
    parent: Dict[Hashable, Hashable] = field(default_factory=dict)
    materialized: int = 0

    def children(self, end: Hashable) -> List[Hashable]:
        return [child for child, par in self.parent.items() if par == end]

    def branching(self) -> List[int]:
        counts: Dict[Hashable, int] = {}
        for par in self.parent.values():
            counts[par] = counts.get(par, 0) + 1
        inner = [end for level in self.levels[:-1] for end in level]
        return [counts.get(end, 0) for end in inner]

    @property
    def min_branching(self) -> Optional[int]:
        values = self.branching()
        return min(values) if values else None

    @property
    def verdict(self) -> str:
        branching = self.min_branching
        if branching is None:
            return "single-level"
        return "Cantor-branching" if branching >= 2 else "not branching"

    def leaf_counts(self) -> List[int]:
        return [len(level) for level in self.levels]


@dataclass
class TowerComparison:
    distinguished: bool
    level: Optional[int] = None
    value: Optional[int] = None
    smaller: Optional[int] = None
    note: str = ""


@dataclass
class BisectionEntry:
    """
    Census of arrows outside both boundary-arrow domains at one level and block.

    Attributes:
        degree: #Y_n^p, the degree of the associated multisection
        count: number of ordered pairs (y, y') of distinct elements of Y_n^p
            outside dom(b_0) and dom(b_1) on arrows
        examples: some such pairs with their (in dom b_0, in dom b_1) flags
    """
    level: int
    block: str
    degree: int
    count: int
    examples: List[Tuple[Hashable, Hashable, Tuple[bool, bool]]] = field(default_factory=list)


@dataclass
class K33Certificate:
    """
    Explicit K_{3,3} subdivision inside the preimage of a basic open set.

    Attributes:
        base_level: level n of the edge ``edge``
        level: level n+2 holding the witness
        edge: element y of Y_n
        interval: open interval (lo, hi) around 1/2
        witness: branch vertices and the nine vertex paths
        edges: (a, b) -> elements of Y_{n+2} traversed by that path, in order
    """
    base_level: int
    level: int
    edge: Hashable
    interval: Tuple[Fraction, Fraction]
    witness: Any
    edges: Dict[Tuple[Hashable, Hashable], List[Hashable]] = field(default_factory=dict)
