"""Dual combinatorics of NCCW data: slot sets, boundary maps and twists."""
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from models.errors import InputError

Element = Hashable
SlotLabel = Hashable


@dataclass(frozen=True)
class DualData:
    """Finite sets Y, X with block partitions and partial boundary maps.

    Attributes:
        y_blocks: p-label -> ordered elements of Y^p
        x_blocks: i-label -> ordered elements of X^i
        b0, b1: partial maps Y -> X
        slot0, slot1: partial maps Y -> slot-block label (same domains as b0, b1)
        slot_index: (r, p, i) -> ordered slot-block labels over X^i inside Y^p
        slot_members: (r, label) -> elements of that slot block, aligned with X^i
        y_block_of, x_block_of: element -> block label
    """
    y_blocks: Dict[str, List[Element]]
    x_blocks: Dict[str, List[Element]]
    b0: Dict[Element, Element]
    b1: Dict[Element, Element]
    slot0: Dict[Element, SlotLabel]
    slot1: Dict[Element, SlotLabel]
    slot_index: Dict[Tuple[int, str, str], List[SlotLabel]]
    slot_members: Dict[Tuple[int, SlotLabel], List[Element]]
    y_block_of: Dict[Element, str]
    x_block_of: Dict[Element, str]

    def b(self, r: int) -> Dict[Element, Element]:
        return self.b0 if r == 0 else self.b1

    def slot(self, r: int) -> Dict[Element, SlotLabel]:
        return self.slot0 if r == 0 else self.slot1

    @property
    def Y(self) -> List[Element]:
        return [y for block in self.y_blocks.values() for y in block]

    @property
    def X(self) -> List[Element]:
        return [x for block in self.x_blocks.values() for x in block]

    def size_y(self) -> int:
        return sum(len(block) for block in self.y_blocks.values())

    def size_x(self) -> int:
        return sum(len(block) for block in self.x_blocks.values())

    def counts(self) -> Dict[str, int]:
        """Map p -> #Y^p."""
        return {p: len(block) for p, block in self.y_blocks.items()}

    def multiplicity(self, r: int, p: str, i: str) -> int:
        """Number of slot blocks of side r over X^i inside Y^p."""
        return len(self.slot_index.get((r, p, i), []))

    def fiber(self, r: int, p: str, x: Element) -> List[Element]:
        """Elements of Y^p sent to x by b_r."""
        b = self.b(r)
        return [y for y in self.y_blocks[p] if b.get(y) == x]

    def free_ends(self) -> int:
        """Number of missing endpoints over both sides."""
        total = self.size_y()
        return (total - len(self.b0)) + (total - len(self.b1))


class DualBuilder:
    """Incremental constructor for DualData keeping blocks in insertion order."""

    def __init__(self):
        self.y_blocks: Dict[str, List[Element]] = {}
        self.x_blocks: Dict[str, List[Element]] = {}
        self.ends: Tuple[Dict, Dict] = ({}, {})
        self.slots: Tuple[Dict, Dict] = ({}, {})
        self.slot_index: Dict[Tuple[int, str, str], List[SlotLabel]] = {}
        self.slot_members: Dict[Tuple[int, SlotLabel], List[Element]] = {}
        self.y_block_of: Dict[Element, str] = {}
        self.x_block_of: Dict[Element, str] = {}

    def add_x_block(self, label: str, elements: Iterable[Element]) -> None:
        block = self.x_blocks.setdefault(label, [])
        for x in elements:
            block.append(x)
            self.x_block_of[x] = label

    def add_y_block(self, label: str) -> None:
        self.y_blocks.setdefault(label, [])

    def add_y(self, p: str, y: Element) -> None:
        self.y_blocks.setdefault(p, []).append(y)
        self.y_block_of[y] = p

    def set_end(self, r: int, y: Element, x: Element, label: SlotLabel) -> None:
        """Attach side r of y to x, inside slot block ``label``."""
        self.ends[r][y] = x
        self.slots[r][y] = label
        members = self.slot_members.get((r, label))
        if members is None:
            members = self.slot_members[(r, label)] = []
            key = (r, self.y_block_of[y], self.x_block_of[x])
            self.slot_index.setdefault(key, []).append(label)
        members.append(y)

    def build(self) -> DualData:
        return DualData(
            y_blocks=self.y_blocks,
            x_blocks=self.x_blocks,
            b0=self.ends[0],
            b1=self.ends[1],
            slot0=self.slots[0],
            slot1=self.slots[1],
            slot_index=self.slot_index,
            slot_members=self.slot_members,
            y_block_of=self.y_block_of,
            x_block_of=self.x_block_of,
        )


@dataclass(frozen=True)
class TwistPerm:
    """Block-preserving permutation sigma = (sigma^p) of Y.

    Elements missing from ``perms`` are fixed.
    """
    perms: Dict[str, Dict[Element, Element]] = field(default_factory=dict)

    @classmethod
    def identity(cls, dual: Optional[DualData] = None) -> "TwistPerm":
        return cls({})

    @classmethod
    def from_mapping(cls, dual: DualData, mapping: Dict[Element, Element]) -> "TwistPerm":
        """Split a global mapping Y -> Y into per-block permutations."""
        perms: Dict[str, Dict[Element, Element]] = {}
        for y, z in mapping.items():
            if y != z:
                perms.setdefault(dual.y_block_of[y], {})[y] = z
        twist = cls(perms)
        twist.check(dual)
        return twist

    @classmethod
    def from_cycles(cls, dual: DualData, cycles: Dict[str, Sequence[Sequence[int]]]) -> "TwistPerm":
        """Build a twist from cycles of local indices into each Y^p.

        Args:
            dual: Dual data whose Y-blocks the indices refer to
            cycles: p -> list of cycles, e.g. ``{"p": [[0, 1]]}``

        Raises:
            InputError: unknown block, index out of range or repeated index
        """
        perms: Dict[str, Dict[Element, Element]] = {}
        for p, cycle_list in cycles.items():
            if p not in dual.y_blocks:
                raise InputError(f"Twist refers to unknown block '{p}'")
            block = dual.y_blocks[p]
            seen = set()
            perm: Dict[Element, Element] = {}
            for cycle in cycle_list:
                for idx in cycle:
                    if not 0 <= idx < len(block):
                        raise InputError(f"Twist index {idx} out of range for block '{p}' of size {len(block)}")
                    if idx in seen:
                        raise InputError(f"Twist index {idx} repeated in block '{p}'")
                    seen.add(idx)
                for pos, idx in enumerate(cycle):
                    perm[block[idx]] = block[cycle[(pos + 1) % len(cycle)]]
            perms[p] = {y: z for y, z in perm.items() if y != z}
        return cls({p: perm for p, perm in perms.items() if perm})

    def __call__(self, y: Element) -> Element:
        for perm in self.perms.values():
            if y in perm:
                return perm[y]
        return y

    def as_mapping(self, dual: DualData) -> Dict[Element, Element]:
        return {y: self(y) for y in dual.Y}

    def compose(self, other: "TwistPerm") -> "TwistPerm":
        """Return self o other (apply ``other`` first)."""
        keys = set()
        for perm in list(self.perms.values()) + list(other.perms.values()):
            keys.update(perm)
        mapping = {y: self(other(y)) for y in keys}
        return TwistPerm._from_global(mapping, self, other)

    def inverse(self) -> "TwistPerm":
        return TwistPerm({p: {z: y for y, z in perm.items()} for p, perm in self.perms.items()})

    def is_identity(self) -> bool:
        return not any(self.perms.values())

    def check(self, dual: DualData) -> None:
        """Raise InputError unless this is a block-preserving bijection."""
        for p, perm in self.perms.items():
            block = set(dual.y_blocks.get(p, []))
            if set(perm) - block or set(perm.values()) - block:
                raise InputError(f"Twist on block '{p}' moves elements across blocks")
            if len(set(perm.values())) != len(perm) or set(perm.values()) != set(perm):
                raise InputError(f"Twist on block '{p}' is not a permutation")

    @staticmethod
    def _from_global(mapping: Dict[Element, Element], *sources: "TwistPerm") -> "TwistPerm":
        owner: Dict[Element, str] = {}
        for source in sources:
            for p, perm in source.perms.items():
                for y in perm:
                    owner[y] = p
        perms: Dict[str, Dict[Element, Element]] = {}
        for y, z in mapping.items():
            if y != z:
                perms.setdefault(owner[y], {})[y] = z
        return TwistPerm(perms)
