"""Input schemas for 1-dimensional NCCW boundary data."""
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field, PrivateAttr, field_validator


class MultEntry(BaseModel):
    """One boundary multiplicity m_r(p, i)."""
    r: int
    p: str
    i: str
    count: int

    @field_validator('r')
    @classmethod
    def validate_side(cls, v):
        """Boundary side must be 0 or 1."""
        if v not in (0, 1):
            raise ValueError(f"boundary side must be 0 or 1, got {v}")
        return v

    class Config:
        extra = "forbid"


class LayoutEntry(BaseModel):
    """Explicit diagonal slot assignment for the image of beta_r in E^p.

    ``slots[k]`` is the diagonal slot of E^p receiving the k-th image slot,
    image slots being enumerated block by block in (i, copy) order.
    """
    r: int
    p: str
    slots: List[int]

    class Config:
        extra = "forbid"


class NccwData(BaseModel):
    """Block sizes and boundary multiplicities of a 1-dimensional NCCW complex.

    Sizes and counts are deliberately not constrained here so that
    ``validate_nccw`` can report structural problems instead of the parser
    rejecting them.
    """
    p_blocks: Dict[str, int]
    i_blocks: Dict[str, int]
    mult: List[MultEntry] = Field(default_factory=list)
    layout: List[LayoutEntry] = Field(default_factory=list)

    _table: Dict[Tuple[int, str, str], int] = PrivateAttr(default_factory=dict)

    class Config:
        extra = "forbid"

    def model_post_init(self, __context) -> None:
        table: Dict[Tuple[int, str, str], int] = {}
        for entry in self.mult:
            key = (entry.r, entry.p, entry.i)
            table[key] = table.get(key, 0) + entry.count
        self._table = table

    @classmethod
    def from_table(
        cls,
        p_blocks: Dict[str, int],
        i_blocks: Dict[str, int],
        mult: Dict[Tuple[int, str, str], int],
    ) -> "NccwData":
        """Build data from a ``{(r, p, i): count}`` table, dropping zero entries."""
        entries = [
            MultEntry(r=r, p=p, i=i, count=count)
            for (r, p, i), count in mult.items()
            if count
        ]
        return cls(p_blocks=dict(p_blocks), i_blocks=dict(i_blocks), mult=entries)

    @property
    def P(self) -> List[str]:
        return list(self.p_blocks)

    @property
    def I(self) -> List[str]:
        return list(self.i_blocks)

    def m(self, r: int, p: str, i: str) -> int:
        """Multiplicity m_r(p, i), zero when absent."""
        return self._table.get((r, p, i), 0)

    def table(self) -> Dict[Tuple[int, str, str], int]:
        """Copy of the non-zero multiplicity table."""
        return {key: value for key, value in self._table.items() if value}

    def image_size(self, r: int, p: str) -> int:
        """Number of diagonal slots of E^p hit by beta_r."""
        return sum(self.m(r, p, i) * size for i, size in self.i_blocks.items())

    def is_unital(self, r: int, p: str) -> bool:
        return self.image_size(r, p) == self.p_blocks[p]

    def incident(self, r: int, p: str) -> List[str]:
        """Indices i with m_r(p, i) > 0, in index order."""
        return [i for i in self.i_blocks if self.m(r, p, i) > 0]

    def layout_for(self, r: int, p: str) -> Optional[List[int]]:
        for entry in self.layout:
            if entry.r == r and entry.p == p:
                return entry.slots
        return None

    def image_blocks(self, r: int, p: str) -> Iterator[Tuple[str, int]]:
        """Yield the (i, copy) blocks of the image of beta_r^p in canonical order."""
        for i in self.i_blocks:
            for copy in range(self.m(r, p, i)):
                yield i, copy


class ClassifyInput(BaseModel):
    """Input document of the classification commands."""
    data: NccwData
    twists: Dict[str, Dict[str, str]] = Field(default_factory=dict)

    class Config:
        extra = "forbid"
