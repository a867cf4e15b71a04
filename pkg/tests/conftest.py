"""Shared seeds, connector tables and towers for the test suite."""
from typing import Dict, List, Optional, Tuple

import pytest

from core.nccw import dualize
from core.tower import build_tower
from models.dual import TwistPerm
from models.nccw import NccwData
from models.tower import BlockKind, ConnectorSpec, Flavor, TowerFamilySpec

AFFINE = (BlockKind.UPPER, BlockKind.LOWER, BlockKind.UPPER_REV, BlockKind.LOWER_REV)


def nccw(p_blocks: Dict[str, int], i_blocks: Dict[str, int], mult: Dict[Tuple[int, str, str], int]) -> NccwData:
    return NccwData.from_table(p_blocks, i_blocks, mult)


def r1_data() -> NccwData:
    """One block of size 2 over two points, every multiplicity 1."""
    return nccw({"p": 2}, {"1": 1, "2": 1},
                {(r, "p", i): 1 for r in (0, 1) for i in ("1", "2")})


def loop_seed(size: int = 6, per_index: int = 3) -> NccwData:
    """Single block {a} over two points u, v, each hit per_index times on both sides."""
    return nccw({"a": size}, {"u": 1, "v": 1},
                {(r, "a", i): per_index for r in (0, 1) for i in ("u", "v")})


def path_connector(width: int = 3, affine: int = 3, half_low: int = 9, half_high: int = 0,
                   factor: int = 3, **extra) -> ConnectorSpec:
    kinds = {kind: affine for kind in AFFINE}
    kinds[BlockKind.HALF_LOW] = half_low
    if half_high:
        kinds[BlockKind.HALF_HIGH] = half_high
    return ConnectorSpec(targets=["a"], kinds=kinds, factor=factor, factor_width=width, **extra)


def twist(seed: NccwData, cycles: Optional[Dict[str, List[List[int]]]]) -> Optional[TwistPerm]:
    if not cycles:
        return None
    return TwistPerm.from_cycles(dualize(seed), cycles)


def tower(seed, connector, family=None, depth=2, cycles=None, depth_cap=None):
    family = family or TowerFamilySpec()
    return build_tower(seed, connector, family, depth, seed_twist=twist(seed, cycles), depth_cap=depth_cap)


def nop_tower(depth: int, family=None):
    """Default path tower: nine low constant entries, three of every affine kind, K = 3."""
    return tower(loop_seed(), path_connector(), family, depth, cycles={"a": [[0, 3]]})


def lifting_tower(depth: int):
    return tower(loop_seed(), path_connector(width=2, affine=2, half_low=1, half_high=1, factor=2),
                 depth=depth, cycles={"a": [[0, 3]]})


def k33_tower(depth: int):
    """One loop seed and only the kinds a K33 witness uses, so five levels stay small."""
    seed = nccw({"a": 1}, {"u": 1}, {(0, "a", "u"): 1, (1, "a", "u"): 1})
    connector = ConnectorSpec(targets=["a"], factor=3, factor_width=3,
                              kinds={BlockKind.LOWER: 3, BlockKind.UPPER: 3, BlockKind.HALF_LOW: 9})
    return tower(seed, connector, depth=depth, depth_cap=depth)


def conn_seed() -> NccwData:
    return nccw({"a": 2, "b": 2}, {"u": 1, "v": 1},
                {(0, "a", "u"): 2, (1, "a", "u"): 2, (0, "b", "v"): 2, (1, "b", "v"): 2})


def conn_connector() -> ConnectorSpec:
    return ConnectorSpec(targets=["a", "b"], kinds={BlockKind.IDENT: 2}, factor=2, factor_width=2,
                         fcopy_target="a")


def conn_tower(depth: int):
    return tower(conn_seed(), conn_connector(), TowerFamilySpec(construction=Flavor.CONN), depth)


def conn_spl_tower(depth: int):
    seed = nccw({"g": 1}, {"u": 1}, {(0, "g", "u"): 1})
    connector = ConnectorSpec(targets=["g", "f"], kinds={BlockKind.IDENT: 2}, factor=2, factor_width=2,
                              fcopy_target="f", grave_target="g")
    family = TowerFamilySpec(construction=Flavor.CONN, stably_projectionless=True)
    return tower(seed, connector, family, depth)


def path_spl_tower(depth: int):
    seed = nccw({"g": 2}, {"u": 1}, {(0, "g", "u"): 2, (1, "g", "u"): 1})
    kinds = {kind: 2 for kind in AFFINE}
    kinds[BlockKind.HALF_LOW] = 1
    connector = ConnectorSpec(targets=["g", "f"], kinds=kinds, factor=2, factor_width=2,
                              fcopy_target="f", grave_target="g")
    return tower(seed, connector, TowerFamilySpec(stably_projectionless=True), depth)


@pytest.fixture
def r1():
    return r1_data()


@pytest.fixture
def r1_dual(r1):
    return dualize(r1)


@pytest.fixture(scope="session")
def nop3():
    return nop_tower(3)


@pytest.fixture(scope="session")
def lift3():
    return lifting_tower(3)


@pytest.fixture(scope="session")
def conn6():
    return conn_tower(6)


@pytest.fixture(scope="session")
def lift4():
    return lifting_tower(4)
