import random
from fractions import Fraction

import networkx as nx
import pytest

from core.connector import ConnectorMap, compose_projection
from core.lifting import connect_through_tower, lift_path, projection_errors
from core.paths import (
    connect_points,
    end_point,
    is_valid,
    normalize,
    path_errors,
    random_path,
    stage_graph,
    start_point,
)
from models.errors import PathError, PreconditionError
from models.paths import DyadicPath, Token
from tests.conftest import conn_spl_tower, path_spl_tower

HALF = Fraction(1, 2)
EDGE = ("a", 0)


def connector_maps(t):
    return [ConnectorMap(lower, upper, t.connector) for lower, upper in zip(t.stages, t.stages[1:])]


class TestNormalize:
    def test_vertex_ends(self, nop3):
        dual = nop3.stage(1).dual
        assert normalize(dual, 0, EDGE) == ("v", dual.b0[EDGE])
        assert normalize(dual, 1, EDGE) == ("v", dual.b1[EDGE])

    def test_interior_point(self, nop3):
        assert normalize(nop3.stage(1).dual, HALF, EDGE) == ("e", HALF, EDGE)

    @pytest.mark.parametrize("t,y", [(2, EDGE), (-1, EDGE), (HALF, ("a", 99))])
    def test_rejects_bad_points(self, nop3, t, y):
        with pytest.raises(PathError):
            normalize(nop3.stage(1).dual, t, y)

    def test_rejects_free_end(self):
        dual = path_spl_tower(1).stage(1).dual
        (free,) = [y for y in dual.Y if y not in dual.b1]
        with pytest.raises(PathError):
            normalize(dual, 1, free)


class TestPathErrors:
    def test_valid_path(self, nop3):
        path = DyadicPath([Token.move(EDGE, Fraction(1, 4), HALF), Token.stay(EDGE, HALF)])
        assert path_errors(nop3.stage(1).dual, path) == []

    def test_empty_path(self, nop3):
        assert path_errors(nop3.stage(1).dual, DyadicPath()) == ["empty path"]

    def test_crossing_half_needs_a_stop(self, nop3):
        path = DyadicPath([Token.move(EDGE, 0, 1), Token.stay(EDGE, 1)])
        assert any("across 1/2" in error for error in path_errors(nop3.stage(1).dual, path))

    def test_path_must_stop_somewhere(self, nop3):
        path = DyadicPath([Token.move(EDGE, Fraction(1, 4), Fraction(3, 8))])
        assert any("never stays" in error for error in path_errors(nop3.stage(1).dual, path))

    def test_tokens_must_meet(self, nop3):
        path = DyadicPath([Token.stay(EDGE, HALF), Token.move(EDGE, Fraction(1, 4), 0)])
        assert any("do not meet" in error for error in path_errors(nop3.stage(1).dual, path))

    def test_starts_moving(self, nop3):
        path = DyadicPath([Token.stay(EDGE, HALF), Token.move(EDGE, HALF, Fraction(3, 4))], starts_moving=True)
        assert any("start with a MOVE" in error for error in path_errors(nop3.stage(1).dual, path))


class TestConnectPoints:
    def test_random_pairs(self, nop3):
        dual = nop3.stage(2).dual
        graph = stage_graph(dual)
        rng = random.Random(1)
        for _ in range(30):
            y, z = rng.choice(dual.Y), rng.choice(dual.Y)
            a = normalize(dual, rng.choice([0, Fraction(1, 4), HALF, 1]), y)
            b = normalize(dual, rng.choice([0, Fraction(3, 4), HALF, 1]), z)
            u = a[1] if a[0] == "v" else dual.b0[a[2]]
            w = b[1] if b[0] == "v" else dual.b0[b[2]]
            if not nx.has_path(graph, u, w):
                with pytest.raises(PathError):
                    connect_points(dual, a, b, graph)
                continue
            path = connect_points(dual, a, b, graph)
            assert path_errors(dual, path) == []
            assert start_point(dual, path) == a
            assert end_point(dual, path) == b

    def test_point_to_itself(self, nop3):
        dual = nop3.stage(1).dual
        for point in (("v", dual.b0[EDGE]), ("e", Fraction(1, 4), EDGE)):
            path = connect_points(dual, point, point)
            assert is_valid(dual, path)
            assert start_point(dual, path) == point == end_point(dual, path)


class TestRandomPath:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_paths_are_valid(self, nop3, seed):
        dual = nop3.stage(2).dual
        path = random_path(dual, random.Random(seed), steps=8)
        assert path_errors(dual, path) == []

    def test_starts_moving(self, nop3):
        dual = nop3.stage(1).dual
        path = random_path(dual, random.Random(4), starts_moving=True)
        assert path.starts_moving
        assert is_valid(dual, path)


class TestConnector:
    @pytest.mark.parametrize("builder", [
        lambda: path_spl_tower(3),
        lambda: conn_spl_tower(3),
    ])
    def test_boundaries_of_grave_towers(self, builder):
        for conn in connector_maps(builder()):
            assert conn.boundary_errors() == []

    @pytest.mark.parametrize("fixture", ["nop3", "lift3", "conn6"])
    def test_boundaries(self, fixture, request):
        for conn in connector_maps(request.getfixturevalue(fixture))[:2]:
            assert conn.boundary_errors() == []

    def test_vertex_lifts(self, nop3):
        conn = ConnectorMap(nop3.stage(1), nop3.stage(2), nop3.connector)
        x = nop3.stage(1).dual.b0[EDGE]
        lifts = conn.lifts(("v", x))
        assert len(lifts) == 2 * nop3.connector.factor_width
        assert all(conn.project(point) == ("v", x) for point in lifts)

    def test_half_point_lifts_to_copies_first(self, nop3):
        conn = ConnectorMap(nop3.stage(1), nop3.stage(2), nop3.connector)
        lifts = conn.lifts(("e", HALF, EDGE))
        assert lifts[:2] == [("v", ("copy", 0, EDGE)), ("v", ("copy", 1, EDGE))]
        assert all(conn.project(point) == ("e", HALF, EDGE) for point in lifts)

    def test_composed_projection(self, nop3):
        maps = connector_maps(nop3)[::-1]
        x = nop3.stage(1).dual.b0[EDGE]
        inner = ("fac", 0, 0, x)
        assert compose_projection(maps, ("v", ("fac", 1, 2, inner))) == ("v", x)

    def test_needs_consecutive_stages(self, nop3):
        with pytest.raises(PathError):
            ConnectorMap(nop3.stage(1), nop3.stage(3), nop3.connector)


class TestLifting:
    @pytest.fixture
    def conn(self, lift3):
        return ConnectorMap(lift3.stage(1), lift3.stage(2), lift3.connector)

    def base(self):
        return DyadicPath([Token.move(EDGE, 0, HALF), Token.stay(EDGE, HALF)])

    @pytest.mark.parametrize("alternate", [False, True])
    def test_lift_of_a_half_edge(self, conn, alternate):
        base = self.base()
        lower = conn.lower.dual
        lift0 = conn.lifts(start_point(lower, base))[0]
        lift1 = conn.lifts(end_point(lower, base))[0]
        lifted = lift_path(base, conn, lift0, lift1, alternate=alternate)
        upper = conn.upper.dual
        assert path_errors(upper, lifted) == []
        assert projection_errors(conn, base, lifted) == []
        assert start_point(upper, lifted) == lift0
        assert end_point(upper, lifted) == lift1

    def test_every_vertex_lift_is_reachable(self, conn):
        base = self.base()
        lower = conn.lower.dual
        lift1 = conn.lifts(end_point(lower, base))[1]
        for lift0 in conn.lifts(start_point(lower, base)):
            lifted = lift_path(base, conn, lift0, lift1)
            assert start_point(conn.upper.dual, lifted) == lift0

    def test_random_base_paths(self, conn):
        lower = conn.lower.dual
        for seed in range(20):
            base = random_path(lower, random.Random(seed), steps=6)
            lift0 = conn.lifts(start_point(lower, base))[0]
            lift1 = conn.lifts(end_point(lower, base))[0]
            lifted = lift_path(base, conn, lift0, lift1)
            assert projection_errors(conn, base, lifted) == []

    @pytest.mark.slow
    @pytest.mark.parametrize("level", [1, 2, 3])
    def test_five_hundred_paths_per_level(self, lift4, level):
        conn = ConnectorMap(lift4.stage(level), lift4.stage(level + 1), lift4.connector)
        lower, upper = conn.lower.dual, conn.upper.dual
        rng = random.Random(level)
        for _ in range(500):
            base = random_path(lower, rng, steps=rng.randint(4, 8))
            lift0 = rng.choice(conn.lifts(start_point(lower, base)))
            lift1 = rng.choice(conn.lifts(end_point(lower, base)))
            lifted = lift_path(base, conn, lift0, lift1, alternate=rng.random() < 0.5)
            assert path_errors(upper, lifted) == []
            assert projection_errors(conn, base, lifted) == []
            assert (start_point(upper, lifted), end_point(upper, lifted)) == (lift0, lift1)

    def test_endpoint_must_lie_over_base(self, conn):
        base = self.base()
        lower = conn.lower.dual
        lift0 = conn.lifts(start_point(lower, base))[0]
        with pytest.raises(PathError):
            lift_path(base, conn, lift0, lift0)

    def test_malformed_base_path(self, conn):
        base = DyadicPath([Token.move(EDGE, 0, 1)])
        lift0 = conn.lifts(("v", conn.lower.dual.b0[EDGE]))[0]
        with pytest.raises(PathError):
            lift_path(base, conn, lift0, lift0)


class TestConnectThroughTower:
    @pytest.mark.parametrize("seed", range(6))
    def test_random_points_at_level_three(self, lift3, seed):
        rng = random.Random(seed)
        dual = lift3.stage(3).dual
        a = start_point(dual, random_path(dual, rng, steps=4))
        b = end_point(dual, random_path(dual, rng, steps=4))
        path = connect_through_tower(lift3, 3, a, b)
        assert path_errors(dual, path) == []
        assert (start_point(dual, path), end_point(dual, path)) == (a, b)

    def test_seed_level_walks_the_stage(self, lift3):
        dual = lift3.stage(1).dual
        a, b = ("v", dual.b0[EDGE]), ("e", Fraction(1, 4), EDGE)
        assert connect_through_tower(lift3, 1, a, b).tokens == connect_points(dual, a, b).tokens

    def test_level_must_be_built(self, lift3):
        point = ("v", lift3.stage(1).dual.b0[EDGE])
        with pytest.raises(PreconditionError):
            connect_through_tower(lift3, 4, point, point)
