import networkx as nx
import pytest

from core.nccw import dualize, edge_table, realize, twisted_graphs, validate_nccw
from models.dual import TwistPerm
from models.errors import InputError, PreconditionError
from models.nccw import LayoutEntry
from tests.conftest import nccw


class TestValidate:
    def test_r1_is_valid_and_unital(self, r1):
        report = validate_nccw(r1)
        assert report.status == "success"
        assert report.fully_unital
        assert report.a2_ok
        assert report.grave is None

    def test_kernel_index_violates_injectivity(self):
        data = nccw({"p": 1}, {"1": 1, "2": 1}, {(0, "p", "1"): 1, (1, "p", "1"): 1})
        report = validate_nccw(data)
        assert not report.a2_ok
        assert any("(A2)" in error for error in report.errors)

    def test_single_non_unital_side_one_block_is_grave(self):
        data = nccw({"g": 2, "h": 1}, {"u": 1},
                    {(0, "g", "u"): 2, (1, "g", "u"): 1, (0, "h", "u"): 1, (1, "h", "u"): 1})
        report = validate_nccw(data)
        assert not report.has_errors()
        assert report.grave == "g"
        assert report.unital[(1, "g")] is False

    def test_overfull_block_is_reported(self):
        data = nccw({"p": 1}, {"1": 1}, {(0, "p", "1"): 2, (1, "p", "1"): 1})
        report = validate_nccw(data)
        assert report.has_errors()
        assert "needs 2 diagonal slots" in report.errors[0]

    def test_negative_sizes_are_reported_not_raised(self):
        data = nccw({"p": -1}, {"1": 1}, {(0, "p", "1"): 1})
        report = validate_nccw(data)
        assert report.status == "failure"

    def test_layout_collision(self, r1):
        r1.layout = [LayoutEntry(r=0, p="p", slots=[1, 1])]
        report = validate_nccw(r1)
        assert any("collision" in error for error in report.errors)


class TestDualize:
    def test_r1_maps(self, r1_dual):
        assert r1_dual.Y == [("p", 0), ("p", 1)]
        assert r1_dual.X == [("1", 0), ("2", 0)]
        assert r1_dual.b0 == {("p", 0): ("1", 0), ("p", 1): ("2", 0)}
        assert r1_dual.b1 == r1_dual.b0

    def test_non_unital_domain_is_proper(self):
        data = nccw({"g": 3}, {"u": 1}, {(0, "g", "u"): 3, (1, "g", "u"): 1})
        dual = dualize(data)
        assert len(dual.b0) == 3
        assert len(dual.b1) == 1

    def test_fiber_counts_match_multiplicities(self):
        data = nccw({"p": 5}, {"u": 1, "v": 2}, {(0, "p", "u"): 1, (0, "p", "v"): 2, (1, "p", "u"): 3,
                                                 (1, "p", "v"): 1})
        dual = dualize(data)
        for r in (0, 1):
            for i in data.i_blocks:
                for x in dual.x_blocks[i]:
                    assert len(dual.fiber(r, "p", x)) == data.m(r, "p", i)
                assert dual.multiplicity(r, "p", i) == data.m(r, "p", i)

    def test_explicit_layout_is_used(self, r1):
        r1.layout = [LayoutEntry(r=1, p="p", slots=[1, 0])]
        dual = dualize(r1)
        assert dual.b1 == {("p", 1): ("1", 0), ("p", 0): ("2", 0)}

    def test_invalid_data_is_rejected(self):
        with pytest.raises(PreconditionError):
            dualize(nccw({"p": 1}, {"1": 1}, {(0, "p", "1"): 2}))


class TestTwistedGraphs:
    def test_identity_gives_two_loops(self, r1_dual):
        graph = twisted_graphs(r1_dual, TwistPerm.identity())["p"]
        assert sorted(graph.edges(keys=True)) == sorted([
            (("1", 0), ("1", 0), ("p", 0)),
            (("2", 0), ("2", 0), ("p", 1)),
        ])

    def test_swap_gives_a_two_cycle(self, r1_dual):
        swap = TwistPerm.from_cycles(r1_dual, {"p": [[0, 1]]})
        graph = twisted_graphs(r1_dual, swap)["p"]
        assert nx.is_strongly_connected(graph)
        assert graph.number_of_edges() == 2
        assert {(u, v) for u, v in graph.edges()} == {(("1", 0), ("2", 0)), (("2", 0), ("1", 0))}

    def test_half_open_edges_get_free_nodes(self):
        dual = dualize(nccw({"g": 2}, {"u": 1}, {(0, "g", "u"): 2, (1, "g", "u"): 1}))
        graph = twisted_graphs(dual, TwistPerm.identity())["g"]
        half_open = [data for _, _, data in graph.edges(data=True) if data["half_open"]]
        assert len(half_open) == 1
        assert any(kind == "free" for _, kind in graph.nodes(data="kind"))

    def test_twist_then_inverse_restores_edges(self, r1_dual):
        swap = TwistPerm.from_cycles(r1_dual, {"p": [[0, 1]]})
        restored = swap.compose(swap.inverse())
        assert edge_table(r1_dual, restored) == edge_table(r1_dual, TwistPerm.identity())

    def test_twist_must_stay_in_block(self, r1_dual):
        with pytest.raises(InputError):
            TwistPerm.from_cycles(r1_dual, {"p": [[0, 2]]})
        with pytest.raises(InputError):
            TwistPerm.from_cycles(r1_dual, {"q": [[0, 1]]})


class TestRealize:
    def test_realize_reproduces_edge_table(self, r1_dual):
        swap = TwistPerm.from_cycles(r1_dual, {"p": [[0, 1]]})
        table = edge_table(r1_dual, swap)
        data, twist, dual = realize({"p": 2}, {"1": 1, "2": 1}, table)
        assert edge_table(dual, twist) == table
        assert data.m(0, "p", "1") == 1
