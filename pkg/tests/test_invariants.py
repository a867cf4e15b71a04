from fractions import Fraction

import pytest

from core.invariants import (
    bisection_census,
    compare_towers,
    end_count_formula,
    ends_tree,
    invariant_sequence,
    k33_witness,
)
from core.k33 import verify_k33
from core.spectrum import spec_b_gen
from models.errors import ConditionError, PreconditionError
from models.tower import TowerFamilySpec
from tests.conftest import conn_spl_tower, k33_tower, loop_seed, nop_tower, path_connector, path_spl_tower, tower

AROUND_HALF = (Fraction(1, 4), Fraction(3, 4))


def brute_force_census(dual, block):
    def same(slot, y, z):
        return y in slot and z in slot and slot[y] == slot[z]

    return sum(1 for y in block for z in block
               if y != z and not same(dual.slot0, y, z) and not same(dual.slot1, y, z))


class TestEnds:
    def test_path_grave_tower(self):
        t = path_spl_tower(3)
        tree = ends_tree(t, 3)
        assert tree.leaf_counts() == [1, 2, 4]
        assert tree.leaf_counts() == end_count_formula(t, 3)
        assert tree.verdict == "Cantor-branching"

    def test_six_built_levels_match_the_formula(self):
        t = conn_spl_tower(6)
        tree = ends_tree(t, 6)
        assert tree.materialized == 6
        assert tree.leaf_counts() == [1, 2, 4, 8, 16, 32]
        assert tree.leaf_counts() == end_count_formula(t, 6)
        assert tree.min_branching >= 2
        assert tree.verdict == "Cantor-branching"

    def test_formula_predicts_unbuilt_levels(self):
        assert end_count_formula(path_spl_tower(2), 5) == [1, 2, 4, 8, 16]

    @pytest.mark.parametrize("depth", [0, 4])
    def test_depth_must_be_built(self, depth):
        with pytest.raises(PreconditionError):
            ends_tree(path_spl_tower(3), depth)

    def test_conn_grave_tower(self):
        t = conn_spl_tower(4)
        tree = ends_tree(t, 4)
        assert tree.leaf_counts() == [1, 2, 4, 8]
        assert tree.materialized == 4
        assert tree.min_branching == 2

    def test_parents_follow_the_connector(self):
        tree = ends_tree(path_spl_tower(3), 3)
        for level, ends in enumerate(tree.levels[1:], start=1):
            for end in ends:
                assert tree.parent[end] in tree.levels[level - 1]

    def test_single_level(self):
        assert ends_tree(path_spl_tower(1), 1).verdict == "single-level"

    def test_unital_tower_has_no_ends(self, nop3):
        with pytest.raises(PreconditionError):
            ends_tree(nop3, 3)
        with pytest.raises(PreconditionError):
            end_count_formula(nop3, 3)


class TestSequences:
    def test_conn_sequence(self, conn6):
        sequence = invariant_sequence(conn6, 3)
        assert sequence[0] == {"a": 4, "b": 2}
        assert sequence[1] == {"a": 24, "b": 16}
        assert [sum(counts.values()) for counts in sequence] == [6, 40, 224]

    def test_depth_beyond_the_tower(self, nop3):
        with pytest.raises(PreconditionError):
            invariant_sequence(nop3, 4)

    def test_insertions_separate_towers(self):
        smaller = nop_tower(2, TowerFamilySpec(sccb=[1, 0, 0]))
        larger = nop_tower(2, TowerFamilySpec(sccb=[2, 0, 0]))
        result = compare_towers(smaller, larger, 2)
        assert result.distinguished
        assert result.level == 1
        assert result.value == 7
        assert result.smaller == 1
        assert compare_towers(larger, smaller, 2).smaller == 2

    def test_equal_towers_are_not_distinguished(self, nop3):
        result = compare_towers(nop3, nop3, 3)
        assert not result.distinguished


class TestBisectionCensus:
    def test_matches_brute_force(self):
        seed = loop_seed(size=2, per_index=1)
        t = tower(seed, path_connector(width=1, affine=1, half_low=1, half_high=1, factor=1))
        entries = bisection_census(t, 2)
        assert [(entry.level, entry.block) for entry in entries] == [(1, "a"), (2, "a")]
        for entry in entries:
            dual = t.stage(entry.level).dual
            assert entry.degree == len(dual.y_blocks[entry.block])
            assert entry.count == brute_force_census(dual, dual.y_blocks[entry.block])
        assert entries[-1].degree == 22

    def test_examples_are_bounded(self, lift3):
        for entry in bisection_census(lift3, 2):
            assert len(entry.examples) <= 5
            assert len(entry.examples) <= entry.count


class TestK33Witness:
    @pytest.fixture(scope="class")
    def top_graph(self, nop3):
        return spec_b_gen(nop3.stage(3))

    def test_every_edge_of_the_seed(self, nop3, top_graph):
        for y in nop3.stage(1).dual.Y:
            certificate = k33_witness(nop3, 1, (AROUND_HALF, y), graph=top_graph)
            assert certificate.level == 3
            assert verify_k33(top_graph, certificate.witness) == []
            assert len(certificate.edges) == 9

    @pytest.mark.slow
    def test_second_level(self):
        t = nop_tower(4)
        y = t.stage(2).dual.Y[0]
        certificate = k33_witness(t, 2, (AROUND_HALF, y))
        assert certificate.base_level == 2

    def test_minimal_connector_supports_witnesses(self):
        t = k33_tower(3)
        certificate = k33_witness(t, 1, (AROUND_HALF, t.stage(1).dual.Y[0]))
        assert certificate.level == 3

    @pytest.mark.slow
    def test_third_level(self):
        t = k33_tower(5)
        y = t.stage(3).dual.Y[0]
        certificate = k33_witness(t, 3, (AROUND_HALF, y))
        assert (certificate.base_level, certificate.level) == (3, 5)
        assert len(certificate.edges) == 9
        assert all(len(edges) == 3 for edges in certificate.edges.values())

    def test_interval_must_contain_half(self, nop3):
        with pytest.raises(PreconditionError):
            k33_witness(nop3, 1, ((0, Fraction(1, 4)), ("a", 0)))

    def test_needs_two_levels_above(self, nop3):
        with pytest.raises(PreconditionError):
            k33_witness(nop3, 2, (AROUND_HALF, nop3.stage(2).dual.Y[0]))

    def test_path_flavor_only(self, conn6):
        with pytest.raises(PreconditionError):
            k33_witness(conn6, 1, (AROUND_HALF, conn6.stage(1).dual.Y[0]))

    def test_too_few_constant_entries(self, lift3):
        with pytest.raises(ConditionError) as excinfo:
            k33_witness(lift3, 1, (AROUND_HALF, ("a", 0)))
        assert excinfo.value.condition == "nop1"
