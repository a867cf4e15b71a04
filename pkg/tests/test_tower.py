import pytest

from core.tower import build_stage, build_tower, predicted_counts, stage_invariants
from models.errors import ConditionError, PreconditionError
from models.tower import Flavor, Toggle, TowerFamilySpec
from tests.conftest import (
    conn_spl_tower,
    lifting_tower,
    loop_seed,
    nop_tower,
    path_connector,
    path_spl_tower,
    tower,
)
from validators import check_conditions


def y_counts(t):
    return [stage.dual.size_y() for stage in t.stages]


def consecutive(t):
    return zip(t.stages, t.stages[1:])


class TestCounts:
    def test_nop_tower(self, nop3):
        assert y_counts(nop3) == [6, 156, 3804]

    @pytest.mark.slow
    def test_nop_tower_depth_four(self):
        assert y_counts(nop_tower(4))[-1] == 91596

    def test_lifting_tower(self, lift3):
        assert y_counts(lift3) == [6, 84, 1128]

    def test_conn_tower(self, conn6):
        assert y_counts(conn6) == [6, 40, 224, 1152, 5632, 26624]

    def test_slot_arithmetic(self):
        seed = loop_seed(size=2, per_index=1)
        spec = path_connector(width=1, affine=1, half_low=1, half_high=1, factor=1)
        assert y_counts(tower(seed, spec))[-1] == 22

    @pytest.mark.parametrize("fixture", ["nop3", "lift3", "conn6"])
    def test_predicted_counts_match(self, fixture, request):
        t = request.getfixturevalue(fixture)
        for lower, upper in consecutive(t):
            assert predicted_counts(lower, t.connector, t.family) == upper.counts()

    def test_x_counts_of_path_flavor(self, nop3):
        lower, upper = nop3.stage(1), nop3.stage(2)
        width = nop3.connector.factor_width
        assert upper.dual.size_x() == 2 * width * lower.dual.size_x() + 2 * lower.dual.size_y()


class TestStageStructure:
    @pytest.mark.parametrize("fixture", ["nop3", "lift3", "conn6"])
    def test_stage_invariants_hold(self, fixture, request):
        t = request.getfixturevalue(fixture)
        for lower, upper in consecutive(t):
            assert stage_invariants(lower, upper) == []

    def test_path_stages_have_total_boundary_maps(self, nop3):
        for stage in nop3.stages:
            assert len(stage.dual.b0) == stage.dual.size_y()
            assert len(stage.dual.b1) == stage.dual.size_y()
            assert stage.meta.grave is None

    def test_grave_block_persists(self):
        t = path_spl_tower(3)
        assert [stage.meta.grave for stage in t.stages] == ["g", "g", "g"]
        spl = conn_spl_tower(3)
        assert all(stage.meta.grave == "g" for stage in spl.stages)

    def test_fcopy_block_is_recorded(self, nop3, conn6):
        assert nop3.stage(2).meta.fcopy_block == "a"
        assert conn6.stage(1).meta.fcopy_block == "a"
        assert "xcopy" in conn6.stage(1).meta.twists


class TestBuildErrors:
    def test_depth_cap(self):
        with pytest.raises(PreconditionError):
            nop_tower(5)
        with pytest.raises(PreconditionError):
            nop_tower(0)

    def test_explicit_depth_cap(self):
        with pytest.raises(PreconditionError):
            tower(loop_seed(), path_connector(), depth=3, depth_cap=2)

    def test_missing_affine_kind(self):
        with pytest.raises(ConditionError) as excinfo:
            tower(loop_seed(), path_connector(affine=0))
        assert excinfo.value.condition == "m>1"

    def test_uneven_factor_layout(self):
        with pytest.raises(ConditionError) as excinfo:
            tower(loop_seed(), path_connector(factor=1), cycles={"a": [[0, 3]]})
        assert excinfo.value.condition == "factor_layout"

    def test_toggled_condition_stops_the_tower(self):
        family = TowerFamilySpec(toggles=[Toggle.NOP1])
        with pytest.raises(ConditionError) as excinfo:
            tower(loop_seed(), path_connector(half_low=6), family, cycles={"a": [[0, 3]]})
        assert excinfo.value.condition == "nop1"

    def test_untoggled_condition_does_not_stop_the_tower(self):
        t = tower(loop_seed(), path_connector(half_low=6), cycles={"a": [[0, 3]]})
        assert t.depth == 2

    def test_grave_flavor_needs_a_non_unital_seed(self):
        with pytest.raises(PreconditionError):
            tower(loop_seed(), path_connector(), TowerFamilySpec(stably_projectionless=True))

    def test_conn_flavor_needs_identity_entries(self):
        family = TowerFamilySpec(construction=Flavor.CONN)
        with pytest.raises(ConditionError) as excinfo:
            tower(loop_seed(), path_connector(), family)
        assert excinfo.value.condition == "m>1"


class TestSelfGluing:
    def test_copies_are_counted(self):
        family = TowerFamilySpec(toggles=[Toggle.SCCB])
        t = nop_tower(2, family)
        assert t.stage(2).dual.size_y() == 192
        assert t.stage(2).meta.sccb_block == "a"
        assert predicted_counts(t.stage(1), t.connector, family) == t.stage(2).counts()

    def test_copies_pass_their_check(self):
        family = TowerFamilySpec(toggles=[Toggle.SCCB])
        t = nop_tower(2, family)
        report = check_conditions(t.stage(1), t.stage(2), t.connector, family, names=["sccb"])
        assert report.passed

    def test_needs_three_factor_positions(self):
        family = TowerFamilySpec(toggles=[Toggle.SCCB])
        with pytest.raises(ConditionError) as excinfo:
            tower(loop_seed(), path_connector(width=2, affine=2, half_low=1, half_high=1, factor=2), family,
                  cycles={"a": [[0, 3]]})
        assert excinfo.value.condition == "sccb"


class TestInsertion:
    def test_level_one_insertion(self):
        t = nop_tower(2, TowerFamilySpec(sccb=[2]))
        assert t.stage(1).counts() == {"a": 8}
        assert t.stage(1).meta.inserted == 2

    def test_insertion_above_the_seed(self):
        family = TowerFamilySpec(sccb=[0, 1])
        t = nop_tower(2, family)
        plain = nop_tower(2)
        extra = t.stage(2).dual.size_y() - plain.stage(2).dual.size_y()
        assert extra == len(t.stage(2).dual.x_blocks[t.stage(2).meta.insert_block])
        assert predicted_counts(t.stage(1), t.connector, family) == t.stage(2).counts()


class TestBuildStage:
    def test_extends_a_built_tower(self, lift3):
        stage = build_stage(lift3.stage(2), lift3.connector, lift3.family)
        assert stage.counts() == lift3.stage(3).counts()

    def test_build_tower_depth_one_is_the_seed(self):
        t = build_tower(loop_seed(), path_connector(), TowerFamilySpec(), 1)
        assert t.depth == 1
        assert t.stage(1).counts() == {"a": 6}
