import pytest

from models.tower import BlockKind, FactorOverride, Layout, TowerFamilySpec, ZPathEntry
from tests.conftest import conn_connector, conn_seed, loop_seed, path_connector, tower
from validators import check_conditions, get_condition, get_registry

ALL_NAMES = ["m>1", "nlc1", "nlc2", "nop1", "nop2", "clsg", "np4ni", "sccb",
             "phiCfp", "phiCl", "phiCx", "11*", "11reg"]


def level_one_report(t, names=None):
    return check_conditions(t.stage(1), t.stage(2), t.connector, t.family, names=names)


def failing(report):
    return {result.name for result in report.failures()}


MUTATIONS = {
    "nlc1": lambda: tower(loop_seed(), path_connector(factor_overrides=[FactorOverride(count=0, i="v")]),
                          cycles={"a": [[0, 3]]}),
    "nlc2": lambda: tower(loop_seed(), path_connector(layouts={BlockKind.UPPER_REV: Layout.ALIGNED}),
                          cycles={"a": [[0, 3]]}),
    "nop1": lambda: tower(loop_seed(), path_connector(half_low=6), cycles={"a": [[0, 3]]}),
    "nop2": lambda: tower(loop_seed(), path_connector(width=2, affine=2, half_low=9, factor=2),
                          cycles={"a": [[0, 3]]}),
    "clsg": lambda: tower(loop_seed(size=8, per_index=4),
                          path_connector(layouts={BlockKind.UPPER_REV: Layout.STACKED}),
                          cycles={"a": [[0, 4]]}),
    "np4ni": lambda: tower(loop_seed(size=4, per_index=2), path_connector(), cycles={"a": [[0, 2]]}),
}


class TestRegistry:
    def test_every_condition_is_registered(self):
        assert sorted(get_registry().list_registered()) == sorted(ALL_NAMES)

    def test_lookup_by_name(self):
        assert get_condition("nop1").name == "nop1"
        assert get_condition("unknown") is None


class TestPathConditions:
    def test_default_tower_passes_everything(self, nop3):
        for level in (1, 2):
            report = check_conditions(nop3.stage(level), nop3.stage(level + 1), nop3.connector, nop3.family)
            assert report.passed, report.summary()

    def test_only_path_checkers_run(self, nop3):
        names = set(level_one_report(nop3).summary())
        assert "phiCfp" not in names and "phiCl" not in names
        assert {"nlc1", "nop2", "11reg"} <= names

    @pytest.mark.parametrize("condition", sorted(MUTATIONS))
    def test_mutation_fails_only_its_condition(self, condition):
        report = level_one_report(MUTATIONS[condition]())
        assert failing(report) == {condition}
        failure = report.get(condition)
        assert failure.message
        assert failure.witness is not None

    def test_toggled_names_are_required(self):
        report = level_one_report(MUTATIONS["nop1"](), names=["nop1"])
        assert report.first_failure(required_only=True).name == "nop1"

    def test_untoggled_failures_are_not_required(self):
        report = level_one_report(MUTATIONS["nop1"]())
        assert report.first_failure(required_only=True) is None
        assert report.first_failure().name == "nop1"

    def test_toggle_makes_failure_required(self):
        t = MUTATIONS["nop2"]()
        t.family = TowerFamilySpec(toggles=["nop2"])
        report = level_one_report(t)
        assert report.get("nop2").required


class TestConnConditions:
    def test_conn_tower_has_no_required_failure(self, conn6):
        for lower, upper in zip(conn6.stages, conn6.stages[1:]):
            report = check_conditions(lower, upper, conn6.connector, conn6.family)
            assert report.first_failure(required_only=True) is None, report.summary()

    def test_small_seed_fails_block_size(self, conn6):
        report = check_conditions(conn6.stage(1), conn6.stage(2), conn6.connector, conn6.family)
        assert report.get("np4ni").passed is False
        assert report.get("phiCfp").passed

    def test_constant_entries_are_rejected(self, conn6):
        spec = conn_connector().model_copy(update={"kinds": {BlockKind.IDENT: 2, BlockKind.HALF_LOW: 1}})
        report = check_conditions(conn6.stage(1), conn6.stage(2), spec, conn6.family, names=["phiCl"])
        assert not report.passed

    def test_zcell_paths_touch_the_base_point(self):
        family = TowerFamilySpec(construction="conn", zcell_index="u")
        spec = conn_connector().model_copy(update={
            "zcell_paths": [ZPathEntry(q="a", i="u", starts_at_base=False, ends_at_base=False)]})
        t = tower(conn_seed(), spec, family)
        report = level_one_report(t, names=["phiCx"])
        assert report.get("phiCx").passed is False
        relaxed = spec.model_copy(update={"zcell_paths": [ZPathEntry(q="a", i="u", starts_at_base=False)]})
        assert check_conditions(t.stage(1), t.stage(2), relaxed, family, names=["phiCx"]).passed


class TestConstantAndBranchingCounts:
    def test_no_constant_entries_break_nlc1(self):
        t = tower(loop_seed(), path_connector(half_low=0), cycles={"a": [[0, 3]]})
        result = level_one_report(t, names=["nlc1"]).get("nlc1")
        assert result.passed is False
        assert result.witness == ("a", "half", 0)

    def test_two_constant_entries_are_enough_for_nlc1(self, lift3):
        assert level_one_report(lift3, names=["nlc1"]).get("nlc1").passed

    def test_three_distinct_ends_among_more_entries(self):
        t = tower(loop_seed(), path_connector(affine=4), cycles={"a": [[0, 3]]})
        upper = t.stage(2).dual
        ends = [upper.b1[("upper", "a", "a", k, ("a", 0))] for k in range(4)]
        assert len(set(ends)) == 3
        assert level_one_report(t, names=["nop2"]).get("nop2").passed
