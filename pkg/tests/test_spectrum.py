from itertools import combinations

import pytest

from core.k33 import find_k33, verify_k33
from core.spectrum import analyze, graph_homeomorphic, spec_b, spec_b_gen, subdivide
from core.tower import build_seed_stage
from models.dual import TwistPerm
from models.topgraph import K33Witness, SearchStatus, TopGraph, VertexKind
from models.tower import Flavor, TowerFamilySpec
from tests.conftest import conn_seed, loop_seed


def graph_from_edges(edges, free=()):
    graph = TopGraph()
    for u, v in edges:
        graph.add_vertex(u)
        graph.add_vertex(v)
    for index, (u, v) in enumerate(edges):
        graph.add_edge(("e", index), u, v)
    for index, v in enumerate(free):
        graph.add_vertex(v)
        graph.add_edge(("ray", index), v, None)
    return graph


def circle(n: int) -> TopGraph:
    return graph_from_edges([(k, (k + 1) % n) for k in range(n)])


def k33() -> TopGraph:
    return graph_from_edges([(a, b) for a in "abc" for b in "xyz"])


class TestSpecB:
    def test_identity_twist_has_two_components(self, r1_dual):
        summary = analyze(spec_b(r1_dual, TwistPerm.identity()))
        assert summary.pi0 == 2
        assert summary.vertex_count == 2
        assert summary.edge_count == 2

    def test_swap_twist_is_connected(self, r1_dual):
        swap = TwistPerm.from_cycles(r1_dual, {"p": [[0, 1]]})
        summary = analyze(spec_b(r1_dual, swap))
        assert summary.pi0 == 1
        assert summary.first_betti == 1

    def test_stage_graph_marks_zcells(self):
        stage = build_seed_stage(loop_seed(), TowerFamilySpec(zcell_index="u"))
        graph = spec_b_gen(stage)
        assert graph.vertices[("u", 0)].kind == VertexKind.ZCELL
        assert graph.vertices[("v", 0)].kind == VertexKind.X


class TestStageConnectivity:
    def test_conn_stages_are_connected(self, conn6):
        for stage in conn6.stages[:5]:
            assert analyze(spec_b_gen(stage)).pi0 == 1, stage.level

    def test_without_the_xcopy_the_summands_stay_apart(self):
        family = TowerFamilySpec(construction=Flavor.CONN, embed_xcopy=False)
        stage = build_seed_stage(conn_seed(), family)
        assert analyze(spec_b_gen(stage)).pi0 == 2


class TestAnalyze:
    def test_cut_vertex_and_free_ends(self):
        graph = graph_from_edges([(0, 1), (1, 2)], free=[2])
        summary = analyze(graph)
        assert summary.pi0 == 1
        assert summary.cut_vertices == [1, 2]
        assert summary.free_ends == 1
        assert summary.first_betti == 0

    def test_loop_with_a_tail_cuts_at_its_base(self):
        assert analyze(graph_from_edges([(0, 0), (0, 1)])).cut_vertices == [0]

    def test_figure_eight_cuts_at_the_wedge_point(self):
        assert analyze(graph_from_edges([(0, 0), (0, 0)])).cut_vertices == [0]

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_circles_have_no_cut_points(self, n):
        assert analyze(circle(n)).cut_vertices == []


class TestHomeomorphism:
    def test_subdivided_circle(self):
        assert graph_homeomorphic(circle(1), circle(4)).homeomorphic
        assert graph_homeomorphic(circle(3), subdivide(circle(3), 0, "mid")).homeomorphic

    def test_circle_versus_interval(self):
        interval = graph_from_edges([(0, 1)])
        result = graph_homeomorphic(circle(3), interval)
        assert not result.homeomorphic
        assert result.reason

    def test_theta_versus_figure_eight(self):
        theta = graph_from_edges([(0, 1), (0, 1), (0, 1)])
        eight = graph_from_edges([(0, 0), (0, 0)])
        assert not graph_homeomorphic(theta, eight).homeomorphic

    def test_rays_are_counted_at_vertices(self):
        one = graph_from_edges([(0, 1), (1, 2)], free=[1])
        other = graph_from_edges([(0, 1), (1, 2), (2, 3)], free=[2])
        assert graph_homeomorphic(one, other).homeomorphic
        assert not graph_homeomorphic(one, graph_from_edges([(0, 1), (1, 2)], free=[0])).homeomorphic


class TestK33:
    def test_found_and_verified(self):
        graph = k33()
        search = find_k33(graph)
        assert search.status == SearchStatus.FOUND
        assert verify_k33(graph, search.witness) == []

    def test_found_in_subdivision(self):
        graph = k33()
        for index in range(3):
            graph = subdivide(graph, index, ("mid", index))
        search = find_k33(graph)
        assert search.found
        assert verify_k33(graph, search.witness) == []

    def test_absent_in_complete_graph_on_five_vertices(self):
        graph = graph_from_edges(list(combinations(range(5), 2)))
        assert find_k33(graph).status == SearchStatus.ABSENT

    def test_absent_in_planar_prism(self):
        prism = graph_from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
        assert find_k33(prism).status == SearchStatus.ABSENT

    def test_budget_exhaustion_is_inconclusive(self):
        assert find_k33(k33(), budget=1).status == SearchStatus.INCONCLUSIVE

    def test_verify_rejects_shared_vertices(self):
        graph = k33()
        witness = find_k33(graph).witness
        a, b = next(iter(witness.paths))
        broken = dict(witness.paths)
        broken[(a, b)] = [a, witness.right[2], b]
        problems = verify_k33(graph, K33Witness(witness.left, witness.right, broken))
        assert problems

    @pytest.mark.parametrize("missing", [0, 4, 8])
    def test_verify_rejects_missing_edges(self, missing):
        edges = [(a, b) for a in "abc" for b in "xyz"]
        graph = k33()
        witness = find_k33(graph).witness
        pruned = graph_from_edges([edge for index, edge in enumerate(edges) if index != missing])
        assert verify_k33(pruned, witness)
