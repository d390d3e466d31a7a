import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ownet.analytics import weakly_connected_components
from ownet.conglomerates import (
    conglomerate_indicators,
    conglomerates,
    undirected_ownership,
    vicinity_pairs,
)
from ownet.errors import DivergentCycleError
from ownet.model import Entity, OwnershipGraph

from conftest import brute_conglomerates, load_fixture, random_graph


@pytest.fixture(scope="module")
def fig6():
    return load_fixture("fig6")


def _companies(*ids):
    return [Entity(i, "company") for i in ids]


class TestUndirected:
    def test_one_direction(self):
        g = OwnershipGraph(_companies("x", "y"), [("x", "y", 0.7)])
        assert undirected_ownership(g, "x", "y", 0.5) == pytest.approx(0.7)

    def test_no_path(self):
        g = OwnershipGraph(_companies("x", "y"), [])
        assert undirected_ownership(g, "x", "y", 0.5) == 0.0

    def test_max_of_directions(self):
        g = OwnershipGraph(_companies("x", "y"), [("x", "y", 0.3), ("y", "x", 0.6)])
        assert undirected_ownership(g, "x", "y", 0.1) == pytest.approx(0.6)

    def test_symmetry(self):
        g = OwnershipGraph(_companies("x", "y", "z"), [("x", "y", 0.4), ("y", "z", 0.9)])
        assert undirected_ownership(g, "x", "z", 0.1) == undirected_ownership(g, "z", "x", 0.1)

    def test_divergence_propagates(self):
        g = OwnershipGraph(
            _companies("x", "y", "z"),
            [("x", "y", 0.5), ("y", "z", 1.0), ("z", "y", 1.0)],
        )
        with pytest.raises(DivergentCycleError):
            undirected_ownership(g, "x", "y", 0.5)

    def test_person_rejected(self):
        g = OwnershipGraph([Entity("A", "person"), Entity("x", "company")], [])
        with pytest.raises(ValueError):
            undirected_ownership(g, "A", "x", 0.5)


class TestVicinity:
    def test_fig6_pairs(self, fig6):
        pairs = vicinity_pairs(fig6, 0.5)
        assert pairs == {
            frozenset({"3", "9"}),
            frozenset({"3", "5"}),
            frozenset({"5", "9"}),
        }

    def test_below_threshold(self):
        g = OwnershipGraph(_companies("x", "y"), [("x", "y", 0.4)])
        assert vicinity_pairs(g, 0.5) == set()

    def test_person_third_party(self):
        ents = [Entity("A", "person")] + _companies("x", "y")
        g = OwnershipGraph(ents, [("A", "x", 0.8), ("A", "y", 0.9)])
        assert vicinity_pairs(g, 0.5) == {frozenset({"x", "y"})}
        # the person is a third party, never a member
        part = conglomerates(g, 0.5)
        assert set(part.assignment) == {"x", "y"}

    def test_indirect_ownership_counts(self):
        # x owns y via an intermediate: integrated ownership 0.72 > 0.5
        g = OwnershipGraph(_companies("x", "m", "y"), [("x", "m", 0.9), ("m", "y", 0.8)])
        pairs = vicinity_pairs(g, 0.5)
        assert frozenset({"x", "y"}) in pairs


class TestPartition:
    def test_fig6_single_conglomerate(self, fig6):
        part = conglomerates(fig6, 0.5)
        assert part.conglomerates["3"] == ("3", "5", "9")
        assert part.assignment["9"] == "3"
        assert part.assignment["7"] == "7"
        assert part.to_dict()["singletons"] == ["7"]

    def test_two_disjoint_chains(self):
        g = OwnershipGraph(
            _companies("a", "b", "c", "d"),
            [("a", "b", 0.9), ("c", "d", 0.9)],
        )
        part = conglomerates(g, 0.5)
        assert part.nontrivial() == {"a": ("a", "b"), "c": ("c", "d")}

    def test_eps_above_everything_gives_singletons(self):
        g = OwnershipGraph(_companies("a", "b"), [("a", "b", 0.9)])
        part = conglomerates(g, 0.95)
        assert part.nontrivial() == {}
        assert set(part.assignment) == {"a", "b"}

    def test_every_company_assigned_exactly_once(self):
        g = random_graph(99, max_nodes=8)
        part = conglomerates(g, 0.3)
        companies = {e.id for e in g.entities if e.kind == "company"}
        assert set(part.assignment) == companies
        seen = [m for members in part.conglomerates.values() for m in members]
        assert sorted(seen) == sorted(companies)

    @given(st.integers(0, 600))
    @settings(max_examples=60, deadline=None)
    def test_brute_force_equivalence(self, seed):
        g = random_graph(seed, max_nodes=8, max_extra_edges=12)
        got = {frozenset(m) for m in conglomerates(g, 0.3).conglomerates.values()}
        assert got == brute_conglomerates(g, 0.3)

    @given(st.integers(0, 600))
    @settings(max_examples=40, deadline=None)
    def test_threshold_refinement(self, seed):
        g = random_graph(seed, max_nodes=8, max_extra_edges=12)
        coarse = conglomerates(g, 0.1)
        fine = conglomerates(g, 0.5)
        for members in fine.conglomerates.values():
            containers = {coarse.assignment[m] for m in members}
            assert len(containers) == 1

    @given(st.integers(0, 600))
    @settings(max_examples=40, deadline=None)
    def test_epsilon_to_zero_degenerates_to_reachability(self, seed):
        g = random_graph(seed, max_nodes=8, max_extra_edges=12)
        part = conglomerates(g, 1e-9)
        wcc = weakly_connected_components(g)
        companies = {e.id for e in g.entities if e.kind == "company"}
        expected = {}
        for members in wcc.components.values():
            comp_members = sorted(m for m in members if m in companies)
            if comp_members:
                expected[comp_members[0]] = tuple(comp_members)
        assert part.conglomerates == expected


class TestParallelism:
    def test_identical_results_at_any_worker_count(self, monkeypatch):
        g = random_graph(321, max_nodes=8, max_extra_edges=12)
        monkeypatch.setenv("OWNET_THREADS", "1")
        sequential = conglomerates(g, 0.3)
        monkeypatch.setenv("OWNET_THREADS", "4")
        threaded = conglomerates(g, 0.3)
        assert sequential.conglomerates == threaded.conglomerates
        assert sequential.assignment == threaded.assignment


class TestIndicators:
    def test_fig6_indicator_row(self, fig6):
        part = conglomerates(fig6, 0.5)
        ind = conglomerate_indicators(part, fig6)
        assert ind.conglomerate_count == 1
        assert ind.avg_companies_per_cong == 3.0
        assert ind.avg_activities_per_cong == 2.0
        assert ind.max_cong_size == 3
        assert ind.max_activities_per_cong == 2
        assert ind.avg_regions_per_cong == 1.0

    def test_all_singletons(self):
        g = OwnershipGraph(_companies("a", "b"), [])
        ind = conglomerate_indicators(conglomerates(g, 0.5), g)
        assert ind.conglomerate_count == 0
        assert ind.avg_companies_per_cong == 0.0
        assert ind.max_cong_size == 0

    def test_sizes_two_and_four(self):
        ents = _companies("a", "b", "c", "d", "e", "f")
        g = OwnershipGraph(
            ents,
            [("a", "b", 0.9), ("c", "d", 0.9), ("c", "e", 0.9), ("c", "f", 0.9)],
        )
        ind = conglomerate_indicators(conglomerates(g, 0.5), g)
        assert ind.max_cong_size == 4
        assert ind.avg_companies_per_cong == 3.0

    def test_csv_export(self, fig6):
        csv_text = conglomerates(fig6, 0.5).to_csv()
        lines = csv_text.strip().split("\n")
        assert lines[0] == "company_id,conglomerate_id"
        assert "5,3" in lines
