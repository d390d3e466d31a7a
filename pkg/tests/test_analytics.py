import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ownet.analytics import (
    analytics_report,
    impact_by_region,
    strongly_connected_components,
    weakly_connected_components,
)
from ownet.errors import SubgraphError
from ownet.model import Entity, OwnershipGraph, filter_by_activity

from conftest import brute_scc_sets, brute_wcc_sets, random_graph


def _companies(*ids, region=None):
    return [Entity(i, "company", region=region) for i in ids]


class TestComponents:
    def test_three_cycle_one_scc(self):
        g = OwnershipGraph(_companies("1", "2", "3"),
                           [("1", "2", 0.5), ("2", "3", 0.5), ("3", "1", 0.5)])
        p = strongly_connected_components(g)
        assert set(p.components) == {"1"}
        assert p.components["1"] == ("1", "2", "3")

    def test_chain_singletons(self):
        ents = [Entity("A", "person")] + _companies("1", "2")
        g = OwnershipGraph(ents, [("A", "1", 0.5), ("1", "2", 0.5)])
        p = strongly_connected_components(g)
        assert p.count == 3
        assert all(len(m) == 1 for m in p.components.values())

    def test_fig3c_scc_plus_person(self):
        ents = [Entity("A", "person")] + _companies("1", "2", "3")
        g = OwnershipGraph(ents, [("A", "1", 0.5), ("1", "2", 0.4), ("2", "3", 0.4), ("3", "1", 0.4)])
        p = strongly_connected_components(g)
        assert p.components["1"] == ("1", "2", "3")
        assert p.components["A"] == ("A",)

    def test_two_disjoint_wccs(self):
        ents = [Entity("A", "person"), Entity("B", "person")] + _companies("1", "2")
        g = OwnershipGraph(ents, [("A", "1", 0.5), ("B", "2", 0.5)])
        p = weakly_connected_components(g)
        assert p.count == 2
        assert all(len(m) == 2 for m in p.components.values())

    def test_fig8_single_wcc(self, fig8):
        assert weakly_connected_components(fig8).count == 2  # {A,B,C} plus isolated 1

    def test_empty_graph(self):
        g = OwnershipGraph([], [])
        assert weakly_connected_components(g).count == 0
        assert strongly_connected_components(g).count == 0

    @given(st.integers(0, 500))
    @settings(max_examples=120, deadline=None)
    def test_matches_reachability_oracle(self, seed):
        g = random_graph(seed, max_nodes=12, max_extra_edges=20)
        scc = {frozenset(m) for m in strongly_connected_components(g).components.values()}
        wcc = {frozenset(m) for m in weakly_connected_components(g).components.values()}
        assert scc == brute_scc_sets(g)
        assert wcc == brute_wcc_sets(g)

    @given(st.integers(0, 500))
    @settings(max_examples=60, deadline=None)
    def test_scc_refines_wcc(self, seed):
        g = random_graph(seed, max_nodes=12, max_extra_edges=20)
        wcc = weakly_connected_components(g).membership
        for members in strongly_connected_components(g).components.values():
            assert len({wcc[m] for m in members}) == 1


class TestReport:
    def test_triangle_clustering(self):
        g = OwnershipGraph(_companies("1", "2", "3"),
                           [("1", "2", 0.5), ("2", "3", 0.5), ("3", "1", 0.5)])
        rep = analytics_report(g)
        assert rep.avg_clustering_coefficient == pytest.approx(1.0)

    def test_star_degrees(self):
        ents = [Entity("A", "person")] + _companies("1", "2", "3")
        g = OwnershipGraph(ents, [("A", "1", 0.5), ("A", "2", 0.5), ("A", "3", 0.5)])
        rep = analytics_report(g)
        assert rep.avg_clustering_coefficient == 0.0
        assert rep.max_out_degree == 3
        assert rep.avg_out_degree == pytest.approx(0.75)
        assert rep.avg_in_degree == pytest.approx(0.75)

    def test_self_loop_count(self):
        g = OwnershipGraph(_companies("1"), [("1", "1", 0.2)])
        assert analytics_report(g).self_loop_count == 1

    def test_degree_histogram_sums_to_nodes(self):
        g = random_graph(123, max_nodes=12, max_extra_edges=20)
        rep = analytics_report(g)
        assert sum(rep.degree_histogram.values()) == g.node_count

    def test_degree_sums(self):
        g = random_graph(7, max_nodes=12, max_extra_edges=20)
        rep = analytics_report(g)
        assert rep.avg_in_degree * rep.node_count == pytest.approx(rep.edge_count)

    def test_empty_graph_zeros(self):
        rep = analytics_report(OwnershipGraph([], []))
        assert rep.node_count == 0
        assert rep.avg_wcc_size == 0.0
        assert rep.degree_histogram == {}

    def test_json_schema(self):
        rep = analytics_report(random_graph(5))
        d = json.loads(json.dumps(rep.to_dict()))
        assert set(d) == {
            "node_count", "person_count", "company_count", "edge_count",
            "scc_count", "wcc_count", "max_scc_size", "max_wcc_size",
            "avg_wcc_size", "avg_in_degree", "avg_out_degree",
            "max_in_degree", "max_out_degree", "avg_clustering_coefficient",
            "self_loop_count", "degree_histogram",
        }
        hist = d["degree_histogram"]
        assert hist == sorted(hist)

    @given(st.integers(0, 300))
    @settings(max_examples=30, deadline=None)
    def test_order_independence(self, seed):
        g = random_graph(seed, max_nodes=10, max_extra_edges=14)
        shuffled = OwnershipGraph(list(reversed(g.entities)), list(g.edge_triples()))
        assert analytics_report(g) == analytics_report(shuffled)


class TestImpact:
    def _base(self):
        ents = [
            Entity("1", "company", activity_code="47.11", region="Lazio"),
            Entity("2", "company", activity_code="56.10", region="Lazio"),
            Entity("3", "company", activity_code="56.10", region="Veneto"),
        ]
        return OwnershipGraph(ents, [])

    def test_closed_fractions(self):
        base = self._base()
        filtered = filter_by_activity(base, {"47"})
        impact = impact_by_region(base, filtered)
        assert impact["Lazio"] == {"total": 2, "closed": 1, "closed_fraction": 0.5}
        assert impact["Veneto"] == {"total": 1, "closed": 1, "closed_fraction": 1.0}

    def test_identity_filter_zero_closed(self):
        base = self._base()
        impact = impact_by_region(base, base)
        assert all(v["closed"] == 0 and v["closed_fraction"] == 0.0 for v in impact.values())

    def test_not_a_subgraph(self):
        base = self._base()
        other = OwnershipGraph([Entity("9", "company", region="Lazio")], [])
        with pytest.raises(SubgraphError):
            impact_by_region(base, other)

    def test_unknown_region_bucket(self):
        base = OwnershipGraph([Entity("1", "company", activity_code="47.11")], [])
        filtered = filter_by_activity(base, {"99"})
        impact = impact_by_region(base, filtered)
        assert impact["unknown"]["closed"] == 1
