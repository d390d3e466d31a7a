import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ownet.control import controls, joint_controls
from ownet.errors import UnknownEntityError
from ownet.model import Entity, OwnershipGraph
from ownet.ownership import integrated_ownership

from conftest import brute_control_closure, random_graph


def _g(edges, persons=("A",), companies=("1", "2", "3")):
    ents = [Entity(p, "person") for p in persons] + [Entity(c, "company") for c in companies]
    return OwnershipGraph(ents, edges)


class TestControls:
    def test_direct_majority(self):
        g = _g([("A", "3", 0.6)])
        res = controls(g, "A")
        assert res.controlled == {"3"}
        assert res.control_share["3"] == 0.6

    def test_fig4b_indirect(self):
        g = _g([("A", "1", 0.8), ("A", "3", 0.3), ("1", "3", 0.31)])
        res = controls(g, "A")
        assert res.controlled == {"1", "3"}
        assert res.control_share["3"] == 0.61

    def test_exactly_half_does_not_control(self):
        g = _g([("A", "1", 0.5)])
        res = controls(g, "A")
        assert res.controlled == frozenset()
        assert res.control_share["1"] == 0.5

    def test_chain_of_control(self):
        g = _g([("A", "1", 0.51), ("1", "2", 0.51), ("2", "3", 0.51)])
        assert controls(g, "A").controlled == {"1", "2", "3"}

    def test_controller_not_in_controlled(self):
        g = _g([("1", "2", 0.9), ("2", "1", 0.9)])
        res = controls(g, "1")
        assert "1" not in res.controlled
        assert res.controlled == {"2"}
        # the closed loop still reports the accumulated inflow to the seed
        assert res.control_share["1"] == 0.9

    def test_unknown_entity(self):
        g = _g([])
        with pytest.raises(UnknownEntityError):
            controls(g, "ghost")

    def test_share_map_covers_partial_holdings(self):
        g = _g([("A", "1", 0.8), ("1", "2", 0.2)])
        res = controls(g, "A")
        assert res.controlled == {"1"}
        assert res.control_share["2"] == pytest.approx(0.2)

    def test_to_dict_sorted(self):
        g = _g([("A", "1", 0.9), ("A", "2", 0.9)])
        d = controls(g, "A").to_dict()
        assert d["controlled"] == ["1", "2"]
        assert list(d["control_share"]) == sorted(d["control_share"])


class TestJointControls:
    def test_fig11_shape(self):
        ents = [Entity(x, "company") for x in ("1", "2", "A", "B", "C")]
        g = OwnershipGraph(
            ents,
            [("1", "A", 0.51), ("A", "B", 0.2), ("2", "C", 0.9), ("C", "B", 0.31)],
        )
        res = joint_controls(g, ["1", "2"])
        assert res.controlled == {"A", "B", "C"}
        assert res.control_share["B"] == 0.51
        # individually neither controls B
        assert "B" not in controls(g, "1").controlled
        assert "B" not in controls(g, "2").controlled

    def test_singleton_equals_controls(self):
        g = _g([("A", "1", 0.8), ("1", "2", 0.3), ("A", "2", 0.21)])
        single = controls(g, "A")
        joint = joint_controls(g, ["A"])
        assert joint.controlled == single.controlled
        assert joint.control_share == single.control_share

    def test_empty_handed_coalition(self):
        g = _g([])
        res = joint_controls(g, ["A", "1"])
        assert res.controlled == frozenset()

    def test_empty_coalition_rejected(self):
        g = _g([])
        with pytest.raises(ValueError):
            joint_controls(g, [])

    def test_subset_monotonicity(self):
        g = _g([("A", "1", 0.3), ("2", "1", 0.3), ("2", "3", 0.9)])
        solo = controls(g, "A").controlled
        coal = joint_controls(g, ["A", "2"]).controlled
        assert solo <= coal


class TestOracle:
    @given(st.integers(0, 2000))
    @settings(max_examples=200, deadline=None)
    def test_brute_force_agreement(self, seed):
        g = random_graph(seed, max_nodes=8, max_extra_edges=16, incoming_cap=2.0)
        for e in g.entities:
            got = controls(g, e.id).controlled | {e.id}
            for shuffle in (0, 1, 2):
                assert got == brute_control_closure(g, [e.id], shuffle_seed=shuffle)

    @given(st.integers(0, 800))
    @settings(max_examples=60, deadline=None)
    def test_monotone_under_edge_addition(self, seed):
        import random as _random

        g = random_graph(seed, max_nodes=7, max_extra_edges=12, incoming_cap=2.0)
        companies = [e.id for e in g.entities if e.kind == "company"]
        if not companies:
            return
        rng = _random.Random(seed)
        owner, owned = rng.choice(g.ids), rng.choice(companies)
        new_share = min(1.0, g.share_of(owner, owned) + 0.2)
        g2 = g.with_updated_edges({(owner, owned): new_share})
        for e in g.entities:
            assert controls(g, e.id).controlled <= controls(g2, e.id).controlled

    @given(st.integers(0, 800))
    @settings(max_examples=60, deadline=None)
    def test_control_implies_positive_ownership(self, seed):
        g = random_graph(seed, max_nodes=7, max_extra_edges=12)
        for e in g.entities:
            res = controls(g, e.id)
            if not res.controlled:
                continue
            vec = integrated_ownership(g, e.id, tol=1e-12)
            assert vec.converged
            for z in res.controlled:
                assert vec.value(z) > 0.0
