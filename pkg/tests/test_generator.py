import numpy as np
import pytest

from ownet.errors import ConfigError
from ownet.generator import GeneratorConfig, generate
from ownet.model import graph_to_csv_strings, validate
from ownet.ownership import check_convergence, integrated_ownership


class TestConfig:
    def test_rejects_bad_counts(self):
        with pytest.raises(ConfigError):
            GeneratorConfig(node_count=0)

    def test_rejects_all_persons(self):
        with pytest.raises(ConfigError, match="person_fraction"):
            GeneratorConfig(node_count=10, person_fraction=1.0)

    def test_rejects_unknown_distribution(self):
        with pytest.raises(ConfigError):
            GeneratorConfig(node_count=10, share_distribution="zipf")

    def test_rejects_flat_exponent(self):
        with pytest.raises(ConfigError):
            GeneratorConfig(node_count=10, attachment_exponent=1.0)


class TestGenerate:
    def test_single_node(self):
        g = generate(GeneratorConfig(node_count=1))
        assert g.node_count == 1
        assert g.edge_count == 0

    def test_deterministic_byte_identical(self):
        a = generate(GeneratorConfig(node_count=1000, seed=42))
        b = generate(GeneratorConfig(node_count=1000, seed=42))
        assert graph_to_csv_strings(a) == graph_to_csv_strings(b)

    def test_different_seeds_differ(self):
        a = generate(GeneratorConfig(node_count=1000, seed=1))
        b = generate(GeneratorConfig(node_count=1000, seed=2))
        assert a != b

    def test_validates_clean(self):
        g = generate(GeneratorConfig(node_count=5000, seed=3))
        assert validate(g).errors == ()

    def test_persons_never_owned(self):
        g = generate(GeneratorConfig(node_count=3000, seed=4))
        assert g.is_company[g.edge_dst].all()

    def test_shares_strictly_below_one(self):
        g = generate(GeneratorConfig(node_count=3000, seed=5))
        assert g.edge_w.max() < 1.0
        assert g.edge_w.min() > 0.0

    def test_incoming_sums_bounded(self):
        g = generate(GeneratorConfig(node_count=3000, seed=6))
        assert g.incoming_share_sums().max() <= 0.98 + 1e-9

    def test_uniform_mode(self):
        g = generate(GeneratorConfig(node_count=2000, seed=7, share_distribution="uniform"))
        assert validate(g).errors == ()
        assert g.incoming_share_sums().max() <= 0.98 + 1e-9

    def test_no_divergent_cycles_and_sampled_convergence(self):
        g = generate(GeneratorConfig(node_count=5000, seed=8))
        rep = check_convergence(g, check_sources=False)
        assert rep.divergent_cycles == ()
        for eid in list(g.ids)[::25]:
            assert integrated_ownership(g, eid).converged

    @pytest.mark.parametrize("seed", range(10))
    def test_heavy_out_degree_tail(self, seed):
        g = generate(GeneratorConfig(node_count=10_000, seed=seed, attachment_exponent=2.5))
        out_deg = np.diff(g.out_indptr)
        median = max(float(np.median(out_deg)), 1.0)
        assert out_deg.max() >= 20 * median

    def test_regions_and_codes_assigned(self):
        g = generate(GeneratorConfig(node_count=500, seed=9, region_count=5))
        regions = {e.region for e in g.entities}
        assert regions <= {f"R{i:02d}" for i in range(5)}
        for e in g.entities:
            if e.kind == "company":
                assert e.activity_code in GeneratorConfig(node_count=1).activity_codes
            else:
                assert e.activity_code is None
