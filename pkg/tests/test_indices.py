"""Random index models: pmf exactness, certified truncation, sampling."""

import math

import numpy as np
import pytest
from numpy.random import Generator, Philox

from randclt.indices import (
    IndexConfigError,
    IndexTruncationError,
    deterministic,
    make_index,
    parse_index,
    shifted_geometric,
    shifted_poisson,
    uniform_index,
)


class TestPmf:
    def test_deterministic_point_mass(self):
        model = deterministic(7)
        assert model.pmf(7) == 1.0
        assert model.pmf(3) == 0.0

    def test_shifted_poisson_at_origin(self):
        # oracle: Poisson(2) pmf at 0 is e^-2
        model = shifted_poisson(2.0)
        assert float(model.pmf(1)) == pytest.approx(math.exp(-2.0), rel=1e-12)
        assert float(model.pmf(1)) == pytest.approx(0.1353352832366127, rel=1e-12)

    def test_geometric_pmf(self):
        model = shifted_geometric(0.2)
        assert float(model.pmf(1)) == pytest.approx(0.2, rel=1e-14)
        assert float(model.pmf(3)) == pytest.approx(0.2 * 0.8**2, rel=1e-13)

    def test_enumerated_mass_reaches_target(self):
        for model in (
            shifted_poisson(50.0),
            shifted_geometric(1.0 / 75),
            uniform_index(40),
            deterministic(12),
        ):
            assert float(model.probs.sum()) >= 1.0 - 1e-12
            assert model.truncation_tail_mass <= 1e-12

    def test_index_below_one_rejected(self):
        with pytest.raises(ValueError):
            deterministic(7).pmf(0)

    def test_bad_parameters(self):
        with pytest.raises(IndexConfigError):
            shifted_geometric(1.5)
        with pytest.raises(IndexConfigError):
            uniform_index(0)
        with pytest.raises(IndexConfigError):
            make_index("zeta", 10)


class TestExpectations:
    def test_deterministic_reduction_is_exact(self):
        model = deterministic(9)
        est = model.expect(lambda k: np.sqrt(k), abs_bound=100.0)
        assert est.value == 3.0
        assert est.truncation_error_bound == 0.0
        assert est.terms_used == 1

    def test_normalization(self):
        for model in (shifted_poisson(12.0), shifted_geometric(0.05), uniform_index(30)):
            est = model.expect(lambda k: np.ones_like(np.asarray(k, dtype=float)), 1.0)
            assert est.value == pytest.approx(1.0, abs=2e-12)

    def test_shifted_poisson_mean(self):
        # oracle: E(1 + Poisson(lam)) = 1 + lam
        model = shifted_poisson(3.0)
        est = model.expect(lambda k: np.asarray(k, dtype=float), abs_bound=1e4)
        assert est.value == pytest.approx(4.0, abs=1e-8)

    def test_scalar_callable_fallback(self):
        model = uniform_index(10)
        est = model.expect(lambda k: float(k) ** 2, abs_bound=100.0)
        assert est.value == pytest.approx(sum(k * k for k in range(1, 11)) / 10.0)

    def test_infinite_bound_rejected(self):
        model = shifted_poisson(4.0)
        with pytest.raises(ValueError):
            model.expect(lambda k: np.asarray(k, dtype=float), abs_bound=math.inf)


class TestSampling:
    def test_deterministic_always_n(self):
        model = deterministic(12)
        rng = Generator(Philox(key=[3, 1]))
        assert set(model.sample(rng, 100).tolist()) == {12}

    def test_uniform_mean_band(self):
        # oracle (n + 1) / 2 with a 4-standard-error band at 1e6 draws
        model = uniform_index(10)
        rng = Generator(Philox(key=[3, 2]))
        draws = model.sample(rng, 1_000_000)
        assert abs(float(np.mean(draws)) - 5.5) < 0.02

    def test_identical_seed_identical_draws(self):
        model = shifted_geometric(0.01)
        a = model.sample(Generator(Philox(key=[5, 5])), 1000)
        b = model.sample(Generator(Philox(key=[5, 5])), 1000)
        assert np.array_equal(a, b)

    def test_truncation_breach_raises(self):
        model = shifted_geometric(0.01, target=0.5)
        rng = Generator(Philox(key=[5, 6]))
        with pytest.raises(IndexTruncationError):
            model.sample(rng, 10_000)


class TestDivergence:
    def test_prob_of_small_index_decays(self):
        # realization of the divergence-in-probability requirement: the mass
        # below K = 10 decreases strictly along n and is near its closed-form
        # floor at n = 1000 (1e-2 for the uniform and geometric kinds, far
        # smaller for the shifted Poisson)
        for kind in ("poisson", "geometric", "uniform"):
            probs = [make_index(kind, n).prob_at_most(10) for n in (10, 100, 1000)]
            assert probs[0] > probs[1] > probs[2], kind
            assert probs[2] < 1.05e-2, kind
        assert make_index("poisson", 1000).prob_at_most(10) < 1e-3

    def test_prob_matches_enumeration(self):
        for kind in ("poisson", "geometric", "uniform"):
            model = make_index(kind, 50)
            enum = float(model.probs[model.support <= 10].sum())
            assert model.prob_at_most(10) == pytest.approx(enum, abs=1e-12), kind


class TestParsing:
    def test_kind_only(self):
        assert parse_index("geometric") == ("geometric", None)

    def test_kind_with_param(self):
        assert parse_index("det:5") == ("det", 5.0)

    def test_unknown_kind(self):
        with pytest.raises(IndexConfigError):
            parse_index("zipf:2")

    def test_non_numeric_param(self):
        with pytest.raises(IndexConfigError):
            parse_index("poisson:many")

    def test_make_index_defaults(self):
        assert make_index("det", 42).params["value"] == 42
        assert make_index("poisson", 6).params["lam"] == 6.0
        assert make_index("geometric", 20).params["p"] == pytest.approx(0.05)
        assert make_index("uniform", 15).params["m"] == 15
