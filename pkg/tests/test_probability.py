import itertools

import numpy as np
import pytest

from dppci import (
    DppModel,
    Event,
    IndexOutOfRangeError,
    IndexSet,
    NumericalFailureError,
    OverlappingSetsError,
    conditional_kernel,
    conditional_kernel_given_excluded,
    conditional_kernel_given_included,
    exact_prob,
    inclusion_prob,
    k_from_l,
    mixed_prob,
    schur_complement,
    validate_ensemble,
)
from dppci.probability import _clamp_probability
from generators import random_model

DEMO_K = [
    [0.05, 0.0, 0.1],
    [0.0, 0.8, 0.2],
    [0.1, 0.2, 0.6],
]


@pytest.fixture(scope="module")
def demo_model():
    return DppModel.from_marginal(DEMO_K)


def all_subsets(n):
    for r in range(n + 1):
        yield from (IndexSet(c) for c in itertools.combinations(range(1, n + 1), r))


class TestInclusionProb:
    def test_demo_single_element(self, demo_model):
        assert inclusion_prob(demo_model, [3]) == pytest.approx(0.6, abs=1e-12)

    def test_empty_set_is_one(self, demo_model):
        assert inclusion_prob(demo_model, []) == 1.0

    def test_demo_pair(self, demo_model):
        assert inclusion_prob(demo_model, [1, 2]) == pytest.approx(0.04, abs=1e-12)

    def test_out_of_range(self, demo_model):
        with pytest.raises(IndexOutOfRangeError):
            inclusion_prob(demo_model, [4])


class TestExactProb:
    def test_scalar_ensemble_half_half(self):
        model = DppModel.from_ensemble([[1.0]])
        assert exact_prob(model, [1]) == pytest.approx(0.5, abs=1e-12)
        assert exact_prob(model, []) == pytest.approx(0.5, abs=1e-12)

    def test_diagonal_ensemble(self):
        model = DppModel.from_ensemble(np.diag([1.0, 3.0]))
        assert exact_prob(model, [1, 2]) == pytest.approx(3.0 / 8.0, abs=1e-12)

    def test_normalization(self):
        rng = np.random.default_rng(101)
        for n in (2, 4, 6):
            model = random_model(rng, n)
            total = sum(exact_prob(model, s) for s in all_subsets(n))
            assert total == pytest.approx(1.0, abs=1e-10)


class TestMixedProb:
    def test_demo_values(self, demo_model):
        assert mixed_prob(demo_model, Event([1], [2])) == pytest.approx(0.01, abs=1e-12)
        assert mixed_prob(demo_model, Event([1, 3], [2])) == pytest.approx(0.006, abs=1e-12)

    def test_trivial_event(self, demo_model):
        assert mixed_prob(demo_model, Event([], [])) == 1.0

    def test_reduces_to_inclusion(self, demo_model):
        for a in ([1], [2, 3], [1, 3]):
            assert mixed_prob(demo_model, Event(a, [])) == pytest.approx(
                inclusion_prob(demo_model, a), abs=1e-14
            )

    def test_pure_exclusion_matches_complement_inclusion(self):
        rng = np.random.default_rng(13)
        model = random_model(rng, 5)
        comp = DppModel.from_marginal(np.eye(5) - model.marginal.array)
        for b in ([2], [1, 4], [3, 5]):
            assert mixed_prob(model, Event([], b)) == pytest.approx(
                inclusion_prob(comp, b), abs=1e-12
            )

    def test_overlap_rejected(self, demo_model):
        with pytest.raises(OverlappingSetsError):
            mixed_prob(demo_model, Event([1], [1]))

    def test_inclusion_exclusion_consistency(self):
        rng = np.random.default_rng(17)
        model = random_model(rng, 5)
        a, b = IndexSet([1, 3]), IndexSet([2])
        direct = mixed_prob(model, Event(a, b))
        summed = sum(
            exact_prob(model, s)
            for s in all_subsets(5)
            if set(a).issubset(s.members) and not set(b) & set(s.members)
        )
        assert direct == pytest.approx(summed, abs=1e-10)


class TestComplementDuality:
    def test_exact_prob_through_complement_model(self):
        rng = np.random.default_rng(23)
        for n in (3, 5):
            model = random_model(rng, n)
            comp = DppModel.from_marginal(np.eye(n) - model.marginal.array)
            for s in all_subsets(n):
                assert exact_prob(model, s) == pytest.approx(
                    exact_prob(comp, s.complement(n)), abs=1e-10
                )


class TestModelConsistency:
    def test_kernels_mutually_consistent(self):
        rng = np.random.default_rng(31)
        for n in (2, 5, 8):
            model = random_model(rng, n)
            np.testing.assert_allclose(
                k_from_l(model.ensemble).array, model.marginal.array, atol=1e-9
            )

    def test_from_ensemble_round_trip(self):
        larr = np.array([[2.0, 0.5], [0.5, 1.0]])
        model = DppModel.from_ensemble(larr)
        np.testing.assert_allclose(model.ensemble.array, larr, atol=1e-14)


class TestConditionalKernels:
    def test_inclusion_empty_conditioning(self, demo_model):
        ck = conditional_kernel_given_included(demo_model, [])
        np.testing.assert_array_equal(ck.array, demo_model.marginal.array)
        assert ck.labels == (1, 2, 3)

    def test_inclusion_demo_matches_schur(self, demo_model):
        ck = conditional_kernel_given_included(demo_model, [3])
        s = schur_complement(demo_model.marginal.matrix, IndexSet([3]))
        np.testing.assert_allclose(ck.array, s.array, atol=1e-15)
        assert ck.labels == (1, 2)

    def test_inclusion_reproduces_probability_ratio(self):
        rng = np.random.default_rng(37)
        for trial in range(15):
            n = int(rng.integers(3, 8))
            model = random_model(rng, n)
            c, a = _random_pair(rng, n)
            ck = conditional_kernel_given_included(model, c)
            cond_model = ck.model()
            local_a = IndexSet(int(p) + 1 for p in ck.local_positions(a))
            lhs = inclusion_prob(cond_model, local_a)
            rhs = inclusion_prob(model, a.union(c)) / inclusion_prob(model, c)
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_exclusion_diagonal_example(self):
        model = DppModel.from_marginal(np.diag([0.3, 0.7]))
        ck = conditional_kernel_given_excluded(model, [2])
        np.testing.assert_allclose(ck.array, [[0.3]], atol=1e-14)
        assert ck.labels == (1,)

    def test_exclusion_reproduces_probability_ratio(self):
        rng = np.random.default_rng(41)
        for trial in range(15):
            n = int(rng.integers(3, 8))
            model = random_model(rng, n)
            c, a = _random_pair(rng, n)
            ck = conditional_kernel_given_excluded(model, c)
            local_a = IndexSet(int(p) + 1 for p in ck.local_positions(a))
            lhs = inclusion_prob(ck.model(), local_a)
            rhs = mixed_prob(model, Event(a, c)) / mixed_prob(model, Event([], c))
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_mixed_conditioning_composes(self):
        rng = np.random.default_rng(43)
        for trial in range(10):
            n = int(rng.integers(4, 8))
            model = random_model(rng, n)
            elems = list(rng.permutation(n) + 1)
            cin, cout, a = IndexSet(elems[:1]), IndexSet(elems[1:2]), IndexSet(elems[2:3])
            ck = conditional_kernel(model, Event(cin, cout))
            assert set(ck.labels) == set(range(1, n + 1)) - set(cin) - set(cout)
            local_a = IndexSet(int(p) + 1 for p in ck.local_positions(a))
            lhs = inclusion_prob(ck.model(), local_a)
            rhs = mixed_prob(model, Event(a.union(cin), cout)) / mixed_prob(
                model, Event(cin, cout)
            )
            assert lhs == pytest.approx(rhs, abs=1e-10)


def _random_pair(rng, n):
    """Two disjoint sets: a conditioning set and a probe set (may be empty)."""
    perm = list(rng.permutation(n) + 1)
    csize = int(rng.integers(1, max(2, n - 1)))
    asize = int(rng.integers(1, n - csize + 1))
    return IndexSet(perm[:csize]), IndexSet(perm[csize:csize + asize])


class TestClamping:
    def test_small_negative_clamped(self):
        assert _clamp_probability(-1e-13) == 0.0

    def test_just_above_one_clamped(self):
        assert _clamp_probability(1.0 + 1e-13) == 1.0

    def test_far_outside_raises(self):
        with pytest.raises(NumericalFailureError):
            _clamp_probability(-1e-6)
        with pytest.raises(NumericalFailureError):
            _clamp_probability(1.001)

    def test_interior_untouched(self):
        assert _clamp_probability(0.25) == 0.25
