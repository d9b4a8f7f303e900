import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwht.errors import ArgumentError, BudgetExceededError
from gwht.prob import Alphabet, JointPmf
from gwht.types_method import (
    JointNType,
    NType,
    Sequence,
    conditional_type_class_size,
    delta_prime,
    enumerate_ntypes,
    is_delta_close,
    joint_type_of,
    number_of_ntypes,
    sample_constant_composition,
    type_class_size,
    type_of,
)

B = Alphabet(2, "x")
T3 = Alphabet(3, "x")


class TestEnumerate:
    def test_binary_n2_order(self):
        types = enumerate_ntypes(B, 2)
        assert [t.counts for t in types] == [(2, 0), (1, 1), (0, 2)]

    def test_binary_count(self):
        assert len(enumerate_ntypes(B, 10)) == 11

    def test_ternary_stars_and_bars(self):
        # C(6, 2) = 15
        assert len(enumerate_ntypes(T3, 4)) == 15
        assert number_of_ntypes(3, 4) == math.comb(6, 2)

    def test_budget_error_names_count(self):
        with pytest.raises(BudgetExceededError) as exc:
            enumerate_ntypes(Alphabet(6, "x"), 100, budget=1000)
        assert exc.value.count == math.comb(105, 5)

    def test_polynomial_bound(self):
        for k in (2, 3, 4):
            for n in (1, 5, 9):
                assert number_of_ntypes(k, n) <= (n + 1) ** k


class TestTypeOf:
    def test_alternating(self):
        t = type_of(Sequence(B, np.array([0, 1, 0, 1])))
        assert t.counts == (2, 2)

    def test_constant(self):
        t = type_of(Sequence(B, np.zeros(5, dtype=int)))
        assert t.counts == (5, 0)

    def test_joint_type_direct_count(self):
        a = Sequence(B, np.array([0, 0, 1]))
        b = Sequence(Alphabet(2, "y"), np.array([1, 0, 1]))
        jt = joint_type_of([a, b])
        np.testing.assert_array_equal(jt.counts, [[1, 1], [0, 1]])

    def test_length_mismatch(self):
        a = Sequence(B, np.array([0, 1]))
        b = Sequence(Alphabet(2, "y"), np.array([0, 1, 1]))
        with pytest.raises(ArgumentError):
            joint_type_of([a, b])

    def test_joint_type_marginals_match_component_types(self):
        rng = np.random.default_rng(3)
        a = Sequence(B, rng.integers(0, 2, 9))
        b = Sequence(Alphabet(3, "y"), rng.integers(0, 3, 9))
        jt = joint_type_of([a, b])
        assert jt.marginal(0).counts == type_of(a).counts
        assert jt.marginal(1).counts == type_of(b).counts


class TestTypeClassSize:
    def test_pair(self):
        assert type_class_size(NType(B, (1, 1), 2)) == 2

    def test_constant_sequence(self):
        assert type_class_size(NType(B, (7, 0), 7)) == 1

    def test_multinomial(self):
        # 4! / (2! 1! 1!) = 12
        assert type_class_size(NType(T3, (2, 1, 1), 4)) == 12

    def test_exactness_beyond_64_bits(self):
        t = NType(Alphabet(2, "x"), (40, 40), 80)
        assert type_class_size(t) == math.comb(80, 40)


class TestConditionalTypeClassSize:
    def test_deterministic_conditional(self):
        jt = JointNType((B, Alphabet(2, "y")), np.array([[2, 0], [0, 2]]), 4)
        assert conditional_type_class_size(jt, "x") == 1

    def test_uniform_per_symbol(self):
        jt = JointNType((B, Alphabet(2, "y")), np.array([[1, 1], [1, 1]]), 4)
        assert conditional_type_class_size(jt, "x") == 4

    def test_degenerate_conditioning_reduces_to_type_class(self):
        jt = JointNType((Alphabet(1, "x"), T3), np.array([[2, 1, 1]]), 4)
        assert conditional_type_class_size(jt, "x") == type_class_size(
            NType(T3, (2, 1, 1), 4)
        )

    def test_unknown_axis(self):
        jt = JointNType((B, Alphabet(2, "y")), np.array([[1, 1], [1, 1]]), 4)
        with pytest.raises(ArgumentError):
            conditional_type_class_size(jt, "w")


class TestDeltaClose:
    def test_equal_always_close(self):
        p = JointPmf((B,), np.array([0.5, 0.5]))
        assert is_delta_close(p, p, 1e-9)

    def test_far_point_masses(self):
        p = JointPmf((B,), np.array([1.0, 0.0]))
        q = JointPmf((B,), np.array([0.0, 1.0]))
        assert not is_delta_close(p, q, 0.5)

    def test_strict_threshold(self):
        p = JointPmf((B,), np.array([0.5, 0.5]))
        q = JointPmf((B,), np.array([0.4, 0.6]))
        assert is_delta_close(p, q, 0.11)
        assert not is_delta_close(p, q, 0.09)

    def test_ntype_against_pmf(self):
        t = NType(B, (1, 3), 4)
        q = JointPmf((B,), np.array([0.25, 0.75]))
        assert is_delta_close(t, q, 1e-9)

    def test_axis_mismatch(self):
        p = JointPmf((B,), np.array([0.5, 0.5]))
        q = JointPmf((Alphabet(2, "y"),), np.array([0.5, 0.5]))
        with pytest.raises(ArgumentError):
            is_delta_close(p, q, 0.1)


class TestConstantComposition:
    def test_point_mass_type_is_constant(self):
        rng = np.random.default_rng(0)
        t = NType(B, (4, 0), 4)
        for _ in range(5):
            seq = sample_constant_composition(t, rng)
            assert np.all(seq.symbols == 0)

    def test_type_preserved(self):
        rng = np.random.default_rng(1)
        t = NType(T3, (2, 3, 1), 6)
        for _ in range(20):
            assert type_of(sample_constant_composition(t, rng)).counts == t.counts

    def test_two_orders_balanced(self):
        rng = np.random.default_rng(2)
        t = NType(B, (1, 1), 2)
        draws = sum(
            int(sample_constant_composition(t, rng).symbols[0] == 0)
            for _ in range(10_000)
        )
        assert abs(draws / 10_000 - 0.5) < 0.02

    def test_chi2_uniform_over_class(self):
        # class of counts (2,1) at n=3 has 3 members; 10^4 draws
        from scipy.stats import chi2

        rng = np.random.default_rng(3)
        t = NType(B, (2, 1), 3)
        tallies = {}
        for _ in range(10_000):
            key = tuple(sample_constant_composition(t, rng).symbols)
            tallies[key] = tallies.get(key, 0) + 1
        assert len(tallies) == 3
        expected = 10_000 / 3
        stat = sum((c - expected) ** 2 / expected for c in tallies.values())
        assert stat < chi2.ppf(0.999, df=2)


class TestDeltaPrimeSchedule:
    def test_default_schedule(self):
        assert delta_prime(8) == pytest.approx(0.5)
        assert delta_prime(8, c=0.4) == pytest.approx(0.2)

    def test_vanishing(self):
        assert delta_prime(10**6) < 0.011


# ---------------------------------------------------------------------------
# Exact counting identities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("n", [1, 4, 8, 12])
def test_type_class_sizes_partition_sequence_space(k, n):
    alpha = Alphabet(k, "x")
    types = enumerate_ntypes(alpha, n)
    assert len(types) == number_of_ntypes(k, n)
    assert sum(type_class_size(t) for t in types) == k**n


@pytest.mark.parametrize("k,n", [(2, 9), (3, 7), (4, 5)])
def test_type_class_size_entropy_bounds(k, n):
    alpha = Alphabet(k, "x")
    for t in enumerate_ntypes(alpha, n):
        h = -sum(
            (c / n) * math.log2(c / n) for c in t.counts if c > 0
        )
        log_size = math.log2(type_class_size(t))
        assert log_size <= n * h + 1e-9
        assert log_size >= n * h - k * math.log2(n + 1) - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_sampled_sequence_type_round_trip(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    n = int(rng.integers(1, 12))
    counts = rng.multinomial(n, np.ones(k) / k)
    t = NType(Alphabet(k, "x"), tuple(int(c) for c in counts), n)
    assert type_of(sample_constant_composition(t, rng)).counts == t.counts
