import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwht.errors import ArgumentError
from gwht.prob import (
    Alphabet,
    CondPmf,
    JointPmf,
    Pmf,
    channel_marginal,
    compose,
    condition,
    entropy,
    entropy_continuity_bound,
    joint_from_dict,
    joint_to_dict,
    kl_divergence,
    marginalize,
    mutual_information,
    pmf_from_dict,
    pmf_to_dict,
    tv_distance,
)

X = Alphabet(2, "x")
Y = Alphabet(2, "y")
Z = Alphabet(2, "z")


def joint(labels_sizes, table):
    axes = tuple(Alphabet(s, lbl) for lbl, s in labels_sizes)
    return JointPmf(axes, np.array(table, dtype=float))


def hand_entropy(weights):
    # Independent oracle: direct evaluation of -sum p*log2(p).
    return -sum(p * math.log2(p) for p in weights if p > 0)


def random_joint(rng, shape, labels):
    w = rng.dirichlet(np.ones(int(np.prod(shape))))
    axes = tuple(Alphabet(s, lbl) for s, lbl in zip(shape, labels))
    return JointPmf(axes, w.reshape(shape))


class TestConstruction:
    def test_rejects_bad_normalization(self):
        with pytest.raises(ArgumentError):
            joint([("x", 2)], [0.5, 0.48])

    def test_rejects_negative(self):
        with pytest.raises(ArgumentError):
            joint([("x", 2)], [1.1, -0.1])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ArgumentError):
            JointPmf((X, Y), np.full(4, 0.25))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ArgumentError):
            JointPmf((X, Alphabet(2, "x")), np.full((2, 2), 0.25))

    def test_tables_are_immutable(self):
        p = joint([("x", 2)], [0.5, 0.5])
        with pytest.raises(ValueError):
            p.table[0] = 0.9

    def test_cond_rows_must_normalize(self):
        with pytest.raises(ArgumentError):
            CondPmf((X,), (Y,), np.array([[0.5, 0.5], [0.5, 0.4]]))


class TestEntropy:
    def test_uniform_binary_is_one_bit(self):
        assert entropy(joint([("x", 2)], [0.5, 0.5]), ["x"]) == pytest.approx(1.0)

    def test_point_mass_is_zero(self):
        assert entropy(joint([("x", 2)], [1.0, 0.0]), ["x"]) == pytest.approx(0.0)

    def test_quarter_three_quarters(self):
        # hand evaluation of -(1/4)log2(1/4) - (3/4)log2(3/4)
        expected = hand_entropy([0.25, 0.75])
        assert expected == pytest.approx(0.8112781, abs=1e-7)
        p = joint([("x", 2)], [0.25, 0.75])
        assert entropy(p, ["x"]) == pytest.approx(expected, abs=1e-12)

    def test_conditional_entropy_of_product(self):
        p = joint([("x", 2), ("y", 2)], np.outer([0.5, 0.5], [0.25, 0.75]))
        assert entropy(p, ["y"], ["x"]) == pytest.approx(hand_entropy([0.25, 0.75]))

    def test_overlap_rejected(self):
        p = joint([("x", 2), ("y", 2)], np.full((2, 2), 0.25))
        with pytest.raises(ArgumentError):
            entropy(p, ["x"], ["x"])


class TestMutualInformation:
    def test_independent_is_zero(self):
        p = joint([("x", 2), ("y", 2)], np.outer([0.3, 0.7], [0.6, 0.4]))
        assert mutual_information(p, ["x"], ["y"]) == pytest.approx(0.0, abs=1e-12)

    def test_identity_channel_uniform(self):
        p = joint([("x", 2), ("y", 2)], [[0.5, 0.0], [0.0, 0.5]])
        assert mutual_information(p, ["x"], ["y"]) == pytest.approx(1.0)

    def test_binary_symmetric_crossover(self):
        # hand evaluation: I = H(Y) - H(Y|X) = 1 - h2(0.1)
        h2 = hand_entropy([0.1, 0.9])
        p = joint([("x", 2), ("y", 2)], [[0.45, 0.05], [0.05, 0.45]])
        got = mutual_information(p, ["x"], ["y"])
        assert got == pytest.approx(1.0 - h2, abs=1e-12)
        assert got == pytest.approx(0.5310, abs=1e-4)

    def test_overlap_rejected(self):
        p = joint([("x", 2), ("y", 2)], np.full((2, 2), 0.25))
        with pytest.raises(ArgumentError):
            mutual_information(p, ["x"], ["y"], ["y"])


class TestDivergences:
    def test_kl_identity(self):
        p = joint([("x", 2)], [0.3, 0.7])
        assert kl_divergence(p, p) == 0.0

    def test_kl_point_vs_uniform(self):
        p = joint([("x", 2)], [1.0, 0.0])
        q = joint([("x", 2)], [0.5, 0.5])
        assert kl_divergence(p, q) == pytest.approx(1.0)

    def test_kl_support_violation_is_inf(self):
        p = joint([("x", 2)], [0.5, 0.5])
        q = joint([("x", 2)], [1.0, 0.0])
        assert kl_divergence(p, q) == math.inf

    def test_kl_axis_mismatch(self):
        p = joint([("x", 2)], [0.5, 0.5])
        q = joint([("y", 2)], [0.5, 0.5])
        with pytest.raises(ArgumentError):
            kl_divergence(p, q)

    def test_tv_identical(self):
        p = joint([("x", 2)], [0.4, 0.6])
        assert tv_distance(p, p) == 0.0

    def test_tv_disjoint_point_masses(self):
        p = joint([("x", 2)], [1.0, 0.0])
        q = joint([("x", 2)], [0.0, 1.0])
        assert tv_distance(p, q) == pytest.approx(1.0)

    def test_tv_hand_value(self):
        p = joint([("x", 2)], [0.5, 0.5])
        q = joint([("x", 2)], [0.25, 0.75])
        assert tv_distance(p, q) == pytest.approx(0.25)


class TestMarginalizeCompose:
    def test_marginal_of_product(self):
        px, py = [0.3, 0.7], [0.6, 0.4]
        p = joint([("x", 2), ("y", 2)], np.outer(px, py))
        np.testing.assert_allclose(marginalize(p, ["x"]).table, px)

    def test_marginal_of_diagonal(self):
        p = joint([("x", 2), ("y", 2)], [[0.5, 0.0], [0.0, 0.5]])
        np.testing.assert_allclose(marginalize(p, ["x"]).table, [0.5, 0.5])

    def test_keep_all_axes_is_identity(self):
        p = joint([("x", 2), ("y", 2)], [[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_array_equal(marginalize(p, ["x", "y"]).table, p.table)

    def test_keep_reorders(self):
        p = joint([("x", 2), ("y", 2)], [[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_allclose(marginalize(p, ["y", "x"]).table, p.table.T)

    def test_empty_keep_rejected(self):
        p = joint([("x", 2)], [0.5, 0.5])
        with pytest.raises(ArgumentError):
            marginalize(p, [])

    def test_compose_identity_channel(self):
        p = Pmf(X, np.array([0.5, 0.5])).as_joint()
        c = CondPmf((X,), (Y,), np.eye(2))
        out = compose(p, c)
        np.testing.assert_allclose(out.table, [[0.5, 0.0], [0.0, 0.5]])

    def test_compose_constant_channel(self):
        p = Pmf(X, np.array([0.3, 0.7])).as_joint()
        c = CondPmf((X,), (Y,), np.array([[1.0, 0.0], [1.0, 0.0]]))
        out = compose(p, c)
        np.testing.assert_allclose(out.table, [[0.3, 0.0], [0.7, 0.0]])

    def test_compose_bsc(self):
        # direct multiplication: uniform input, crossover 0.1
        p = Pmf(X, np.array([0.5, 0.5])).as_joint()
        c = CondPmf((X,), (Y,), np.array([[0.9, 0.1], [0.1, 0.9]]))
        out = compose(p, c)
        np.testing.assert_allclose(out.table, [[0.45, 0.05], [0.05, 0.45]])

    def test_compose_marginal_matches_input(self):
        rng = np.random.default_rng(7)
        p = random_joint(rng, (2, 3), ("x", "w"))
        c = CondPmf((X,), (Y,), rng.dirichlet(np.ones(2), size=2))
        out = compose(p, c)
        np.testing.assert_allclose(
            marginalize(out, ["x", "w"]).table, p.table, atol=1e-14
        )

    def test_condition_recomposes(self):
        rng = np.random.default_rng(8)
        p = random_joint(rng, (2, 2, 2), ("x", "y", "z"))
        c = condition(p, ["x"])
        back = compose(marginalize(p, ["x"]), c)
        np.testing.assert_allclose(
            back.table, np.transpose(p.table, (0, 1, 2)), atol=1e-14
        )

    def test_channel_marginal(self):
        rng = np.random.default_rng(9)
        c = CondPmf((X,), (Y, Z), rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2))
        cm = channel_marginal(c, ["z"])
        np.testing.assert_allclose(cm.table, c.table.sum(axis=1))


class TestEntropyContinuityBound:
    def test_vanishes_at_zero(self):
        assert entropy_continuity_bound(1e-12, 2, conditional=False) < 1e-9

    def test_unconditional_hand_value(self):
        # -(2/8)*log2(2*(1/8)/2) = -(1/4)*log2(1/8) = 0.75
        got = entropy_continuity_bound(0.125, 2, conditional=False)
        assert got == pytest.approx(0.75, abs=1e-12)

    def test_conditional_hand_value(self):
        theta = 1.0 / (2.0 * math.e)
        expected = -5.0 * theta * math.log2(4.0 * theta / 4.0)
        got = entropy_continuity_bound(theta, 4, conditional=True)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(2.2466, abs=1e-4)

    def test_range_enforced(self):
        with pytest.raises(ArgumentError):
            entropy_continuity_bound(0.3, 2, conditional=False)
        with pytest.raises(ArgumentError):
            entropy_continuity_bound(0.25, 2, conditional=True)
        with pytest.raises(ArgumentError):
            entropy_continuity_bound(0.0, 2, conditional=False)


class TestRoundTrip:
    def test_joint_round_trip(self):
        p = joint([("x", 2), ("y", 3)], (np.arange(1, 7, dtype=float) / 21.0).reshape(2, 3))
        q = joint_from_dict(joint_to_dict(p))
        assert q.axes == p.axes
        np.testing.assert_array_equal(q.table, p.table)

    def test_pmf_round_trip(self):
        p = Pmf(X, np.array([0.25, 0.75]))
        q = pmf_from_dict(pmf_to_dict(p))
        assert q.alphabet == p.alphabet
        np.testing.assert_array_equal(q.weights, p.weights)


# ---------------------------------------------------------------------------
# Property tests
# ---------------------------------------------------------------------------

dirichlet_seeds = st.integers(min_value=0, max_value=2**31 - 1)


@settings(max_examples=60, deadline=None)
@given(dirichlet_seeds)
def test_mutual_information_nonneg_and_symmetric(seed):
    rng = np.random.default_rng(seed)
    p = random_joint(rng, (2, 3, 2), ("a", "b", "c"))
    i_ab = mutual_information(p, ["a"], ["b"], ["c"])
    i_ba = mutual_information(p, ["b"], ["a"], ["c"])
    assert i_ab >= -1e-10
    assert abs(i_ab - i_ba) < 1e-10


@settings(max_examples=60, deadline=None)
@given(dirichlet_seeds)
def test_kl_zero_iff_tv_zero(seed):
    rng = np.random.default_rng(seed)
    p = random_joint(rng, (4,), ("a",))
    q = random_joint(rng, (4,), ("a",))
    assert (kl_divergence(p, q) < 1e-12) == (tv_distance(p, q) < 1e-12)
    assert kl_divergence(p, p) == 0.0 and tv_distance(p, p) == 0.0


@settings(max_examples=60, deadline=None)
@given(dirichlet_seeds)
def test_event_probability_transfer(seed):
    # p(A) <= q(A) + 2 * TV(p, q) for any event A
    rng = np.random.default_rng(seed)
    p = random_joint(rng, (6,), ("a",))
    q = random_joint(rng, (6,), ("a",))
    event = rng.integers(0, 2, size=6).astype(bool)
    pa = float(p.table[event].sum())
    qa = float(q.table[event].sum())
    assert pa <= qa + 2.0 * tv_distance(p, q) + 1e-12


@settings(max_examples=60, deadline=None)
@given(dirichlet_seeds)
def test_tv_invariant_under_shared_channel(seed):
    rng = np.random.default_rng(seed)
    px = random_joint(rng, (3,), ("x",))
    qx = random_joint(rng, (3,), ("x",))
    c = CondPmf((Alphabet(3, "x"),), (Y,), rng.dirichlet(np.ones(2), size=3))
    assert tv_distance(compose(px, c), compose(qx, c)) == pytest.approx(
        tv_distance(px, qx), abs=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(dirichlet_seeds)
def test_conditional_entropy_continuity(seed):
    rng = np.random.default_rng(seed)
    p = random_joint(rng, (2, 3), ("x", "y"))
    # mix toward p to keep the distance inside the bound's validity range
    raw = rng.dirichlet(np.ones(6)).reshape(2, 3)
    lam = rng.uniform(0.0, 0.15)
    q = JointPmf(p.axes, (1 - lam) * p.table + lam * raw)
    theta = tv_distance(p, q)
    if theta <= 0 or theta > 1 / (2 * math.e):
        return
    gap = abs(entropy(p, ["y"], ["x"]) - entropy(q, ["y"], ["x"]))
    assert gap <= entropy_continuity_bound(theta, 3, conditional=True) + 1e-12
