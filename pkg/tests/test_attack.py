"""Sliced distinguisher, worst-case adversary and attack trials."""

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from src.attack import (
    AttackParams,
    SlicedDistinguisher,
    advantage_signed,
    advice_signs,
    as_boolean,
    bias_mass,
    boolean_advantage,
    bound,
    build_sliced,
    choose_T,
    circuit_size_estimate,
    distance_certificate,
    estimate_success_probability,
    euclidean_lower_bound,
    evaluate,
    expected_squared_advantage,
    run_trial,
    size_budget,
    slice_advantages,
    worst_case_advantage,
)
from src.distributions import (
    Distribution,
    euclidean_distance,
    make,
    mass_above_threshold,
    min_entropy,
    smooth_min_entropy,
    smoothing_witness,
)
from src.errors import DimensionError, PreconditionError, RangeError, UsageError, ValidationError
from src.hashing import PolyHash, SignHash, SliceHash, eval_sign, sample_polyhash
from tests.strategies import distributions, sign_tables


def constant_sign(field_bits=2):
    return SignHash(PolyHash(0, 0, 0, 0, field_bits=field_bits))


def halving_slicer():
    # h(x) = 2 * x over GF(4): low bit splits {0, 1} from {2, 3}
    return SliceHash(PolyHash(0, 0, 2, 0, field_bits=2), 1)


def random_hashes(seed, t):
    rng = np.random.default_rng(seed)
    return SignHash(sample_polyhash(rng)), SliceHash(sample_polyhash(rng), t)


# =============================================================================
# Advantages
# =============================================================================

class TestAdvantage:
    def test_constant_sign_has_no_advantage(self):
        X = make("flat", {"n": 6, "k": 3}, seed=1)
        Y = make("uniform", {"n": 6})
        assert advantage_signed(lambda p: np.ones(p.shape), X, Y) == pytest.approx(0.0, abs=1e-12)
        assert bias_mass(X, Y) == pytest.approx(0.0, abs=1e-12)

    def test_opposite_point_masses(self):
        X = Distribution.dense(1, [1.0, 0.0])
        Y = Distribution.dense(1, [0.0, 1.0])
        assert advantage_signed(np.array([1, -1]), X, Y) == 2.0

    def test_identical_distributions(self):
        X = make("spiked-uniform", {"n": 5, "spike": 0.3})
        assert advantage_signed(np.resize([1, -1, -1], 32), X, X) == 0.0

    def test_restricted_to_subset(self):
        X = Distribution.dense(2, [0.5, 0.5, 0.0, 0.0])
        Y = Distribution.dense(2, [0.0, 0.0, 0.5, 0.5])
        assert advantage_signed(np.ones(4), X, Y, S=[0, 1]) == 1.0
        assert bias_mass(X, Y, S=[2]) == -0.5

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            advantage_signed(np.ones(4), make("uniform", {"n": 2}), make("uniform", {"n": 3}))

    @settings(max_examples=50)
    @given(X=distributions(n=4), Y=distributions(n=4), D=sign_tables(4))
    def test_boolean_view_halves_the_advantage(self, X, Y, D):
        assert boolean_advantage(D, X, Y) == pytest.approx(abs(advantage_signed(D, X, Y)) / 2, abs=1e-12)

    def test_boolean_view_values(self):
        table = np.array([1, -1, -1, 1])
        assert as_boolean(table)(np.arange(4, dtype=np.uint64)).tolist() == [1.0, 0.0, 0.0, 1.0]

    def test_expected_squared_advantage_over_exhaustive_family(self):
        X = make("flat", {"n": 4, "k": 2}, seed=5)
        Y = make("flat", {"n": 4, "k": 3}, seed=6)
        points = np.arange(16, dtype=np.uint64)
        delta = X.to_dense().probs - Y.to_dense().probs
        total = 0.0
        for c1 in range(16):
            for c0 in range(16):
                signs = SignHash(PolyHash(0, 0, c1, c0, field_bits=4))(points)
                total += float(signs @ delta) ** 2
        # pairwise independence of c1*x + c0 is enough for the mean square
        assert total / 256 == pytest.approx(expected_squared_advantage(X, Y), abs=1e-12)

    def test_certificate_exceeds_delta_for_disjoint_flats(self):
        X = make("pushforward", {"n": 16, "k": 8, "injective": True}, seed=1)
        Y = make("flat", {"n": 16, "k": 9, "exclude": X.support()[0].tolist()}, seed=2)
        assert distance_certificate(X, Y, 8) == pytest.approx(0.5)
        assert euclidean_distance(X, Y) >= 2 ** -4 * 0.5

    @settings(max_examples=200, deadline=None)
    @given(X=distributions(), data=st.data())
    def test_low_smooth_entropy_forces_euclidean_distance(self, X, data):
        k = data.draw(st.integers(min_value=0, max_value=X.n))
        mass = mass_above_threshold(X, k)
        assume(mass > 1e-6)
        delta = 0.99 * mass
        assert smooth_min_entropy(X, delta) < k
        seed = data.draw(st.integers(min_value=0, max_value=2 ** 32))
        candidates = [
            smoothing_witness(X, k),
            make("flat", {"n": X.n, "k": k}, seed=seed),
            make("uniform", {"n": X.n}),
        ]
        for Y in candidates:
            assert min_entropy(Y) >= k - 1e-9
            assert euclidean_distance(X, Y) > euclidean_lower_bound(k, delta)


# =============================================================================
# Sliced Distinguisher
# =============================================================================

class TestSlicedDistinguisher:
    def test_perfect_separation(self):
        X = Distribution.dense(2, [0.5, 0.5, 0.0, 0.0])
        Y = Distribution.dense(2, [0.0, 0.0, 0.5, 0.5])
        dhat = build_sliced(constant_sign(), halving_slicer(), X, Y)
        assert dhat.advice.tolist() == [1, -1]
        assert advantage_signed(dhat, X, Y) == 2.0

    def test_single_slice_is_base_advantage(self):
        X = make("flat", {"n": 8, "k": 4}, seed=3)
        Y = make("uniform", {"n": 8})
        sign, slicer = random_hashes(11, 0)
        dhat = build_sliced(sign, slicer, X, Y)
        assert advantage_signed(dhat, X, Y) == pytest.approx(abs(advantage_signed(sign, X, Y)), abs=1e-12)

    def test_direct_resummation(self):
        X = make("pushforward", {"n": 10, "k": 6}, seed=8)
        Y = make("flat", {"n": 10, "k": 7}, seed=9)
        sign, slicer = random_hashes(12, 3)
        dhat = build_sliced(sign, slicer, X, Y)

        points = np.arange(1 << 10, dtype=np.uint64)
        delta = X.to_dense().probs - Y.to_dense().probs
        signs = sign(points)
        slices = slicer(points)
        expected = sum(abs(math.fsum(signs[slices == i] * delta[slices == i])) for i in range(8))
        assert advantage_signed(dhat, X, Y) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=100)
    @given(X=distributions(), data=st.data(), seed=st.integers(min_value=0, max_value=2 ** 32), t=st.integers(0, 4))
    def test_composition_identity(self, X, data, seed, t):
        Y = data.draw(distributions(n=X.n))
        sign, slicer = random_hashes(seed, t)
        per_slice = slice_advantages(sign, slicer, X, Y)
        dhat = build_sliced(sign, slicer, X, Y)
        total = advantage_signed(dhat, X, Y)
        assert total == pytest.approx(math.fsum(np.abs(per_slice)), abs=1e-9)
        assert total >= abs(advantage_signed(sign, X, Y)) - 1e-12
        assert total <= 2 + 1e-12

    def test_advice_tie_break(self):
        assert advice_signs(np.array([0.0, -0.1, 0.2])).tolist() == [1, -1, 1]

    def test_evaluate_follows_advice(self):
        sign, slicer = random_hashes(3, 2)
        points = np.arange(64, dtype=np.uint64)
        plus = SlicedDistinguisher(sign=sign, slicer=slicer, advice=np.ones(4))
        minus = SlicedDistinguisher(sign=sign, slicer=slicer, advice=-np.ones(4))
        assert [evaluate(plus, x) for x in range(64)] == [eval_sign(sign, x) for x in range(64)]
        assert [evaluate(minus, x) for x in range(64)] == [-eval_sign(sign, x) for x in range(64)]
        assert plus(points).tolist() == sign(points).tolist()

    def test_evaluate_is_deterministic(self):
        first = build_sliced(*random_hashes(0, 2), make("flat", {"n": 6, "k": 2}), make("uniform", {"n": 6}))
        second = build_sliced(*random_hashes(0, 2), make("flat", {"n": 6, "k": 2}), make("uniform", {"n": 6}))
        assert [evaluate(first, x) for x in range(64)] == [evaluate(second, x) for x in range(64)]
        assert set(first(np.arange(64)).tolist()) <= {-1, 1}

    @pytest.mark.parametrize("advice", [np.ones(3), np.array([1, 0, 1, 1])])
    def test_advice_validation(self, advice):
        sign, slicer = random_hashes(0, 2)
        with pytest.raises(UsageError):
            SlicedDistinguisher(sign=sign, slicer=slicer, advice=advice)

    def test_advice_is_read_only(self):
        dhat = SlicedDistinguisher(*random_hashes(0, 1), advice=np.ones(2))
        with pytest.raises(ValueError):
            dhat.advice[0] = -1


# =============================================================================
# Worst-Case Adversary
# =============================================================================

def interval_distance(table, X, k):
    """Distance from E_X to [min, max] of E_Y over all flat Y on 2^k points."""
    means = [float(np.mean(table[list(c)])) for c in combinations(range(table.size), 1 << k)]
    expected_x = math.fsum(table[X.support()[0].astype(np.int64)] * X.support()[1])
    return max(expected_x - max(means), min(means) - expected_x, 0.0), expected_x


class TestWorstCase:
    def test_constant_distinguisher(self):
        value, _ = worst_case_advantage(np.ones(16), make("flat", {"n": 4, "k": 1}), 3)
        assert value == 0.0

    def test_point_mass_on_lone_plus(self):
        X = make("point", {"n": 2, "x": 0})
        value, witness = worst_case_advantage(np.array([1, -1, -1, -1]), X, 1)
        assert value == 1.0
        assert witness.to_dense().probs.tolist() == [0.5, 0.5, 0.0, 0.0]

    def test_point_mass_inside_interval(self):
        X = make("point", {"n": 2, "x": 0})
        value, _ = worst_case_advantage(np.array([1, 1, -1, -1]), X, 1)
        assert value == 0.0

    def test_k_above_n_rejected(self):
        with pytest.raises(ValidationError):
            worst_case_advantage(np.ones(4), make("uniform", {"n": 2}), 3)

    @settings(max_examples=60)
    @given(X=distributions(n=4), table=sign_tables(4), k=st.integers(min_value=0, max_value=3))
    def test_greedy_matches_flat_extremes(self, X, table, k):
        value, witness = worst_case_advantage(table, X, k)
        expected, expected_x = interval_distance(table, X, k)
        assert value == pytest.approx(expected, abs=1e-12)
        assert min_entropy(witness) >= k - 1e-9
        expected_w = math.fsum(table * witness.to_dense().probs)
        assert abs(expected_x - expected_w) == pytest.approx(value, abs=1e-12)

    @settings(max_examples=30)
    @given(X=distributions(n=3), table=sign_tables(3), k=st.floats(min_value=0.0, max_value=3.0))
    def test_fractional_k_witness(self, X, table, k):
        value, witness = worst_case_advantage(table, X, k)
        assert 0.0 <= value <= 2.0
        assert min_entropy(witness) >= k - 1e-9


# =============================================================================
# Parameters and Size Model
# =============================================================================

class TestParameters:
    def test_bound_example(self):
        assert AttackParams(n=16, k=8, delta=0.5, T=16).bound == pytest.approx(1 / 24)

    def test_bound_scaling(self):
        assert bound(16, 8, 1.0) == 2 * bound(16, 8, 0.5)
        assert bound(64, 8, 0.5) == pytest.approx(2 * bound(16, 8, 0.5))

    def test_choose_T_example(self):
        assert choose_T(1 / 24, 8, 0.5) == 16
        assert choose_T(1 / 12, 8, 0.5) == 64
        assert choose_T(2 ** -4 * 0.5 / 3, 8, 0.5) == 1

    def test_choose_T_out_of_range(self):
        with pytest.raises(RangeError):
            choose_T(1.0, 8, 0.5, n=10)

    @pytest.mark.parametrize("epsilon,delta", [(0, 0.5), (-1, 0.5), (0.1, 0), (0.1, 1.5)])
    def test_choose_T_rejects(self, epsilon, delta):
        with pytest.raises(ValidationError):
            choose_T(epsilon, 8, delta)

    @given(
        epsilon=st.floats(min_value=1e-4, max_value=0.5),
        k=st.integers(min_value=0, max_value=16),
        delta=st.floats(min_value=0.01, max_value=1.0),
    )
    def test_choose_T_is_minimal(self, epsilon, k, delta):
        try:
            T = choose_T(epsilon, k, delta, n=32)
        except RangeError:
            assert bound(2 ** 32, k, delta) < epsilon
            return
        assert bound(T, k, delta) >= epsilon * (1 - 1e-12)
        if T > 1:
            assert bound(T // 2, k, delta) < epsilon
            params = AttackParams(n=16, k=k, delta=delta, T=T)
            assert circuit_size_estimate(params) <= size_budget(epsilon, k, delta, params.n) * (1 + 1e-9)

    def test_circuit_size(self):
        assert circuit_size_estimate(AttackParams(n=16, k=8, delta=0.5, T=16)) == 528
        assert circuit_size_estimate(AttackParams(n=1, k=0, delta=1.0, T=1)) == 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 4, "k": 2, "delta": 0.5, "T": 3},
            {"n": 4, "k": 5, "delta": 0.5},
            {"n": 4, "k": 2, "delta": 0.0},
            {"n": 0, "k": 0, "delta": 0.5},
        ],
    )
    def test_params_validation(self, kwargs):
        with pytest.raises(ValidationError):
            AttackParams(**kwargs)

    def test_from_epsilon(self):
        params = AttackParams.from_epsilon(16, 8, 0.5, 1 / 24)
        assert params.T == 16
        assert params.t == 4
        assert params.to_dict()["epsilon"] == 1 / 24


# =============================================================================
# Trials
# =============================================================================

@pytest.fixture(scope="module")
def far_pair():
    X = make("pushforward", {"n": 16, "k": 8, "injective": True}, seed=21)
    Y = make("flat", {"n": 16, "k": 9, "exclude": X.support()[0].tolist()}, seed=22)
    return X, Y


class TestTrials:
    def test_report_fields(self, far_pair):
        X, Y = far_pair
        report = run_trial(X, Y, AttackParams(n=16, k=8, delta=0.5, T=16), np.random.default_rng(0))
        assert report.guarantee
        assert len(report.per_slice) == 16
        assert report.advantage == pytest.approx(sum(report.per_slice), abs=1e-9)
        assert 0 <= report.advantage <= 2
        assert report.success == (report.advantage >= report.bound)
        assert set(report.to_dict()) >= {"advantage", "bound", "success", "size_units", "per_slice", "seeds"}
        assert len(report.seeds["sign"]["c0"]) == 16

    def test_identical_distributions_are_vacuous(self):
        X = make("flat", {"n": 16, "k": 8}, seed=4)
        report = run_trial(X, X, AttackParams(n=16, k=8, delta=0.5, T=16), np.random.default_rng(1))
        assert report.advantage == 0.0
        assert not report.success
        assert not report.guarantee

    def test_certificate_can_hold_while_smooth_entropy_reaches_k(self, far_pair):
        X, Y = far_pair
        params = AttackParams(n=16, k=8, delta=0.5, T=16)
        report = run_trial(X, Y, params, np.random.default_rng(0))
        assert smooth_min_entropy(X, 0.5) == pytest.approx(9.0)
        assert report.guarantee
        assert not report.smooth_entropy_below_k
        assert report.to_dict()["smooth_entropy_below_k"] is False

    def test_point_mass_has_low_smooth_entropy(self):
        X = make("point", {"n": 16, "x": 0})
        Y = make("flat", {"n": 16, "k": 9, "exclude": [0]}, seed=5)
        estimate = estimate_success_probability(X, Y, AttackParams(n=16, k=8, delta=0.5, T=16), trials=30)
        assert estimate.guarantee
        assert estimate.smooth_entropy_below_k
        assert all(r.smooth_entropy_below_k for r in estimate.reports)
        assert estimate.to_dict()["smooth_entropy_below_k"] is True

    def test_low_entropy_reference_rejected(self):
        with pytest.raises(PreconditionError):
            run_trial(
                make("uniform", {"n": 6}),
                make("point", {"n": 6}),
                AttackParams(n=6, k=4, delta=0.5),
                np.random.default_rng(0),
            )

    def test_params_must_match_domain(self, far_pair):
        X, Y = far_pair
        with pytest.raises(UsageError):
            run_trial(X, Y, AttackParams(n=12, k=8, delta=0.5), np.random.default_rng(0))

    def test_too_few_trials(self, far_pair):
        X, Y = far_pair
        with pytest.raises(UsageError):
            estimate_success_probability(X, Y, AttackParams(n=16, k=8, delta=0.5, T=16), trials=10)

    def test_identical_fraction_is_zero(self):
        X = make("flat", {"n": 10, "k": 5}, seed=2)
        estimate = estimate_success_probability(X, X, AttackParams(n=10, k=5, delta=0.5, T=4), trials=30)
        assert estimate.fraction == 0.0
        assert not estimate.guarantee

    def test_success_floor(self, far_pair):
        X, Y = far_pair
        estimate = estimate_success_probability(X, Y, AttackParams(n=16, k=8, delta=0.5, T=16), trials=200, seed=3)
        assert estimate.guarantee
        assert estimate.meets_floor
        assert estimate.lower >= 1 / 17

    def test_worker_count_does_not_change_results(self, far_pair):
        X, Y = far_pair
        params = AttackParams(n=16, k=8, delta=0.5, T=4)
        serial = estimate_success_probability(X, Y, params, trials=40, seed=9)
        threaded = estimate_success_probability(X, Y, params, trials=40, seed=9, workers=4)
        assert [r.to_dict() for r in serial.reports] == [r.to_dict() for r in threaded.reports]
        assert serial.trials_csv() == threaded.trials_csv()
        assert [r.trial for r in threaded.reports] == list(range(40))
