import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from deviant_learning.config import DlaConfig
from deviant_learning.exceptions import DeviantLearningError
from deviant_learning.overlap_learning import (
    AUTO,
    OverlapStore,
    PermanenceState,
    accumulate_overlap,
    activation_sigma,
    extend_store,
    generate_standards,
    max_overlap,
    select_winners,
    softsign,
    truncate_store,
    update_permanence,
)


class StandardsTests(SimpleTestCase):
    def test_consecutive_integers(self):
        np.testing.assert_array_equal(generate_standards(5), [0, 1, 2, 3, 4])

    def test_non_positive_extent(self):
        with self.assertRaises(DeviantLearningError):
            generate_standards(0)


class AccumulateOverlapTests(SimpleTestCase):
    def test_column_sums_are_added(self):
        store = OverlapStore.empty(3)
        store = accumulate_overlap(store, np.array([[1, 0, 1], [1, 1, 0]]))
        store = accumulate_overlap(store, np.array([[0, 0, 1]]))
        np.testing.assert_array_equal(store.counts, [2, 1, 2])
        self.assertEqual(store.exemplars_seen, 2)

    def test_original_store_untouched(self):
        store = OverlapStore.empty(2)
        accumulate_overlap(store, np.array([[1, 1]]))
        np.testing.assert_array_equal(store.counts, [0, 0])

    def test_dimension_mismatch(self):
        with self.assertRaises(DeviantLearningError):
            accumulate_overlap(OverlapStore.empty(3), np.array([[1, 0]]))

    @given(st.lists(st.lists(st.lists(st.integers(0, 1), min_size=6, max_size=6), min_size=1, max_size=4),
                    min_size=1, max_size=5))
    @settings(deadline=None, max_examples=50)
    def test_counts_never_decrease(self, matrices):
        store = OverlapStore.empty(6)
        for matrix in matrices:
            updated = accumulate_overlap(store, np.asarray(matrix))
            self.assertTrue(np.all(updated.counts >= store.counts))
            store = updated


class SelectWinnersTests(SimpleTestCase):
    def test_auto_keeps_argmax_set(self):
        store = OverlapStore(counts=np.array([1, 3, 0, 3]))
        winners = select_winners(store, generate_standards(4), AUTO)
        np.testing.assert_array_equal(winners.integers, [1, 3])
        self.assertEqual(winners.threshold, 3)

    def test_explicit_threshold(self):
        store = OverlapStore(counts=np.array([1, 3, 0, 2]))
        winners = select_winners(store, generate_standards(4), 2)
        np.testing.assert_array_equal(winners.integers, [1, 3])
        np.testing.assert_array_equal(winners.source_counts, [3, 2])

    def test_untouched_store_has_no_winners(self):
        winners = select_winners(OverlapStore.empty(4), generate_standards(4), AUTO)
        self.assertTrue(winners.is_empty())
        self.assertEqual(len(winners), 0)

    def test_invalid_threshold(self):
        with self.assertRaises(DeviantLearningError):
            select_winners(OverlapStore(counts=np.array([1])), generate_standards(1), 0)

    def test_max_overlap(self):
        self.assertEqual(max_overlap(OverlapStore(counts=np.array([4, 9, 2]))), 9)

    @given(st.lists(st.integers(0, 20), min_size=1, max_size=30), st.integers(1, 10), st.integers(1, 10))
    @settings(deadline=None, max_examples=100)
    def test_higher_threshold_is_subset(self, counts, low, delta):
        store = OverlapStore(counts=np.asarray(counts))
        standards = generate_standards(len(counts))
        loose = set(select_winners(store, standards, low).integers.tolist())
        strict = set(select_winners(store, standards, low + delta).integers.tolist())
        self.assertLessEqual(strict, loose)


class ActivationTests(SimpleTestCase):
    def test_tanh(self):
        self.assertAlmostEqual(activation_sigma(1.0), math.tanh(1.0))

    def test_softsign(self):
        self.assertEqual(softsign(1.0), 0.5)
        self.assertEqual(activation_sigma(-3.0, 'softsign'), -0.75)

    def test_unknown_activation(self):
        with self.assertRaises(DeviantLearningError):
            activation_sigma(1.0, 'relu')

    @given(st.floats(-50, 50), st.sampled_from(['tanh', 'softsign']))
    def test_bounded_and_odd(self, x, name):
        value = activation_sigma(x, name)
        self.assertLessEqual(abs(value), 1.0)
        self.assertAlmostEqual(activation_sigma(-x, name), -value)


class UpdatePermanenceTests(SimpleTestCase):
    def setUp(self):
        self.config = DlaConfig(noise_scale=0.0)
        self.rng = np.random.default_rng(0)

    def test_two_passes_without_noise(self):
        state = update_permanence(PermanenceState(), 1, self.config, self.rng)
        self.assertAlmostEqual(state.rho1, 2 * math.tanh(1))
        self.assertAlmostEqual(state.rho_o, math.tanh(1))
        self.assertEqual(state.t_i, 1)

    def test_time_limit_freezes_rho1(self):
        state = PermanenceState(rho1=3.0, t_i=self.config.time_limit)
        updated = update_permanence(state, 1, self.config, self.rng)
        self.assertEqual(updated.rho1, 3.0)
        self.assertEqual(updated.t_i, self.config.time_limit + 1)

    def test_saturated_store_freezes_rho1(self):
        state = PermanenceState(rho1=3.0)
        updated = update_permanence(state, self.config.store_threshold + 1, self.config, self.rng)
        self.assertEqual(updated.rho1, 3.0)

    def test_freeze_learning_switch(self):
        config = self.config.replace(freeze_learning=True)
        updated = update_permanence(PermanenceState(rho1=1.0), 1, config, self.rng)
        self.assertEqual(updated.rho1, 1.0)

    def test_noise_is_non_negative_and_bounded(self):
        config = DlaConfig(noise_scale=0.01)
        rng = np.random.default_rng(7)
        for _ in range(100):
            updated = update_permanence(PermanenceState(), 2, config, rng)
            self.assertGreaterEqual(updated.rho1, 2 * math.tanh(2))
            self.assertLessEqual(updated.rho1, 2 * (math.tanh(2) + 0.01))

    @given(st.lists(st.integers(0, 200), min_size=1, max_size=100))
    @settings(deadline=None, max_examples=50)
    def test_rho1_never_decreases(self, maxima):
        config = DlaConfig(noise_scale=0.01)
        rng = np.random.default_rng(1)
        state = PermanenceState()
        for s_o_max in maxima:
            updated = update_permanence(state, s_o_max, config, rng)
            self.assertGreaterEqual(updated.rho1, state.rho1)
            state = updated


class ExtentChangeTests(SimpleTestCase):
    def test_extend_keeps_prefix(self):
        store = extend_store(OverlapStore(counts=np.array([2, 0, 5]), exemplars_seen=3), 5)
        np.testing.assert_array_equal(store.counts, [2, 0, 5, 0, 0])
        self.assertEqual(store.exemplars_seen, 3)

    def test_truncate_forgets_tail(self):
        store = truncate_store(OverlapStore(counts=np.array([2, 0, 5])), 2)
        np.testing.assert_array_equal(store.counts, [2, 0])

    def test_invalid_changes(self):
        with self.assertRaises(DeviantLearningError):
            extend_store(OverlapStore.empty(3), 2)
        with self.assertRaises(DeviantLearningError):
            truncate_store(OverlapStore.empty(3), 4)
