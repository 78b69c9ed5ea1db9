from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from deviant_learning import engine
from deviant_learning.config import DlaConfig
from deviant_learning.datasets import SCHEMAS, QuantizationSpec, from_rows, load_csv, quantize
from deviant_learning.exceptions import DeviantLearningError

DATA_DIR = Path(__file__).resolve().parent.parent / 'data'


def iris_x10():
    raw = load_csv(DATA_DIR / 'iris.csv', SCHEMAS['iris'])
    return quantize(raw, QuantizationSpec.fixed(raw.n_columns, 10.0))


class InitTests(SimpleTestCase):
    def test_standards_follow_extent(self):
        state = engine.init(DlaConfig(learning_extent=5), width=2)
        np.testing.assert_array_equal(state.standards, [0, 1, 2, 3, 4])
        self.assertEqual(state.permanence.rho1, 0.0)
        self.assertEqual(len(state.memory), 0)

    def test_default_extent(self):
        self.assertEqual(engine.init(DlaConfig(), width=1).standards.size, 200)

    def test_same_seed_same_rng(self):
        first = engine.init(DlaConfig(seed=3), width=1)
        second = engine.init(DlaConfig(seed=3), width=1)
        self.assertEqual(first.rng.random(), second.rng.random())

    def test_zero_width(self):
        with self.assertRaises(DeviantLearningError):
            engine.init(DlaConfig(), width=0)


class StepTests(SimpleTestCase):
    def test_first_exemplar_marks_its_standards(self):
        config = DlaConfig(learning_extent=6, noise_scale=0.0)
        state = engine.init(config, width=2)
        state, record = engine.step(state, [1, 4], None, config)
        self.assertIsNone(record)
        np.testing.assert_array_equal(state.store.counts, [0, 1, 0, 0, 1, 0])
        self.assertEqual(state.permanence.t_i, 1)

    def test_record_fields(self):
        config = DlaConfig(learning_extent=10, noise_scale=0.0)
        state = engine.init(config, width=2)
        state, record = engine.step(state, [3, 3], [3, 5], config)
        np.testing.assert_array_equal(record.selected, [3, 3])
        np.testing.assert_array_equal(record.predicted, [3.0, 4.0])
        np.testing.assert_array_equal(record.actual, [3, 5])
        self.assertEqual(record.winner_count, 1)
        self.assertAlmostEqual(record.k_r, 1.0)
        self.assertEqual(len(state.memory), 1)
        self.assertEqual(record.post_match.matched_rows, (0,))

    def test_no_winners_gives_no_record(self):
        config = DlaConfig(learning_extent=3)
        state = engine.init(config, width=1)
        state, record = engine.step(state, [8], [8], config)
        self.assertIsNone(record)
        self.assertEqual(len(state.memory), 0)

    def test_width_mismatch(self):
        config = DlaConfig(learning_extent=10)
        state = engine.init(config, width=2)
        with self.assertRaises(DeviantLearningError):
            engine.step(state, [1, 2, 3], None, config)


class FitPredictTests(SimpleTestCase):
    def test_constant_stream_predicts_itself(self):
        records = engine.fit_predict([[3]] * 12, DlaConfig(learning_extent=20))
        self.assertEqual(len(records), 11)
        for record in records:
            self.assertEqual(record.predicted.tolist(), [3.0])
            self.assertEqual(np.abs(record.predicted - record.actual).max(), 0)

    def test_constant_stream_scores_full_marks(self):
        summary = engine.run(from_rows('constant', [[4, 7]] * 8, scale=10.0), DlaConfig(learning_extent=20))
        self.assertEqual(summary.mapca, 100.0)

    def test_single_exemplar_has_no_records(self):
        self.assertEqual(engine.fit_predict([[1, 2]], DlaConfig(learning_extent=5)), [])

    def test_empty_dataset(self):
        with self.assertRaises(DeviantLearningError):
            engine.fit_predict(np.zeros((0, 2), dtype=np.int64), DlaConfig())

    def test_deterministic(self):
        dataset = iris_x10()
        first = engine.fit_predict(dataset, DlaConfig())
        second = engine.fit_predict(dataset, DlaConfig())
        self.assertEqual(len(first), len(second))
        for a, b in zip(first, second):
            self.assertEqual(a.predicted.tobytes(), b.predicted.tobytes())
            self.assertEqual(a.k_r, b.k_r)
            self.assertEqual(a.rho1, b.rho1)

    def test_run_invariants_on_iris(self):
        dataset = iris_x10()
        config = DlaConfig()
        summary = engine.run(dataset, config)
        self.assertLessEqual(len(summary.state.memory), len(dataset) - 1)
        for record in summary.records:
            self.assertEqual(record.predicted.size, record.input.size)
            self.assertTrue(np.all((record.selected >= 0) & (record.selected < config.learning_extent)))
        self.assertGreaterEqual(summary.mapca, 0.0)
        self.assertLessEqual(summary.mapca, 100.0)
        self.assertEqual(summary.badc_forecast.shape, (5,))
        self.assertEqual(summary.mfe_forecast.shape, (5,))

    def test_exclude_label(self):
        summary = engine.run(iris_x10(), DlaConfig(include_label=False))
        self.assertEqual(summary.dataset.n_features, 4)
        self.assertEqual(summary.records[0].predicted.size, 4)

    def test_shuffle_is_seeded(self):
        config = DlaConfig(shuffle=True)
        first = engine.prepare_dataset(iris_x10(), config)
        second = engine.prepare_dataset(iris_x10(), config)
        np.testing.assert_array_equal(first.rows, second.rows)
        self.assertFalse(np.array_equal(first.rows, iris_x10().rows))


class RememberForgetTests(SimpleTestCase):
    def setUp(self):
        self.dataset = iris_x10()
        self.config = DlaConfig(winner_threshold=1, noise_scale=0.0)

    def test_small_extent_represents_fewer_winners(self):
        small = engine.fit_predict(self.dataset, self.config.with_extent(50))
        large = engine.fit_predict(self.dataset, self.config.with_extent(250))
        self.assertLessEqual(small[-1].winner_count, 50)
        self.assertLess(small[-1].winner_count, large[-1].winner_count)
        self.assertLess(engine.coverage(small), engine.coverage(large))

    def test_coverage_complete_once_extent_exceeds_data(self):
        for extent in (80, 100, 150, 200, 250):
            records = engine.fit_predict(self.dataset, self.config.with_extent(extent))
            self.assertEqual(engine.coverage(records), 1.0, msg=f"extent {extent}")

    def test_in_place_forget_and_remember(self):
        model = engine.DlaEngine(self.config.with_extent(250), width=self.dataset.n_features)
        model.fit_predict(self.dataset.rows)
        before = model.state.store.counts.copy()
        winners_before = len(model.state.winners)

        model.set_learning_extent(50)
        self.assertLess(len(model.state.winners), winners_before)
        self.assertTrue(np.all(model.state.winners.integers < 50))

        model.set_learning_extent(250)
        np.testing.assert_array_equal(model.state.store.counts[:50], before[:50])
        self.assertEqual(int(model.state.store.counts[50:].sum()), 0)

    def test_empty_records_have_zero_coverage(self):
        self.assertEqual(engine.coverage([]), 0.0)


class SweepTests(SimpleTestCase):
    def test_default_sweep_shapes(self):
        results = engine.sweep_learning_extent(iris_x10(), DlaConfig())
        self.assertEqual([result.extent for result in results], [50, 100, 150, 200, 250])
        for result in results:
            self.assertEqual(result.matrix.shape, (149, 5))

    def test_nonzero_standards_grow_with_extent(self):
        results = engine.sweep_learning_extent(iris_x10(), DlaConfig(time_limit=1))
        counts = [engine.nonzero_standards(result.state) for result in results]
        self.assertEqual(counts, sorted(counts))

    def test_custom_extents(self):
        results = engine.sweep_learning_extent(iris_x10(), DlaConfig(), [10, 20])
        self.assertEqual(len(results), 2)

    def test_invalid_extents(self):
        with self.assertRaises(DeviantLearningError):
            engine.sweep_learning_extent(iris_x10(), DlaConfig(), [])
        with self.assertRaises(DeviantLearningError):
            engine.sweep_learning_extent(iris_x10(), DlaConfig(), [0, 50])
