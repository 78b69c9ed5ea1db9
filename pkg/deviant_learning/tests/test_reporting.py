from django.test import SimpleTestCase

from deviant_learning import engine
from deviant_learning.config import DlaConfig
from deviant_learning.datasets import from_rows
from deviant_learning.exceptions import DeviantLearningError
from deviant_learning.reporting import emit_report


class EmitReportTests(SimpleTestCase):
    def test_one_record_one_line(self):
        records = engine.fit_predict([[2, 3], [2, 3]], DlaConfig(learning_extent=10))
        report = emit_report(records)
        self.assertEqual(len(report.splitlines()), 1)
        self.assertIn('MAPCA 100.00%', report)

    def test_endpoints_and_forecast(self):
        summary = engine.run(from_rows('s', [[1], [3], [5], [7], [9]], scale=10.0), DlaConfig(learning_extent=20))
        report = emit_report(summary.records, summary.state, summary.dataset.spec)
        self.assertIn(f"-> {summary.records[-1].k_r:.4f}", report)
        self.assertIn(f"MAPCA {summary.mapca:.2f}%", report)
        self.assertIn('BADC forecast', report)
        self.assertIn(f"memory rows {len(summary.state.memory)}", report)

    def test_empty(self):
        with self.assertRaises(DeviantLearningError):
            emit_report([])
