"""Seeded comparisons of the vectorised kernels against naive loops."""

import numpy as np
from django.test import SimpleTestCase

from deviant_learning.inference_memory import MemoryStore, extract_memory, memorize, row_overlap
from deviant_learning.mismatch import first_order_mismatch
from deviant_learning.overlap_learning import AUTO, OverlapStore, accumulate_overlap, generate_standards, select_winners

CASES = 1000


def naive_first_order(inputs, extent, rho1):
    return [[1 if abs(value - standard) <= rho1 else 0 for standard in range(extent)] for value in inputs]


def naive_accumulate(counts, matrix):
    return [count + sum(row[column] for row in matrix) for column, count in enumerate(counts)]


def naive_winners(counts, threshold):
    peak = max(counts)
    if peak == 0:
        return []
    if threshold == AUTO:
        threshold = peak
    return [standard for standard, count in enumerate(counts) if count >= threshold]


def naive_row_overlap(rows):
    return [sum(row) for row in rows]


def naive_extract(rows, current, rho2):
    threshold = len(current) // 2
    matched = []
    for index, row in enumerate(rows):
        overlap = sum(1 for a, b in zip(current, row) if abs(a - b) <= rho2)
        if overlap >= threshold:
            matched.append(index)
    return matched


class KernelOracleTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(20240601)

    def random_case(self):
        n = int(self.rng.integers(1, 9))
        extent = int(self.rng.integers(1, 51))
        rho1 = int(self.rng.choice([0, 1, 2, 5]))
        inputs = self.rng.integers(0, 60, size=n).tolist()
        return inputs, extent, rho1

    def test_first_order_and_accumulate(self):
        for _ in range(CASES):
            inputs, extent, rho1 = self.random_case()
            expected = naive_first_order(inputs, extent, rho1)
            matrix = first_order_mismatch(inputs, generate_standards(extent), rho1)
            self.assertEqual(matrix.tolist(), expected)

            prior = self.rng.integers(0, 4, size=extent).tolist()
            store = accumulate_overlap(OverlapStore(counts=np.asarray(prior, dtype=np.int64)), matrix)
            self.assertEqual(store.counts.tolist(), naive_accumulate(prior, expected))

    def test_select_winners(self):
        for _ in range(CASES):
            extent = int(self.rng.integers(1, 51))
            counts = self.rng.integers(0, 6, size=extent).tolist()
            threshold = AUTO if self.rng.random() < 0.5 else int(self.rng.integers(1, 6))
            winners = select_winners(OverlapStore(counts=np.asarray(counts)), generate_standards(extent), threshold)
            self.assertEqual(winners.integers.tolist(), naive_winners(counts, threshold))

    def test_row_overlap_and_extract_memory(self):
        for _ in range(CASES):
            width = int(self.rng.integers(1, 9))
            n_rows = int(self.rng.integers(0, 12))
            rows = self.rng.integers(0, 6, size=(n_rows, width)).tolist()
            current = self.rng.integers(0, 6, size=width).tolist()
            rho2 = float(self.rng.choice([0.0, 0.5, 1.0]))

            bits = self.rng.integers(0, 2, size=(n_rows, width)).tolist()
            self.assertEqual(row_overlap(bits).tolist(), naive_row_overlap(bits))

            store = MemoryStore.empty(width)
            for row in rows:
                store = memorize(store, row)
            result = extract_memory(store, current, rho2, 1.0)
            self.assertEqual(list(result.matched_rows), naive_extract(rows, current, rho2))
