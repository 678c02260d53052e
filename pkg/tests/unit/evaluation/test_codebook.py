# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.

from unittest import TestCase

import numpy as np

from topicflow.evaluation.codebook import match_codebook, overlap_matrix
from topicflow.model.guidance import GuidanceSpec


class TestCodebook(TestCase):
    def setUp(self) -> None:
        self.topics = [
            ["retrieval", "practice", "testing", "memory"],
            ["spacing", "effect", "schedule", "memory"],
        ]

    def test_overlap_matrix(self):
        codes = [["spacing", "memory"], ["retrieval"], ["zebra"]]
        np.testing.assert_array_equal(
            [[1, 2], [1, 0], [0, 0]], overlap_matrix(self.topics, codes)
        )
        self.assertEqual((0, 2), overlap_matrix(self.topics, []).shape)

    def test_one_to_one_matching(self):
        codebook = GuidanceSpec((("spacing", "interleaving"), ("retrieval", "practice")))
        result = match_codebook(self.topics, codebook)
        self.assertEqual(1, result.matches[0].topic)
        self.assertTupleEqual(("spacing",), result.matches[0].shared_terms)
        self.assertEqual(0.5, result.matches[0].overlap)
        self.assertEqual(0, result.matches[1].topic)
        self.assertEqual(1.0, result.matches[1].overlap)
        self.assertEqual(2, result.recovered)
        self.assertEqual(0.75, result.mean_overlap)

    def test_more_codes_than_topics(self):
        codes = [["memory"], ["retrieval", "testing"], ["spacing", "schedule"]]
        result = match_codebook(self.topics, codes)
        self.assertListEqual([None, 0, 1], [m.topic for m in result.matches])
        self.assertEqual(2, result.recovered)
        self.assertEqual(0.0, result.matches[0].overlap)
        summary = result.to_dict()
        self.assertEqual(3, summary["codes"])
        self.assertListEqual(["retrieval", "testing"], summary["matches"][1]["shared_terms"])

    def test_unrecovered_code(self):
        result = match_codebook(self.topics, [["zebra", "lemur"], ["memory"]])
        self.assertEqual(1, result.recovered)
        self.assertTupleEqual((), result.matches[0].shared_terms)
