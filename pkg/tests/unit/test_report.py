# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.

import json
from unittest import TestCase

from topicflow.errors import ConfigError
from topicflow.report import TopicReport, render, round_floats


class TestReport(TestCase):
    def setUp(self) -> None:
        self.report = TopicReport(
            engine="lda",
            k=2,
            topics=[
                (0, [("retrieval", 0.123456789), ("practice", 0.1)]),
                (1, [("spacing", 0.3)]),
            ],
            top_n=2,
            provenance={"seed": 20220, "config_hash": "abc"},
            extras={"coherence": {"measure": "c_v", "score": 0.50171234}},
        )

    def test_markdown(self):
        self.assertEqual(
            "# Topics (lda, K=2)\n"
            "\n"
            "| Topic 0 | Topic 1 |\n"
            "|---|---|\n"
            "| retrieval | spacing |\n"
            "| practice |  |\n",
            render(self.report).decode("utf-8"),
        )

    def test_json(self):
        text = render(self.report, "json").decode("utf-8")
        self.assertTrue(text.endswith("}\n"))
        data = json.loads(text)
        self.assertEqual(0.123457, data["topics"][0]["terms"][0]["weight"])
        self.assertEqual(0.501712, data["coherence"]["score"])
        self.assertEqual(20220, data["provenance"]["seed"])
        self.assertListEqual(sorted(data), list(data), msg="Keys are sorted")

    def test_csv(self):
        text = render(self.report, "csv").decode("utf-8")
        lines = text.splitlines()
        self.assertEqual("topic,rank,term,weight", lines[0])
        self.assertEqual("0,1,retrieval,0.123457", lines[1])
        self.assertEqual(1 + 3, len(lines))
        self.assertNotIn("\r", text)

    def test_identical_reports_render_identically(self):
        for format in ("markdown", "json", "csv"):
            with self.subTest(format=format):
                self.assertEqual(render(self.report, format), render(self.report, format))

    def test_unknown_format(self):
        with self.assertRaises(ConfigError):
            render(self.report, "html")

    def test_validation(self):
        with self.assertRaises(ValueError):
            TopicReport("lsa", 3, [(0, [])], top_n=2)
        with self.assertRaises(ValueError):
            TopicReport("lsa", 1, [(0, [("a", 1.0), ("b", 1.0), ("c", 1.0)])], top_n=2)

    def test_round_floats(self):
        self.assertEqual(
            {"a": [1.23457, {"b": -0.000123457}], "c": 3, "d": "x", "e": [1.0, None]},
            round_floats(
                {"a": (1.234567, {"b": -0.0001234567}), "c": 3, "d": "x", "e": [1.0, None]}
            ),
        )
