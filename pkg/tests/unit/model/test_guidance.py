# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.

from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

from topicflow.errors import ConfigError, DataError
from topicflow.model.guidance import GuidanceSpec, load_guidance


class TestGuidance(TestCase):
    def setUp(self) -> None:
        self._tmp = TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def load(self, content, **kwargs):
        path = self.tmp / "guidance.txt"
        path.write_text(content, encoding="utf-8")
        return load_guidance(path, **kwargs)

    def test_parse(self):
        spec = self.load("retrieval practice testing\nelaboration connections")
        self.assertEqual(2, len(spec))
        self.assertListEqual([3, 2], [len(line) for line in spec.lines])
        self.assertEqual(0.5, spec.keywords_total_probability)

    def test_multiword_keywords(self):
        spec = self.load("interleaved_practice spacing\n")
        self.assertIn("interleaved_practice", spec.lines[0])

    def test_comments_case_and_duplicates(self):
        spec = self.load(
            "# codes for week 3\n\nRetrieval retrieval PRACTICE  # inline note\n"
            "spacing 3rd effect\n",
            keywords_total_probability=0.3,
        )
        self.assertTupleEqual(
            (("retrieval", "practice"), ("spacing", "effect")), spec.lines
        )
        self.assertEqual(0.3, spec.keywords_total_probability)

    def test_errors(self):
        with self.subTest("Only comments"):
            with self.assertRaises(DataError) as cm:
                self.load("# nothing here\n\n")
            self.assertIn("no guidance lines", str(cm.exception))
        with self.subTest("Line without usable keywords"):
            with self.assertRaises(DataError) as cm:
                self.load("retrieval\n123 4th\n")
            self.assertIn("line 2", str(cm.exception))
        with self.subTest("Missing file"):
            with self.assertRaises(DataError):
                load_guidance(self.tmp / "missing.txt")
        with self.subTest("Probability out of range"):
            for p in (0.0, 1.0, -0.2):
                with self.assertRaises(ConfigError):
                    GuidanceSpec((("a",),), p)
        with self.subTest("Empty line"):
            with self.assertRaises(DataError):
                GuidanceSpec((("a",), ()))

    def test_restrict(self):
        spec = GuidanceSpec((("retrieval", "zebra"), ("spacing",)))
        known = {"retrieval", "spacing"}
        with self.assertLogs("topicflow.model.guidance", level="WARNING") as logs:
            restricted = spec.restrict(known)
        self.assertListEqual([["retrieval"], ["spacing"]], restricted)
        self.assertTrue(any("zebra" in message for message in logs.output))
        with self.assertRaises(DataError) as cm:
            GuidanceSpec((("zebra",),)).restrict(known, source="embeddings")
        self.assertIn("embeddings", str(cm.exception))

    def test_with_probability(self):
        spec = GuidanceSpec((("a", "b"),))
        changed = spec.with_probability(0.8)
        self.assertEqual(0.8, changed.keywords_total_probability)
        self.assertEqual(spec.lines, changed.lines)
        self.assertEqual(0.5, spec.keywords_total_probability, msg="Specs are immutable")
