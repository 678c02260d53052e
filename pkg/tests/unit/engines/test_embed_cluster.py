# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.

import gzip
import itertools
import json
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np

from tests.planted import gaussian_blobs
from topicflow.engines.embed_cluster import (
    ClusterModel,
    EmbeddingTable,
    cluster_topics,
    export_clusters,
    export_embeddings,
    fit_kmeans,
    init_centroids,
    load_embeddings,
)
from topicflow.errors import ConfigError, DataError
from topicflow.model.guidance import GuidanceSpec
from topicflow.model.preprocess import Vocabulary


def vocab_of(*terms) -> Vocabulary:
    return Vocabulary(terms, {t: 1 for t in terms})


def brute_force(x: np.ndarray):
    """Global optimum and all Lloyd fixed points over every 2-partition."""
    best, fixed_points = np.inf, []
    for labels in itertools.product((0, 1), repeat=len(x)):
        labels = np.array(labels)
        if labels.min() == labels.max():
            continue
        centers = np.array([x[labels == c].mean(axis=0) for c in (0, 1)])
        distances = ((x[:, None, :] - centers[None]) ** 2).sum(axis=2)
        inertia = distances[np.arange(len(x)), labels].sum()
        best = min(best, inertia)
        if np.all(distances[np.arange(len(x)), labels] <= distances.min(axis=1) + 1e-12):
            fixed_points.append(inertia)
    return best, fixed_points


class TestLoadEmbeddings(TestCase):
    def setUp(self) -> None:
        self._tmp = TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def write(self, content, name="vectors.txt"):
        path = self.tmp / name
        path.write_text(content, encoding="utf-8")
        return path

    def test_parse_and_intersect(self):
        path = self.write("2 3\naa 1 0 0\nbb 0 1 0\n")
        table = load_embeddings(path, vocab_of("aa", "bb", "cc", "aa_bb"))
        self.assertEqual(2, len(table))
        self.assertEqual(3, table.dim)
        self.assertListEqual(["aa", "bb"], table.words)
        self.assertTupleEqual(("cc",), table.dropped)
        np.testing.assert_array_equal([0.0, 1.0, 0.0], table["bb"])
        self.assertIn("aa", table)
        self.assertEqual(str(path), table.source)

    def test_vocabulary_order(self):
        table = load_embeddings(
            self.write("3 2\nzz 1 1\naa 0 1\nmm 1 0\n"), vocab_of("mm", "zz", "aa")
        )
        self.assertListEqual(["mm", "zz", "aa"], table.words)

    def test_gzip(self):
        path = self.tmp / "vectors.txt.gz"
        with gzip.open(path, "wt", encoding="utf-8") as f:
            f.write("2 2\naa 1 0\nbb 0 1\n")
        self.assertEqual(2, len(load_embeddings(path, vocab_of("aa", "bb"))))

    def test_errors(self):
        vocab = vocab_of("aa", "bb")
        with self.subTest("Dimension mismatch names the line"):
            with self.assertRaises(DataError) as cm:
                load_embeddings(self.write("2 3\naa 1 0 0\nzz 0 1\n"), vocab)
            self.assertIn("line 3", str(cm.exception))
        with self.subTest("Malformed header"):
            with self.assertRaises(DataError):
                load_embeddings(self.write("three\naa 1 0 0\n"), vocab)
        with self.subTest("No overlap"):
            with self.assertRaises(DataError):
                load_embeddings(self.write("1 2\nzz 1 0\n"), vocab)
        with self.subTest("Not a number"):
            with self.assertRaises(DataError):
                load_embeddings(self.write("1 2\naa 1 x\n"), vocab)
        with self.subTest("NaN"):
            with self.assertRaises(DataError):
                load_embeddings(self.write("1 2\naa 1 nan\n"), vocab)
        with self.subTest("Missing file"):
            with self.assertRaises(DataError):
                load_embeddings(self.tmp / "missing.txt", vocab)

    def test_count_mismatch_warns(self):
        with self.assertLogs("topicflow.engines.embed_cluster", level="WARNING"):
            table = load_embeddings(self.write("5 2\naa 1 0\n"), vocab_of("aa"))
        self.assertEqual(1, len(table))

    def test_export(self):
        table = EmbeddingTable.from_arrays(["aa", "bb"], np.array([[0.5, -1.0], [2.0, 0.25]]))
        path = export_embeddings(table, self.tmp / "out.txt")
        reloaded = load_embeddings(path, vocab_of("aa", "bb"))
        np.testing.assert_allclose(table.vectors, reloaded.vectors)


class TestInitCentroids(TestCase):
    def test_keyword_mean(self):
        table = EmbeddingTable.from_arrays(
            ["aa", "bb", "cc"], np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
        )
        centers = init_centroids(GuidanceSpec((("aa", "bb"),)), table, 1)
        np.testing.assert_array_equal([[0.5, 0.5, 0.0]], centers)

    def test_two_points(self):
        table = EmbeddingTable.from_arrays(["aa", "bb"], np.array([[0.0, 0.0], [3.0, 4.0]]))
        centers = init_centroids(None, table, 2, seed=4)
        self.assertListEqual(
            sorted(map(tuple, table.vectors.tolist())), sorted(map(tuple, centers.tolist()))
        )

    def test_composition(self):
        words, vectors, groups = gaussian_blobs(seed=2)
        table = EmbeddingTable.from_arrays(words, vectors)
        guidance = GuidanceSpec(((groups[0][0], groups[0][1]),))
        centers = init_centroids(guidance, table, 3, seed=9)
        self.assertEqual((3, 3), centers.shape)
        np.testing.assert_allclose(
            (table[groups[0][0]] + table[groups[0][1]]) / 2, centers[0]
        )
        for c in (1, 2):
            with self.subTest(centroid=c):
                self.assertTrue(
                    np.any(np.all(table.vectors == centers[c], axis=1)),
                    msg="Continued centroids are data points",
                )
        np.testing.assert_array_equal(centers, init_centroids(guidance, table, 3, seed=9))

    def test_one_centroid_per_blob(self):
        for seed in range(10):
            words, vectors, groups = gaussian_blobs(seed=seed)
            table = EmbeddingTable.from_arrays(words, vectors)
            guidance = GuidanceSpec(((groups[1][0], groups[1][1]),))
            for name, centers in (
                ("guided", init_centroids(guidance, table, 3, seed=seed)),
                ("unguided", init_centroids(None, table, 3, seed=seed)),
            ):
                with self.subTest(seed=seed, init=name):
                    blobs = np.argmax(centers, axis=1)
                    self.assertSetEqual({0, 1, 2}, set(blobs.tolist()))
                    if name == "guided":
                        self.assertEqual(1, blobs[0])
        np.testing.assert_array_equal(
            init_centroids(None, table, 3, seed=4), init_centroids(None, table, 3, seed=4)
        )

    def test_errors(self):
        table = EmbeddingTable.from_arrays(["aa", "bb"], np.eye(2))
        with self.assertRaises(ConfigError):
            init_centroids(None, table, 3)
        with self.assertRaises(ConfigError):
            init_centroids(GuidanceSpec((("aa",), ("bb",))), table, 1)
        with self.assertRaises(DataError):
            init_centroids(GuidanceSpec((("zz",),)), table, 2)


class TestFitKmeans(TestCase):
    def test_separated_blocks(self):
        table = EmbeddingTable.from_arrays(
            ["p1", "p2", "p3", "p4"], np.array([[0, 0], [0, 1], [10, 10], [10, 11]])
        )
        model = fit_kmeans(table, 2, seed=1)
        self.assertEqual(model.assignment["p1"], model.assignment["p2"])
        self.assertEqual(model.assignment["p3"], model.assignment["p4"])
        self.assertNotEqual(model.assignment["p1"], model.assignment["p3"])
        np.testing.assert_allclose(
            [[0, 0.5], [10, 10.5]], sorted(model.centroids.tolist()), atol=1e-12
        )
        self.assertAlmostEqual(1.0, model.inertia)
        self.assertListEqual(["p1", "p2"], model.members(model.assignment["p1"]))

    def test_brute_force(self):
        hits = 0
        for seed in range(50):
            x = np.random.default_rng(seed).uniform(0, 10, size=(8, 2))
            table = EmbeddingTable.from_arrays([f"w{i}" for i in range(8)], x)
            model = fit_kmeans(table, 2, seed=seed)
            optimum, fixed_points = brute_force(x)
            with self.subTest(seed=seed):
                self.assertGreaterEqual(model.inertia, optimum - 1e-9)
                self.assertTrue(
                    any(abs(model.inertia - f) <= 1e-9 * max(1.0, f) for f in fixed_points),
                    msg="The result is a Lloyd fixed point",
                )
            hits += abs(model.inertia - optimum) <= 1e-9 * max(1.0, optimum)
        self.assertGreaterEqual(hits, 45)

    def test_one_point_per_cluster(self):
        x = np.random.default_rng(0).normal(size=(5, 3))
        model = fit_kmeans(EmbeddingTable.from_arrays(list("abcde"), x), 5)
        self.assertAlmostEqual(0.0, model.inertia, places=12)
        self.assertEqual(5, len(set(model.labels.tolist())))

    def test_invariants(self):
        words, vectors, _ = gaussian_blobs(seed=5, noise=2.0)
        table = EmbeddingTable.from_arrays(words, vectors)
        model = fit_kmeans(table, 4, restarts=3, seed=5)
        distances = ((vectors[:, None, :] - model.centroids[None]) ** 2).sum(axis=2)
        assigned = distances[np.arange(len(words)), model.labels]
        self.assertTrue(np.all(assigned <= distances.min(axis=1) + 1e-9))
        self.assertAlmostEqual(1.0, assigned.sum() / model.inertia, delta=1e-6)
        self.assertSetEqual(set(words), set(model.assignment))

    def test_lloyd_monotonicity(self):
        words, vectors, _ = gaussian_blobs(seed=6, noise=3.0)
        table = EmbeddingTable.from_arrays(words, vectors)
        init = init_centroids(None, table, 3, seed=6)
        inertias = [
            fit_kmeans(table, 3, init=init, seeded=True, max_iter=m).inertia
            for m in range(1, 12)
        ]
        self.assertTrue(
            all(b <= a + 1e-9 for a, b in zip(inertias, inertias[1:])), msg=str(inertias)
        )

    def test_seeded_determinism(self):
        words, vectors, groups = gaussian_blobs(seed=7)
        table = EmbeddingTable.from_arrays(words, vectors)
        guidance = GuidanceSpec(tuple((g[0],) for g in groups))
        runs = [
            fit_kmeans(table, 3, init=init_centroids(guidance, table, 3, seed=1), seed=1, seeded=True)
            for _ in range(2)
        ]
        np.testing.assert_array_equal(runs[0].centroids, runs[1].centroids)
        self.assertTrue(runs[0].seeded)
        self.assertTrue(runs[0].parameters()["seeded"])

    def test_errors(self):
        table = EmbeddingTable.from_arrays(["aa", "bb"], np.eye(2))
        with self.assertRaises(ConfigError):
            fit_kmeans(table, 3)
        with self.assertRaises(ConfigError):
            fit_kmeans(table, 2, restarts=0)
        with self.assertRaises(ConfigError):
            fit_kmeans(table, 2, init=np.zeros((3, 2)))
        with self.assertRaises(ConfigError):
            fit_kmeans(table, 2, seeded=True)


class TestClusterTopics(TestCase):
    @staticmethod
    def model_at(centroids, words):
        centroids = np.asarray(centroids, dtype=float)
        return ClusterModel(
            K=len(centroids),
            centroids=centroids,
            words=tuple(words),
            labels=np.zeros(len(words), dtype=int),
            inertia=0.0,
            seeded=False,
            n_iter=1,
        )

    def test_cosine_order(self):
        table = EmbeddingTable.from_arrays(["a", "b", "c"], np.array([[1, 0], [0, 1], [0.9, 0.1]]))
        topics = cluster_topics(self.model_at([[1, 0]], table.words), table, top_n=3)
        self.assertListEqual(["a", "c", "b"], [w for w, _ in topics[0][1]])
        self.assertAlmostEqual(1.0, topics[0][1][0][1])

    def test_ties_and_zero_norm(self):
        table = EmbeddingTable.from_arrays(
            ["zeta", "alpha", "null", "beta"], np.array([[2, 0], [1, 0], [0, 0], [0, 1]])
        )
        topics = cluster_topics(self.model_at([[1, 0], [0, 0]], table.words), table, top_n=4)
        self.assertListEqual(["alpha", "zeta", "beta", "null"], [w for w, _ in topics[0][1]])
        self.assertEqual(-1.0, dict(topics[0][1])["null"])
        self.assertListEqual(
            ["alpha", "beta", "null", "zeta"],
            [w for w, _ in topics[1][1]],
            msg="A zero centroid scores everything -1",
        )

    def test_scale_invariance(self):
        words, vectors, _ = gaussian_blobs(seed=3, noise=1.5)
        table = EmbeddingTable.from_arrays(words, vectors)
        scaled = EmbeddingTable.from_arrays(words, 3.7 * vectors)
        model = fit_kmeans(table, 3, seed=3)
        scaled_model = self.model_at(3.7 * model.centroids, words)
        for (_, terms), (_, scaled_terms) in zip(
            cluster_topics(model, table, 8), cluster_topics(scaled_model, scaled, 8)
        ):
            self.assertListEqual([w for w, _ in terms], [w for w, _ in scaled_terms])

    def test_planted_blobs(self):
        for seed in range(3):
            words, vectors, groups = gaussian_blobs(seed=seed)
            table = EmbeddingTable.from_arrays(words, vectors)
            guidance = GuidanceSpec(tuple((g[0], g[1]) for g in groups))
            init = init_centroids(guidance, table, 3, seed=seed)
            model = fit_kmeans(table, 3, init=init, seed=seed, seeded=True)
            for c, terms in cluster_topics(model, table, 5):
                with self.subTest(seed=seed, cluster=c):
                    self.assertTrue(set(w for w, _ in terms) <= set(groups[c]))

    def test_export(self):
        words, vectors, _ = gaussian_blobs(seed=1)
        table = EmbeddingTable.from_arrays(words, vectors)
        model = fit_kmeans(table, 3, seed=1)
        with TemporaryDirectory() as tmp:
            export_clusters(model, table, Path(tmp) / "clusters", top_n=2)
            summary = json.loads((Path(tmp) / "clusters.json").read_text())
        self.assertEqual(3, len(summary["clusters"]))
        self.assertEqual(len(words), sum(len(c["members"]) for c in summary["clusters"]))
        self.assertEqual(2, len(summary["clusters"][0]["closest"]))
