# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import os
import tempfile
import unittest
from unittest import mock

import yaml
from cqss.cli.split_demo import hamming_distance
from cqss.cli.split_demo import main as split_demo_main
from cqss.defaults import CQSS_HIERA_FILE, SPLIT_REPORT_FILE
from parameterized import parameterized

HIERA = "tests/config/hiera.yaml"
ENV_EXPERIMENT = "tests/config/env_experiment.yaml"


class TestCliSplitDemo(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)
        self.out = self.tmpdir.name

    def report(self):
        filename = os.path.join(self.out, SPLIT_REPORT_FILE)
        with open(filename, encoding="utf-8") as file_obj:
            return yaml.safe_load(file_obj)

    @parameterized.expand([([], 2), (["--variant", "epr"], 4)])
    def test_random_secret(self, extra, base):
        argv = ["--config", HIERA, "--out", self.out, "--rounds", "400"]
        self.assertEqual(0, split_demo_main(argv + extra))

        report = self.report()
        self.assertTrue(report["round_trip"])
        self.assertEqual(base, report["digit_base"])
        self.assertEqual(16, report["message_length"])
        self.assertEqual(16, len(report["ciphertext"]))
        self.assertEqual([0, 1], sorted(report["single_share_distance"]))
        self.assertEqual(16 * (1 - 1 / base), report["expected_single_share_distance"])

    @mock.patch.dict(os.environ)
    def test_single_share_looks_random(self):
        os.environ.pop(CQSS_HIERA_FILE, None)
        with mock.patch("cqss.cli.arguments.HIERA_FILE", "tests/config/absent.yaml"):
            code = split_demo_main(["--out", self.out, "--rounds", "400"])
        self.assertEqual(0, code)

        report = self.report()
        self.assertEqual(128, report["message_length"])
        self.assertEqual(64.0, report["expected_single_share_distance"])
        for distance in report["single_share_distance"].values():
            self.assertAlmostEqual(64, distance, delta=15)

    @mock.patch.dict(os.environ, {"CQSS_TEST_MESSAGE": "1011 0110"})
    def test_configured_secret(self):
        argv = ["--config", ENV_EXPERIMENT, "--out", self.out]
        self.assertEqual(0, split_demo_main(argv))

        self.assertEqual(8, self.report()["message_length"])

    @mock.patch.dict(os.environ, {"CQSS_TEST_MESSAGE": "1021"})
    def test_invalid_secret(self):
        argv = ["--config", ENV_EXPERIMENT, "--out", self.out]
        self.assertEqual(2, split_demo_main(argv))

    def test_key_too_short(self):
        argv = ["--config", HIERA, "--out", self.out, "--rounds", "10"]
        self.assertEqual(1, split_demo_main(argv))

    def test_hamming_distance(self):
        self.assertEqual(2, hamming_distance([0, 1, 1, 0], [1, 1, 0, 0]))


if __name__ == "__main__":
    unittest.main()
