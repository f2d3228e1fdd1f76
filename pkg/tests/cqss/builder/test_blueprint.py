# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import math
import os
import tempfile
import unittest
from unittest.mock import patch

import yaml
from cqss.builder.blueprint import ExperimentBlueprint
from cqss.defaults import ATTACK, CQSS_HIERA_FILE, QUDIT, SESSION, SWEEP
from cqss.exceptions import BlueprintValidationError
from parameterized import parameterized

HIERA = "tests/config/hiera.yaml"


class TestExperimentBlueprint(unittest.TestCase):
    @parameterized.expand(["default", "attack"])
    @patch.dict(os.environ, {CQSS_HIERA_FILE: HIERA})
    def test_blueprint_set_context_kv(self, profile):
        blueprint = ExperimentBlueprint()
        context = {"profile": profile, "site": "lab"}

        for key, value in context.items():
            blueprint.set_context(key, value)

        self.assertEqual(HIERA, blueprint.filename)
        self.assertDictEqual(context, blueprint.context)

    @parameterized.expand(["default", "attack"])
    def test_blueprint_set_context_dict(self, profile):
        blueprint = ExperimentBlueprint(HIERA)
        context = {"profile": profile, "site": "lab"}

        blueprint.set_context(context)

        self.assertDictEqual(context, blueprint.context)

    def test_attack_profile(self):
        blueprint = ExperimentBlueprint(HIERA)
        blueprint.set_context("profile", "attack")
        blueprint.create()

        self.assertTrue(blueprint.hierarchical)
        self.assertDictEqual(
            {"adversary_agent": 0, "phi": math.pi / 4}, blueprint.get_definition(ATTACK)
        )
        session = blueprint.get_definition(SESSION)
        self.assertEqual(0.1, session["abort_threshold"])
        self.assertEqual(400, session["rounds"])
        self.assertEqual(0.2, session["p_control"])
        self.assertEqual(7, session["rng_seed"])

    def test_hierarchy_is_read_relative_to_its_file(self):
        filename = os.path.abspath(HIERA)
        self.addCleanup(os.chdir, os.getcwd())
        with tempfile.TemporaryDirectory() as workdir:
            os.chdir(workdir)
            blueprint = ExperimentBlueprint(filename)
            blueprint.set_context("profile", "attack")
            blueprint.create()

            self.assertEqual(0, blueprint.get_definition(ATTACK)["adversary_agent"])
            self.assertEqual(7, blueprint.get_definition(SESSION)["rng_seed"])
        self.assertEqual(
            os.path.join(os.path.dirname(filename), "."),
            blueprint.anchored_config()["yaml"]["datadir"],
        )
        self.assertEqual(".", blueprint.config["yaml"]["datadir"])

    def test_empty_hierarchy_warns(self):
        with tempfile.TemporaryDirectory() as workdir:
            filename = os.path.join(workdir, "hiera.yaml")
            with open(filename, "w", encoding="utf-8") as file_obj:
                yaml.safe_dump(
                    {
                        "backends": ["yaml"],
                        "context": ["profile"],
                        "hierarchy": ["common", "profile/%{profile}"],
                        "yaml": {"datadir": "."},
                    },
                    file_obj,
                )
            blueprint = ExperimentBlueprint(filename)
            blueprint.create()

            with self.assertLogs("cqss.builder.blueprint", level="WARNING"):
                self.assertEqual({}, blueprint.document())

    def test_default_profile(self):
        blueprint = ExperimentBlueprint(HIERA)
        blueprint.create()

        self.assertEqual("default", blueprint.context["profile"])
        document = blueprint.document()
        self.assertNotIn(ATTACK, document)
        self.assertEqual(0.05, document[SESSION]["abort_threshold"])
        self.assertEqual(3, len(document[SWEEP]["phis"]))
        self.assertIsNone(blueprint.get_definition(QUDIT, False))

    def test_plain_document(self):
        blueprint = ExperimentBlueprint("tests/config/plain_experiment.yaml")
        blueprint.create()

        self.assertFalse(blueprint.hierarchical)
        document = blueprint.document()
        self.assertEqual([SESSION, ATTACK, QUDIT], list(document))
        self.assertEqual("qudit:2", document[SESSION]["variant"])
        with self.assertRaises(KeyError):
            blueprint.get_definition(SWEEP)

    @patch.dict(os.environ, {"CQSS_TEST_MESSAGE": "1011"})
    def test_environment_variables(self):
        blueprint = ExperimentBlueprint("tests/config/env_experiment.yaml")

        self.assertEqual("1011", blueprint.document()["split"]["message"])

    @parameterized.expand(
        [
            ("tests/config/missing_context_hiera.yaml",),
            ("tests/config/missing_datadir_hiera.yaml",),
            ("tests/config/not_a_mapping.yaml",),
        ]
    )
    def test_blueprint_throws_error(self, filename):
        with self.assertRaises(BlueprintValidationError):
            _ = ExperimentBlueprint(filename)

    def test_missing_file(self):
        with self.assertRaises(OSError):
            _ = ExperimentBlueprint("tests/config/no_such_file.yaml")


if __name__ == "__main__":
    unittest.main()
