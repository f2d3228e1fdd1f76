# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import io
import unittest
from importlib.metadata import EntryPoint
from unittest import mock

from cqss.cli.commands import CQSSCLI, main
from cqss.defaults import TRANSCRIPT_HEADER

ENTRY_POINTS = [
    EntryPoint(name="version", value="cqss.cli.version:main", group="cqss.cli.command"),
    EntryPoint(name="curve", value="cqss.cli.curve:main", group="cqss.cli.command"),
]


@mock.patch("cqss.utilities.mixin.entry_points", return_value=ENTRY_POINTS)
class TestCQSSCLI(unittest.TestCase):
    def test_usage_lists_commands(self, mock_entry_points):
        usage = CQSSCLI().usage

        self.assertIn("version         Version of cqss", usage)
        self.assertIn("curve           Tabulate the closed-form", usage)
        mock_entry_points.assert_called_once_with(group="cqss.cli.command")

    @mock.patch("sys.stdout", new_callable=io.StringIO)
    def test_dispatch(self, mock_stdout, _):
        self.assertEqual(0, CQSSCLI().run(["version"]))
        self.assertIn(TRANSCRIPT_HEADER, mock_stdout.getvalue())

    @mock.patch("sys.stdout", new_callable=io.StringIO)
    def test_main_exits_with_the_command_status(self, _, __):
        with self.assertRaises(SystemExit) as context:
            main(["version"])
        self.assertEqual(0, context.exception.code)

    @mock.patch("sys.stderr", new_callable=io.StringIO)
    def test_unknown_command(self, _, __):
        with self.assertRaises(SystemExit) as context:
            CQSSCLI().run(["teleport"])
        self.assertEqual(2, context.exception.code)


if __name__ == "__main__":
    unittest.main()
