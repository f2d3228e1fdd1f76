# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Entry point of the `cqss` console script.

`cqss <command> [<args>]` looks the command up in the `cqss.cli.command` entry point
group (`run`, `epr`, `attack-sweep`, `curve`, `split-demo`, `qudit-check`, `version`)
and hands it the remaining arguments. Each command's module docstring supplies its line
in the usage text, and the command's return value becomes the exit status.
"""

import argparse
import sys
from typing import List

from cqss.utilities.mixin import CommandLocatorMixin

USAGE_COLUMN = 16


class CQSSCLI(CommandLocatorMixin):
    entry_point_group = "cqss.cli.command"

    @property
    def usage(self) -> str:
        lines = ["cqss <command> [<args>]", "The cqss commands are:"]
        lines.extend(
            f"{name:<{USAGE_COLUMN}}{self.command_summary(name)}"
            for name in self.command_names()
        )
        return "\n".join(lines)

    def run(self, argv: List[str]) -> int:
        parser = argparse.ArgumentParser(prog="cqss", usage=self.usage)
        parser.add_argument("command", choices=self.command_names(), metavar="COMMAND")
        # the command's own options are parsed by the command
        args = parser.parse_args(argv[:1])
        return self.command(args.command)(argv[1:])


def main(argv=None):
    sys.exit(CQSSCLI().run(sys.argv[1:] if argv is None else argv))
