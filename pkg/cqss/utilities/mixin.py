# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import inspect
import logging
from importlib.metadata import entry_points
from typing import Callable, Dict, List, Optional

logger = logging.getLogger(__name__)

Command = Callable[..., int]


class CommandLocatorMixin:
    """
    Finds the subcommands installed under an entry point group. The group is read the
    first time a command is looked up; `load_commands` reads it again.
    """

    entry_point_group: str = ""
    _commands: Optional[Dict[str, Command]] = None

    def load_commands(self) -> Dict[str, Command]:
        if self._commands is not None:
            logger.warning(f"Reloading the commands of {self.entry_point_group}")
        self._commands = {
            entry_point.name: entry_point.load()
            for entry_point in entry_points(group=self.entry_point_group)
        }
        logger.debug(
            f"Found {len(self._commands)} commands in {self.entry_point_group}"
        )
        return self._commands

    @property
    def commands(self) -> Dict[str, Command]:
        if self._commands is None:
            return self.load_commands()
        return self._commands

    def command(self, name: str) -> Command:
        return self.commands[name]

    def command_names(self) -> List[str]:
        return sorted(self.commands)

    def command_summary(self, name: str) -> str:
        """First line of the docstring of the module defining the command."""
        module = inspect.getmodule(self.command(name))
        doc = inspect.getdoc(module) if module is not None else None
        if not doc:
            raise RuntimeError(f"Command {name} has no module docstring")
        return doc.splitlines()[0].rstrip(".")
