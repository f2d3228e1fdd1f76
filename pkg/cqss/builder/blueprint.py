# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for loading experiment configuration documents.

This module provides the ExperimentBlueprint class, which reads the configuration of an
experiment either from a single YAML document or from a Phiera hierarchy, where
profile documents are layered over common values. A file is hierarchical when it
declares a `hierarchy`; it then also needs `backends` and `context` lists and a
`datadir` for every backend.

Values from the hierarchy are looked up per top-level section (session, attack, sweep,
split, qudit) and deep-merged in hierarchy order: a later level overrides the scalars of
an earlier one and extends its lists, so the most specific level is listed last. Relative
`datadir` values are resolved against the directory of the hierarchy file. Context
values such as the profile are set from the command line.
"""

import copy
import logging
import os
from typing import Any, Dict, List, Optional

import yaml
from multipledispatch import dispatch
from phiera import Hiera

from cqss.defaults import (
    ATTACK,
    CQSS_HIERA_FILE,
    DEFAULT_PROFILE,
    HIERA_FILE,
    PATTERN_ENV_VARS,
    QUDIT,
    SESSION,
    SPLIT,
    SWEEP,
)
from cqss.exceptions import BlueprintValidationError
from cqss.utilities.common import env_vars_constructor

logger = logging.getLogger(__name__)

SECTIONS = (SESSION, ATTACK, SWEEP, SPLIT, QUDIT)


class ExperimentBlueprint:
    """
    A class to look up experiment configuration, hierarchically with Phiera or from a
    single document.
    """

    def __init__(self, filename: Optional[str] = None):
        self.filename = filename or os.getenv(CQSS_HIERA_FILE, default=HIERA_FILE)
        self.config = self.filename
        self.context = {}
        self.blueprint = None
        if self.hierarchical:
            self.validate()

    @property
    def filename(self):
        return self._filename

    @filename.setter
    def filename(self, filename: str):
        self._filename = filename

    @property
    def config(self) -> Dict:
        return self._config

    @config.setter
    def config(self, filename: str):
        with open(filename, "rb") as file_obj:
            self._config = yaml.safe_load(file_obj) or {}
        if not isinstance(self._config, dict):
            raise BlueprintValidationError(
                f"{filename} must hold a mapping, found {type(self._config)}"
            )

    @property
    def hierarchical(self) -> bool:
        return "hierarchy" in self._config

    @property
    def hiera_context(self) -> List:
        return self._config["context"]

    @dispatch(dict)
    def set_context(self, context: Dict):
        self.context.update(context)

    @dispatch(str, str)
    def set_context(self, key: str, value: str):
        self.context[key] = value

    def create(self):
        if not self.hierarchical:
            return
        for key in self.hiera_context:
            if key not in self.context:
                if key != "profile":
                    raise BlueprintValidationError(
                        f"No value given for context key {key}; pass --{key} <value>"
                    )
                self.context[key] = DEFAULT_PROFILE
        self.blueprint = Hiera(self.anchored_config(), context=self.context)

    def anchored_config(self) -> Dict:
        """The hierarchy with every relative datadir resolved against its file."""
        config = copy.deepcopy(self.config)
        base = os.path.dirname(os.path.abspath(self.filename))
        for backend in config["backends"]:
            datadir = config[backend]["datadir"]
            config[backend]["datadir"] = os.path.join(base, datadir)
        return config

    def get_definition(self, key: str, throw_error_on_missing_key: bool = True):
        if not self.hierarchical:
            if throw_error_on_missing_key and key not in self.config:
                raise KeyError(f"{key} not defined in {self.filename}")
            return self.config.get(key)
        return self.blueprint.get(
            key=key,
            merge=dict,
            merge_deep=True,
            throw=throw_error_on_missing_key,
            # Values may reference context entries as %{name}
            context=self.context,
        )

    def document(self) -> Dict[str, Any]:
        """Every configured section, merged across the hierarchy."""
        definitions = {
            section: self.get_definition(section, throw_error_on_missing_key=False)
            for section in SECTIONS
        }
        found = sorted(k for k, v in definitions.items() if v)
        if self.hierarchical and not found:
            logger.warning(f"No configuration found through {self.filename}")
        logger.debug(f"Loaded sections {found}")
        return {section: value for section, value in definitions.items() if value}

    def validate(self):
        hiera_keys = ["backends", "context", "hierarchy"]

        # Validate required keys in the hiera configuration file
        for key in hiera_keys:
            try:
                assert isinstance(
                    self.config[key], list
                ), f"{key} must be of type list, found: {type(self.config[key])}"
            except KeyError as err:
                raise BlueprintValidationError(
                    f"{key} not defined in the hiera configuration file: "
                    f"{self.filename}"
                ) from err
            except AssertionError as err:
                raise BlueprintValidationError(err) from err

        # Validate datadir is defined for the backends
        for backend in self.config["backends"]:
            try:
                assert isinstance(self.config[backend], dict), (
                    f"{backend} must be of type dict, "
                    f"found: {type(self.config[backend])}"
                )
                assert (
                    "datadir" in self.config[backend]
                ), f"datadir not found in {backend} configuration"
            except KeyError as err:
                raise BlueprintValidationError(
                    f"{backend} backend not defined in the hiera configuration file:"
                    f"{self.filename}"
                ) from err
            except AssertionError as err:
                raise BlueprintValidationError(err) from err


# PyYaml Loaders: Phiera reads its data files with yaml.Loader, single documents are
# read with yaml.SafeLoader
for _loader in (yaml.Loader, yaml.SafeLoader):
    _loader.add_implicit_resolver("!env", PATTERN_ENV_VARS, None)
    _loader.add_constructor("!env", env_vars_constructor)
