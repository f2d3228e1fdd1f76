# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for writing and reading session artifacts.

A transcript is line-delimited: the version header, then the configuration, then the
attack (or null), then one JSON record per round in round order. Field order follows
the model definitions, so identical sessions produce identical files.

Summaries and keys are YAML documents.
"""

import json
import logging
from typing import Any, Dict

import yaml
from pydantic import TypeAdapter

from cqss.defaults import TRANSCRIPT_HEADER
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.protocol.records import KeyMaterial, Record, SessionTranscript
from cqss.utilities.common import MAX_DIGIT_BASE, format_digits

logger = logging.getLogger(__name__)

_RECORD = TypeAdapter(Record)


def write_transcript(t: SessionTranscript, filename: str):
    with open(filename, "w", encoding="utf-8") as file_obj:
        file_obj.write(f"{TRANSCRIPT_HEADER}\n")
        file_obj.write(f'{{"config": {t.config.model_dump_json()}}}\n')
        adversary = t.adversary.model_dump_json() if t.adversary else "null"
        file_obj.write(f'{{"adversary": {adversary}}}\n')
        for record in t.records:
            file_obj.write(f"{record.model_dump_json()}\n")
    logger.info(f"Wrote {len(t.records)} records to {filename}")


def read_transcript(filename: str) -> SessionTranscript:
    """
    Args:
        filename (str): Transcript written by `write_transcript`

    Returns:
        The transcript, validated again

    Raises:
        ValueError: If the header names another format version.
    """
    with open(filename, "r", encoding="utf-8") as file_obj:
        header = file_obj.readline().rstrip("\n")
        if header != TRANSCRIPT_HEADER:
            raise ValueError(
                f"{filename} is not a {TRANSCRIPT_HEADER} file, found header {header!r}"
            )
        config = ProtocolConfig.model_validate(json.loads(file_obj.readline())["config"])
        adversary = json.loads(file_obj.readline())["adversary"]
        records = [_RECORD.validate_json(line) for line in file_obj if line.strip()]
    return SessionTranscript(
        config=config,
        records=records,
        adversary=AttackConfig.model_validate(adversary) if adversary else None,
    )


def keys_document(keys: KeyMaterial) -> Dict[str, Any]:
    def render(key):
        # digit strings only exist up to base 36
        return format_digits(key) if keys.digit_base <= MAX_DIGIT_BASE else list(key)

    return {
        "digit_base": keys.digit_base,
        "length": keys.length,
        "positions": keys.positions,
        "k_alice": render(keys.k_alice),
        "k_agents": [render(key) for key in keys.k_agents],
    }


def write_yaml(document: Dict[str, Any], filename: str):
    with open(filename, "w", encoding="utf-8") as file_obj:
        yaml.safe_dump(document, file_obj, sort_keys=False, default_flow_style=False)
    logger.info(f"Wrote {filename}")
