# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for running the rounds of a session, in-process or on a process pool.

Every round draws from its own random stream, fixed by the session seed and the round
id, so the records do not depend on which worker ran a round or in which order rounds
finished. Workers receive contiguous blocks of round ids and read the streams of a
block from one `RoundStreams`. Results are always returned in round order.
"""

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, List, Optional, TypeVar

import numpy as np

from cqss.defaults import ROUND_STREAM
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.utilities.common import RoundStreams

logger = logging.getLogger(__name__)

R = TypeVar("R")
RoundFunction = Callable[
    [ProtocolConfig, np.random.Generator, Optional[AttackConfig], int], R
]


def _run_block(
    round_fn: RoundFunction,
    config: ProtocolConfig,
    attack: Optional[AttackConfig],
    round_ids: range,
) -> List[R]:
    streams = RoundStreams(config.rng_seed, ROUND_STREAM)
    return [round_fn(config, streams(r), attack, r) for r in round_ids]


def execute_rounds(
    config: ProtocolConfig,
    round_fn: RoundFunction,
    attack: Optional[AttackConfig] = None,
) -> List[R]:
    """
    Args:
        config (ProtocolConfig): Session configuration; `max_workers` selects the pool
        round_fn (RoundFunction): Module-level function producing one record
        attack (Optional[AttackConfig]): Attack passed through to every round

    Returns:
        One record per round, ordered by round id
    """
    job = partial(_run_block, round_fn, config, attack)
    if not config.max_workers or config.max_workers == 1:
        return job(range(config.rounds))

    workers = min(config.max_workers, os.cpu_count() or 1)
    size = max(1, config.rounds // (workers * 8))
    starts = range(0, config.rounds, size)
    blocks = [range(i, min(i + size, config.rounds)) for i in starts]
    logger.debug(f"Running {config.rounds} rounds on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(itertools.chain.from_iterable(executor.map(job, blocks)))
