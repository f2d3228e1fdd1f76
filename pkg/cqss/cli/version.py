# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Version of cqss and of the transcript format it writes."""

import sys

from cqss import __version__
from cqss.defaults import EXIT_OK, TRANSCRIPT_HEADER


def main(argv=None):
    print(f"cqss {__version__} ({TRANSCRIPT_HEADER})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
