# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

from importlib.metadata import version

__version__ = version(__name__)
