# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
try:
    import coverage

    coverage.process_startup()
except ImportError:
    pass
