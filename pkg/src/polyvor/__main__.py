# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Allow ``python -m polyvor``.
"""
import sys

from polyvor.cli import main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
