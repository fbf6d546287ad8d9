#!/usr/bin/env python
# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
import setuptools

if __name__ == "__main__":
    setuptools.setup(use_scm_version=True)
