#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

"""Run the facedrive command line interface with ``python -m facedrive``."""

import sys

from .cli import main

sys.exit(main())
