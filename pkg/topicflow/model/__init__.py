# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Back-end data types shared by all engines.

`corpus` holds raw posts, `preprocess` turns them into token documents and the shared
vocabulary, and `guidance` reads instructor keyword lines.
"""
