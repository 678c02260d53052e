# -*- coding: utf-8 -*-
#
# topicflow documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys
from sphinx.ext.apidoc import main

sys.path.insert(1, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.mathjax', 'sphinx.ext.autodoc', 'sphinx.ext.viewcode',
              'sphinx.ext.autosummary', 'sphinx.ext.napoleon']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'topicflow'
copyright = u'2022, Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department ' \
            u'All rights reserved'

version_info = {}
with open(os.path.join(os.path.curdir, '..', 'topicflow', '_version.py')) as f:
    exec(f.read(), version_info)
release = version_info['__version__']
version = '.'.join(release.split('.')[0:2])

exclude_patterns = ['_build', '**/tests']
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

try:
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
except ImportError:
    html_theme = 'default'

htmlhelp_basename = 'topicflowDoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    ('index', 'topicflow.tex', u'topicflow Documentation',
     u'Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department', 'manual'),
]

man_pages = [
    ('index', 'topicflow', u'topicflow Documentation',
     [u'Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department'], 1)
]

main(['-e', '-o', 'apidoc', '../topicflow', '--force'])
