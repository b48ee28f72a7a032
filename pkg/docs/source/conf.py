# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
# http://www.sphinx-doc.org/en/master/config

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

project = 'mpsQAOA'
copyright = '2024, the mpsQAOA developers'
author = 'the mpsQAOA developers'

version = '1.0'
release = '1.0.0'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
]

# PyQt5 is only needed for the worker pool, the docs build without it
autodoc_mock_imports = ['PyQt5']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'alabaster'
html_static_path = ['_static']
htmlhelp_basename = 'mpsQAOAdoc'

latex_documents = [
    (master_doc, 'mpsQAOA.tex', 'mpsQAOA Documentation', author, 'manual'),
]
man_pages = [
    (master_doc, 'mpsqaoa', 'mpsQAOA Documentation', [author], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable/', None)}
