# Configuration file for the Sphinx documentation builder.

import os
import sys
sys.path.insert(0, os.path.abspath('../'))

import elimsvm

project = 'elimsvm'
copyright = '2026, elimsvm developers'
author = 'elimsvm developers'
release = elimsvm.__version__

extensions = [
    'sphinx.ext.autodoc'
]

master_doc = 'index'
exclude_patterns = ['_build']

html_theme = 'sphinx_rtd_theme'
