# -*- coding: utf-8 -*-
#
# Release Notes documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

# Allow Sphinx to find phasegate.
sys.path.insert(0, os.path.abspath(os.path.join(__file__, '..', '..', '..')))

import phasegate


# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'beanbag_docutils.sphinx.ext.extlinks',
    'beanbag_docutils.sphinx.ext.intersphinx_utils',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'Phasegate Release Notes'
copyright = '2026, Phasegate developers'
author = 'Phasegate developers'

# The short X.Y version.
version = '.'.join([str(i) for i in phasegate.__version_info__[:2]])

# The full version, including alpha/beta/rc tags.
release = phasegate.get_version_string()

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

add_function_parentheses = True
add_module_names = True
pygments_style = 'sphinx'
todo_include_todos = False


# -- Options for HTML output ----------------------------------------------

html_theme = 'classic'
html_title = 'Phasegate Release Notes'
html_static_path = ['_static']
htmlhelp_basename = 'PhasegateReleaseNotesdoc'


# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (master_doc, 'PhasegateReleaseNotes.tex',
     'Phasegate Release Notes', 'Phasegate developers', 'manual'),
]


# -- Options for cross-references ------------------------------------------

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

extlinks = {
    'pypi': ('https://pypi.org/project/%s/', '%s'),
}
