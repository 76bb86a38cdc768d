# -*- coding: utf-8 -*-
#
# ep-holonomy documentation build configuration file
import os
import sys

sys.path.insert(0, os.path.abspath('../ep_holonomy'))
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'm2r',
    'sphinx.ext.autosummary'
]
autodoc_default_flags = ['__init__', 'members', 'undoc-members']
autosummary_generate = True

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
master_doc = 'index'

project = u'ep-holonomy'
copyright = u'2026, ep-holonomy developers'
author = u'ep-holonomy developers'
version = 'latest'
release = 'latest'

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_sidebars = {
    '**': [
        'relations.html',
        'searchbox.html',
    ]
}
htmlhelp_basename = 'ep-holonomydoc'

# -- Options for other builders -------------------------------------------

latex_documents = [
    (master_doc, 'ep-holonomy.tex', u'ep-holonomy Documentation', author, 'manual'),
]
man_pages = [
    (master_doc, 'ep-holonomy', u'ep-holonomy Documentation', [author], 1)
]
texinfo_documents = [
    (master_doc, 'ep-holonomy', u'ep-holonomy Documentation', author, 'ep-holonomy',
     'Geometric phases and holonomies of non-Hermitian matrix families.', 'Miscellaneous'),
]
