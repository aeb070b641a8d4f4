# -*- coding: utf-8 -*-
#
# facedrive documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
#
# All configuration values have a default; values that are commented out
# serve to show the default.

import os
import pathlib
import sys


# add the facedrive source to the build path
CURRENT_PATH = pathlib.Path(os.path.abspath(os.path.dirname(__file__)))
FACEDRIVE_PATH = CURRENT_PATH.parent.parent

sys.path.insert(0, str(FACEDRIVE_PATH))


# on_rtd is whether we are on readthedocs.org
on_rtd = os.environ.get("READTHEDOCS", None) == "True"

# to retrieve facedrive metadata
import facedrive


# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.coverage",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.autosummary",
    "sphinx_copybutton",
]

# =============================================================================
# EXTRA CONF
# =============================================================================

autodoc_member_order = "bysource"

# =============================================================================
# NUMPY DOC
# =============================================================================

numpydoc_class_members_toctree = False


# Add any paths that contain templates here, relative to this directory.
templates_path = ["_templates"]

source_suffix = ".rst"

# The master toctree document.
master_doc = "index"

# General information about the project.
project = facedrive.NAME
copyright = "2025, facedrive developers"

author = "facedrive developers"

# The short X.Y version.
version = facedrive.VERSION
# The full version, including alpha/beta/rc tags.
release = version

language = "en"

exclude_patterns = ["**.ipynb_checkpoints"]

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = "sphinx"

todo_include_todos = False


# -- Options for HTML output ----------------------------------------------

import sphinx_rtd_theme

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = []


# -- Options for HTMLHelp output ------------------------------------------

htmlhelp_basename = "facedrivedoc"


# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (
        master_doc,
        "facedrive.tex",
        "facedrive Documentation",
        author,
        "manual",
    ),
]


# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, "facedrive", "facedrive Documentation", [author], 1)
]


# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (
        master_doc,
        "facedrive",
        "facedrive Documentation",
        author,
        "facedrive",
        "Template-space driver maps and face-motion metrics.",
        "Miscellaneous",
    ),
]


intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
}


# =============================================================================
# INJECT README INTO THE RESTRUCTURED TEXT
# =============================================================================

import m2r2

DYNAMIC_RST = {
    "README.md": "README.rst",
    "CHANGELOG.md": "CHANGELOG.rst",
}

(CURRENT_PATH / "_dynamic").mkdir(exist_ok=True)

for md_name, rst_name in DYNAMIC_RST.items():
    md_path = FACEDRIVE_PATH / md_name
    with open(md_path) as fp:
        readme_md = fp.read().split("<!-- BODY -->", 1)[-1]

    rst_path = CURRENT_PATH / "_dynamic" / rst_name

    with open(rst_path, "w") as fp:
        fp.write(".. FILE AUTO GENERATED !! \n")
        fp.write(m2r2.convert(readme_md))
        print(f"{md_path} -> {rst_path} regenerated!")
