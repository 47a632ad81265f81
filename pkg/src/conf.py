# -- Project information -----------------------------------------------------

project = "phi-diag"

author = "phi-diag developers"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx_rtd_theme",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx_autodoc_typehints",
    "sphinx_autodoc_annotation",
    "sphinx.ext.todo",
]

templates_path = []
html_static_path = []
exclude_patterns = ["phidiag_tests"]

# docstrings use the `:param x:` style
napoleon_use_param = True

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"

autodoc_inherit_docstrings = False
autodoc_typehints = "description"
