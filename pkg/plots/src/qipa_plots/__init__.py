"""Figure generation from solver CSV artifacts.

This package reads the documented trace/sweep/solutions CSV files and
renders publication-style figures.  It deliberately never imports the
solver package: the CSV schemas are the entire interface.
"""

from .figures import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
