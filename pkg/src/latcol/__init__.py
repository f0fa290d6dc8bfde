"""latcol: exact enumeration of orbit colourings of cubic lattices."""

__version__ = "0.1.0"
