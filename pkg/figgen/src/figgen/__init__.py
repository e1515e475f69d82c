"""Figure rendering for homsr CSV artifacts; CSV in, image out."""

from .render import KINDS, FigureSpec, SchemaError, render

__version__ = "0.1.0"
