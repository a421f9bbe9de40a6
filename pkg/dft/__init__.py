"""Dynamic fault tree analysis package."""

__version__ = "0.3.0"
