"""determination-depth: depth of layered determinations, measured and checked."""

__version__ = "0.1.0"
