"""O(n) loop model on random planar maps via nested loops."""

__version__ = "0.1.0"
