"""First passage percolation with boundary weights on configuration-model graphs."""

__version__ = "0.1.0"
