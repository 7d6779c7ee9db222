"""cohlogic: a desk-scale workbench for positive (coherent) logic."""

__version__ = "0.1.0"
