"""orderlab: finite-instance workbench for Kock-Zöberlein monads."""

__version__ = "0.1.0"
