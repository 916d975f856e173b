"""Physics-driven unsupervised underwater image restoration."""

__version__ = "0.1.0"
