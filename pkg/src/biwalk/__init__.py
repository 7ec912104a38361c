"""Bipartite discrete quantum walks: operators, spectra, Hamiltonians and state transfer."""

__version__ = "0.1.0"
