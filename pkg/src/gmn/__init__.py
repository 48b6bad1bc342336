"""Simulation and analysis of the entanglement-assisted three-party "Guess my Number" game."""

__version__ = "0.1.0"
