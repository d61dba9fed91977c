"""Thermal Renyi entanglement-entropy asymptotics of the free Fermi gas."""

__version__ = "0.1.0"
