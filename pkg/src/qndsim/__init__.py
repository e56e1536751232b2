"""Simulation and characterization of QND measurements on qubits."""

__version__ = "0.1.0"

from . import cnot_qnd, hilbert, metrics, photonics, weakval  # noqa: F401
