"""Quantum KNN over Hamming distance, simulated exactly on a sparse statevector."""

__version__ = "0.1.0"
