"""Clasificación supervisada con embeddings cuánticos entrenables (simulación de dos qubits)."""

__version__ = "0.1.0"
