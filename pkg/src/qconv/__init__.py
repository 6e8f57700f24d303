"""Quantum convolutions, convolution-swap stabilizer tests and magic measures at desk scale."""

__version__ = "0.1.0"
