"""Certificate-producing constructions of modular Hadamard matrices."""

__version__ = "0.1.0"
