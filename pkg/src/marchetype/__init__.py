"""Marchetype: constrained targeting LPs and a restarted PDHG solver."""

__version__ = "0.1.0"
