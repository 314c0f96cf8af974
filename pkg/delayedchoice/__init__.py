"""Quantum delayed-choice simulator and hidden-variable analysis toolkit."""

__version__ = "1.0.0"
