# Shared infrastructure and the two-qubit state-vector engine
__all__ = []
