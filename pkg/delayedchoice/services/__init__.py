# Service layer: one stateless service object per concern
__all__ = []
