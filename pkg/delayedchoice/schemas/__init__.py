# Pydantic records emitted by the services and written by the CLI
__all__ = []
