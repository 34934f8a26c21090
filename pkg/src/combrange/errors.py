"""Shared exception types."""


class SizeLimitError(ValueError):
    """An exact routine was asked for a size beyond its documented limit."""


class CapacityError(RuntimeError):
    """A run exhausted a resource; carries the replicate index reached."""

    def __init__(self, message: str, replicate_index: int):
        super().__init__(message)
        self.replicate_index = replicate_index
