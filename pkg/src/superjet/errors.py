"""Shared exception types."""


class DimensionError(ValueError):
    """Operands live over different generator counts / variable counts."""


class ParityError(ValueError):
    """An element violates a required even/odd parity constraint."""


class DegreeBoundError(ValueError):
    """An expanded composition would exceed the configured total-degree bound."""


class DomainError(ValueError):
    """A geometric operation was requested outside its domain (e.g. antipodal log)."""


class SchemaError(ValueError):
    """A JSON payload does not match the documented schema."""
