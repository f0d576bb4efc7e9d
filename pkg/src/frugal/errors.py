"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: domain/input errors -> 1,
scale errors -> 2.
"""


class FrugalError(Exception):
    """Base class for all library errors."""


class InputError(FrugalError):
    """Malformed input: unknown ids, negative bids, bad JSON shapes."""


class DomainError(FrugalError):
    """Structurally invalid instance (e.g. not a (k+1)-flow)."""


class MonopolyError(DomainError):
    """The set system is not monopoly-free; payments are unbounded."""


class ScaleError(FrugalError):
    """An enumeration exceeded its configured desk-scale cap."""
