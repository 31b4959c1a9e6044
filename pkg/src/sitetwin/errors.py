"""Exception types shared across the engine."""


class SiteTwinError(Exception):
    """Base class for all engine errors."""


class CycleError(SiteTwinError):
    """Precedence network contains a cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("precedence cycle: " + " -> ".join(self.cycle))


class DanglingReference(SiteTwinError):
    """An id used somewhere does not resolve to a known object."""

    def __init__(self, ref, context=""):
        self.ref = ref
        msg = f"unresolved reference {ref!r}"
        if context:
            msg += f" in {context}"
        super().__init__(msg)


class MissingDuration(SiteTwinError):
    pass


class UnitMismatch(SiteTwinError):
    pass


class ZeroPlanned(SiteTwinError):
    pass


class NoEvidence(SiteTwinError):
    pass


class EmptyMatrix(SiteTwinError):
    pass


class NoGoldLabels(SiteTwinError):
    pass


class PeriodMismatch(SiteTwinError):
    pass


class ZeroDenominator(SiteTwinError):
    pass


class ZeroCpi(SiteTwinError):
    pass


class DegenerateEvidence(SiteTwinError):
    pass


class MissingPosterior(SiteTwinError):
    pass


class MissingWagePair(SiteTwinError):
    pass


class ItemUniverseMismatch(SiteTwinError):
    pass


class InfeasibleInstance(SiteTwinError):
    pass


class DuplicateDecision(SiteTwinError):
    pass


class AcyclicityViolation(SiteTwinError):
    pass


class UnknownTarget(SiteTwinError):
    pass


class MalformedPattern(SiteTwinError):
    pass


class SchemaError(SiteTwinError):
    """Project file fails schema validation; names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
