class YinSetError(Exception):
    """Base class of every error raised by the Yin set tool chain."""

    exit_code = 3

    @property
    def kind(self):
        return type(self).__name__


# validation failures
class NotClosed(YinSetError):
    exit_code = 1

    def __init__(self, name, edges=()):
        self.name = name
        self.edges = list(edges)
        shown = ", ".join(f"({a},{b})" for a, b in self.edges[:8])
        more = "" if len(self.edges) <= 8 else f" (+{len(self.edges) - 8} more)"
        super().__init__(f"{name}: unpaired edges {shown}{more}")


class NotRealizable(YinSetError):
    exit_code = 1

    def __init__(self, violations):
        self.violations = list(violations) if not isinstance(violations, str) else [violations]
        super().__init__("; ".join(self.violations))


class DegenerateInput(YinSetError):
    exit_code = 1


class DegenerateGeometry(DegenerateInput):
    """A retriangulation produced a face below the area floor."""


class ConstraintOutsideTriangle(YinSetError):
    exit_code = 1


# parse / IO
class ParseError(YinSetError):
    exit_code = 2


class CannotSerialize(YinSetError):
    exit_code = 2


# internal failures of the algorithms
class InconsistentProvenance(YinSetError):
    pass


class ParallelDegeneracy(YinSetError):
    pass


class NoCandidate(YinSetError):
    pass


class AmbiguousTie(YinSetError):
    pass


class GluingStuck(YinSetError):
    pass


class WitnessOnBoundary(YinSetError):
    pass


class NotFound(YinSetError):
    pass


class RetryExhausted(YinSetError):
    pass


class InfiniteVolume(YinSetError):
    pass


class BlowUp(YinSetError):
    pass


class CannotRegularize(YinSetError):
    """Raised when a short edge cannot be collapsed without pinching the surface.

    `result` holds the element with every legal split/collapse applied.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class QualityUnreached(YinSetError):
    """Non-fatal: the angle target was not met within the iteration cap."""

    def __init__(self, message, result=None, stats=None):
        super().__init__(message)
        self.result = result
        self.stats = stats or {}
