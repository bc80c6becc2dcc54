"""Exception hierarchy shared across the workbench."""


class EuarchError(Exception):
    """Base class for all workbench errors."""


# -- style resolution ---------------------------------------------------------

class CyclicInheritance(EuarchError):
    pass


class MissingParent(EuarchError):
    pass


class ConflictingDecl(EuarchError):
    pass


# -- instantiation / model construction --------------------------------------

class UnknownType(EuarchError):
    pass


class DuplicateId(EuarchError):
    pass


class BadAttachment(EuarchError):
    pass


class UnknownFormat(EuarchError):
    pass


# -- composites ---------------------------------------------------------------

class UnboundParam(EuarchError):
    pass


class BadPortMap(EuarchError):
    pass


class UnboundActual(EuarchError):
    pass


class RecursiveComposite(EuarchError):
    pass


# -- analyses -----------------------------------------------------------------

class WrongStyleFamily(EuarchError):
    pass


class MissingCostEntry(EuarchError):
    pass


class NoRepairPath(EuarchError):
    pass


class InconsistentSpec(EuarchError):
    pass


# -- constraint language ------------------------------------------------------

class ConstraintTypeError(EuarchError):
    """Raised while type-checking a constraint expression, never at eval time."""


# -- compiler -----------------------------------------------------------------

class UnboundAdapter(EuarchError):
    pass


class NotADag(EuarchError):
    pass


# -- executor -----------------------------------------------------------------

class Forbidden(EuarchError):
    pass


class StepFailed(EuarchError):
    pass


class NoEligibleStep(EuarchError):
    pass


class MissingArtifact(EuarchError):
    pass


class UnknownOperation(EuarchError):
    pass


# -- repository ---------------------------------------------------------------

class UnknownCategory(EuarchError):
    pass


class InvalidDecl(EuarchError):
    pass
