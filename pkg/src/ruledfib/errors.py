"""Exception hierarchy.

Every domain error raised by the library derives from :class:`RuledFibError`;
the CLI reports errors by class name.
"""


class RuledFibError(Exception):
    """Base class for all library errors."""


# finite fields
class NonPrime(RuledFibError, ValueError):
    pass


class DegreeOutOfRange(RuledFibError, ValueError):
    pass


class DivisionByZero(RuledFibError, ZeroDivisionError):
    pass


class MixedFields(RuledFibError, TypeError):
    pass


# curves and isogenies
class SingularCurve(RuledFibError, ValueError):
    pass


class MixedCurves(RuledFibError, TypeError):
    pass


class CharZero(RuledFibError, ValueError):
    pass


class IrrationalKernel(RuledFibError, ValueError):
    pass


class OrderOne(RuledFibError, ValueError):
    pass


class NeedsFieldExtension(RuledFibError):
    """Some required point is not rational over the working field.

    ``degree`` is the smallest extension degree (relative to the working field)
    over which the search succeeded, or ``None`` if nothing was found within
    the search bound.
    """

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


# bundles
class UnknownOrder(RuledFibError, ValueError):
    pass


class UnsupportedShape(RuledFibError, ValueError):
    pass


class UnsupportedExponent(RuledFibError, ValueError):
    pass


class RuleHypothesisUnmet(RuledFibError, ValueError):
    def __init__(self, rule, hypothesis):
        super().__init__(f"{rule}: hypothesis not met: {hypothesis}")
        self.rule = rule
        self.hypothesis = hypothesis


class UnsupportedDegree(RuledFibError, ValueError):
    pass


class InfiniteOrder(RuledFibError, ValueError):
    pass


# lattice / fibers
class MixedSurfaces(RuledFibError, ValueError):
    pass


class OutOfScope(RuledFibError, ValueError):
    pass


class EmptyInput(RuledFibError, ValueError):
    pass


class MixedMultiplicities(RuledFibError, ValueError):
    pass


# cocycles
class ExponentOutOfRange(RuledFibError, ValueError):
    pass


# covers / classifier
class InseparableInput(RuledFibError, ValueError):
    pass


class UnsupportedCase(RuledFibError, ValueError):
    pass


class UnreachableOverField(RuledFibError):
    """A symbolic requirement cannot be realised over a finite field.

    ``result`` carries the symbolic-mode answer when one exists.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InvalidInput(RuledFibError, ValueError):
    pass
