"""Exception hierarchy.

Three families matter to callers (and to the CLI exit-code contract):
input/parse problems, violated preconditions, and numeric non-convergence.
"""


class SmoothwalkError(Exception):
    """Base class for all package errors."""


class ParseError(SmoothwalkError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class PreconditionError(SmoothwalkError):
    """A stated precondition of an operation does not hold."""


class ConvergenceError(SmoothwalkError):
    """An iterative computation failed to converge within its budget."""


# -- graph construction -------------------------------------------------------

class IndexOutOfRange(PreconditionError):
    pass


class DuplicateEdge(PreconditionError):
    pass


class AlreadyAugmented(PreconditionError):
    pass


class MissingParameter(PreconditionError):
    pass


# -- operator construction ----------------------------------------------------

class IsolatedNode(PreconditionError):
    def __init__(self, node: int):
        self.node = node
        super().__init__(f"node {node} has degree 0")


class MissingSelfLoops(PreconditionError):
    pass


class GammaOutOfRange(PreconditionError):
    pass


class BetaNotPositive(PreconditionError):
    pass


class MissingLogit(PreconditionError):
    def __init__(self, u: int, v: int):
        self.pair = (u, v)
        super().__init__(f"no logit supplied for directed edge ({u}, {v})")


class DimensionMismatch(PreconditionError):
    pass


# -- chain analysis -----------------------------------------------------------

class Disconnected(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class NotStationary(PreconditionError):
    pass


class HypothesisViolated(PreconditionError):
    pass


class NotConverged(ConvergenceError):
    def __init__(self, max_iter: int):
        self.max_iter = max_iter
        super().__init__(f"no fixed point after {max_iter} iterations")


class NotMixedBy(ConvergenceError):
    def __init__(self, t_max: int):
        self.t_max = t_max
        super().__init__(f"d(t) did not reach the target by t={t_max}")


class Diverged(ConvergenceError):
    pass


# -- measurement / training ---------------------------------------------------

class TooShort(PreconditionError):
    pass


class TooFewSamples(PreconditionError):
    pass


class TooFewNodes(PreconditionError):
    pass


class ThresholdOutOfRange(PreconditionError):
    pass


class NoLabels(PreconditionError):
    pass
