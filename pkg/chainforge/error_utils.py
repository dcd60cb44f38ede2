"""
@file: error_utils.py
@time: 2026/10/17 10:50
@desc: chainforge exception hierarchy
"""


class ChainforgeError(Exception):
    """Base error of the package"""


class ChainSpecError(ChainforgeError):
    """Malformed chain: lengths disagree or values are not finite"""


class ReducibleChainError(ChainSpecError):
    """A coupling is zero, so the chain splits in two"""


class SymmetryError(ChainforgeError):
    """The operation needs a mirror-symmetric chain"""


class IllPosedTargetError(ChainforgeError):
    """A target is a root of both Q_B and P_B"""

    def __init__(self, message, node=None):
        super(IllPosedTargetError, self).__init__(message)
        self.node = node


class DegenerateSystemError(ChainforgeError):
    """Rank-deficient interpolation constraints"""

    def __init__(self, message, condition=None):
        super(DegenerateSystemError, self).__init__(message)
        self.condition = condition


class UnattainablePointError(ChainforgeError):
    """Interpolation points where numerator and denominator both vanish"""

    def __init__(self, message, nodes=()):
        super(UnattainablePointError, self).__init__(message)
        self.nodes = list(nodes)


class InfeasibleExtensionError(ChainforgeError):
    """No Jacobi matrix realises the requested rational function"""


class VerificationError(ChainforgeError):
    """The assembled chain misses a target eigenvalue"""

    def __init__(self, message, report=None):
        super(VerificationError, self).__init__(message)
        self.report = report


class EmptyRegionError(ChainforgeError):
    """A region of the partition has no sites"""


class EmptyNullSpaceError(ChainforgeError):
    """No encoding avoids every violating eigenvector"""

    def __init__(self, message, smallest_singular_value=None):
        super(EmptyNullSpaceError, self).__init__(message)
        self.smallest_singular_value = smallest_singular_value


class InputFileError(ChainforgeError):
    """Unreadable or malformed input file"""

    def __init__(self, message, path=None, line=None, column=None):
        if line is not None:
            message = '{0}:{1}:{2}: {3}'.format(path, line, column, message)
        elif path is not None:
            message = '{0}: {1}'.format(path, message)
        super(InputFileError, self).__init__(message)
        self.path = path
        self.line = line
        self.column = column
