"""Exception types shared across the package."""


class TwistlabError(Exception):
    """Base class for all errors raised by twistlab."""


class InputError(TwistlabError):
    """Malformed or inconsistent input."""


class BasisMismatch(InputError):
    pass


class NotAnAutomorphism(InputError):
    pass


class EdgeImageCollapses(InputError):
    pass


class NotAForest(InputError):
    pass


class NotInvariant(InputError):
    pass


class PreconditionFailed(InputError):
    pass


class ClassNotInvariant(PreconditionFailed):
    pass


class DuplicateINP(InputError):
    """Two independent indivisible Nielsen paths were found at one height."""


class NotGoodRepresentative(InputError):
    pass


class MalformedIncidence(InputError):
    pass


class ScopeError(TwistlabError):
    """The input is valid but outside what the library handles."""


class ExponentialStratum(ScopeError):
    def __init__(self, index, edges, matrix):
        self.index = index
        self.edges = tuple(edges)
        self.matrix = tuple(tuple(r) for r in matrix)
        rows = ",".join("[" + ",".join(str(x) for x in r) + "]" for r in self.matrix)
        super().__init__(
            f"exponential stratum {index}: edges {' '.join(self.edges)}; "
            f"transition matrix [{rows}]"
        )


class NotMaximalRank(ScopeError):
    pass


class BoundExhausted(TwistlabError):
    """A bounded search finished without a certificate either way."""

    def __init__(self, what, bound):
        self.what = what
        self.bound = bound
        super().__init__(f"bound exhausted ({what}, bound={bound})")
