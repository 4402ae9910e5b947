"""Exception types raised across the package."""


class PlabError(Exception):
    """Base class for all package errors."""


class InputError(PlabError, ValueError):
    """Malformed or inconsistent user input."""


class DimensionMismatch(InputError):
    pass


class AntisymmetryViolation(InputError):
    pass


class NotAntisymmetric(InputError):
    pass


class NonConvergence(PlabError, ArithmeticError):
    pass


class MixedDimensions(InputError):
    pass


class JacobianIllConditioned(PlabError):
    pass


class NoFit(PlabError):
    pass


class DimensionDrop(PlabError):
    """A Dirac image lost dimension (the input maps are not clean)."""


class NotGraph(PlabError):
    """A Dirac space is not the graph of a bivector (or two-form).

    ``intersection_dim`` is the dimension of the intersection with the
    obstructing summand.
    """

    def __init__(self, intersection_dim, message=None):
        self.intersection_dim = int(intersection_dim)
        super().__init__(message or f"not a graph: intersection dimension {intersection_dim}")


class NotTransversal(PlabError):
    def __init__(self, min_singular_value, message=None):
        self.min_singular_value = float(min_singular_value)
        super().__init__(message or f"not a Poisson transversal (min singular value {min_singular_value:.3e})")


class PointNotOnX(InputError):
    pass


class MixedBlockNonzero(PlabError):
    pass


class SingularBase(PlabError):
    pass


class NotMorphism(InputError):
    pass


class PreimageNotTransversal(PlabError):
    def __init__(self, min_singular_value):
        self.min_singular_value = float(min_singular_value)
        super().__init__(f"preimage is not a Poisson transversal (min singular value {min_singular_value:.3e})")


class EmptyPreimage(PlabError):
    pass


class NotInAdjointImage(PlabError):
    pass


class NotComposable(PlabError):
    pass


class NotMember(PlabError):
    pass


class BlockDimensionMismatch(InputError):
    pass


class NotFrobenius(InputError):
    pass


class SingularIsotropy(PlabError):
    pass
