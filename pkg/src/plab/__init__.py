"""Numerical verification of normal forms around Poisson transversals in
duals of Lie algebras."""

from importlib import resources

from .algebra import CATALOG, LieAlgebra, LinearSubspace, ad_matrix, annihilator, coad_exp, jacobiator, xi_operator
from .dirac import DiracSpace
from .errors import PlabError
from .report import VerificationReport
from .transversal import AffineTransversal, transversal

__version__ = "0.1.0"


def data_path(*parts):
    """Path of a shipped fixture, e.g. ``data_path("algebras", "so3.json")``."""
    return resources.files(__name__).joinpath("data", *parts)


__all__ = [
    "CATALOG",
    "AffineTransversal",
    "DiracSpace",
    "LieAlgebra",
    "LinearSubspace",
    "PlabError",
    "VerificationReport",
    "ad_matrix",
    "annihilator",
    "coad_exp",
    "data_path",
    "jacobiator",
    "transversal",
    "xi_operator",
]
