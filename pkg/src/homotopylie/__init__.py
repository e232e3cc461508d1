"""homotopylie: exact computational homotopy Lie algebra toolkit."""

from .scalars import QQ, QQi, FloatComplexField, GaussianRational, get_field
from .graded import GradedSpace, GradedMap, ChainComplex
from .multilinear import MultiLinearOp, to_shifted, to_unshifted
from .linfty import LInftyAlgebra, LInftyMorphism, Twist

__all__ = [
    "QQ",
    "QQi",
    "FloatComplexField",
    "GaussianRational",
    "get_field",
    "GradedSpace",
    "GradedMap",
    "ChainComplex",
    "MultiLinearOp",
    "to_shifted",
    "to_unshifted",
    "LInftyAlgebra",
    "LInftyMorphism",
    "Twist",
]

__version__ = "0.1.0"
