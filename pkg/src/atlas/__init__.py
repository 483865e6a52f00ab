"""atlas: exact computations for P1-bundles over ruled surfaces above an elliptic curve."""

from .field_tower import CurveSpec, CurvePoint, INFINITY, RationalFunction, FunctionFieldElement

__version__ = "0.1.0"

__all__ = ["CurveSpec", "CurvePoint", "INFINITY", "RationalFunction", "FunctionFieldElement"]
