"""Structured errors. Every error carries a machine-readable witness dict."""

from __future__ import annotations


class WgcatError(Exception):
    def __init__(self, message: str = "", **witness):
        super().__init__(message or type(self).__name__)
        self.witness = witness

    def report(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), "witness": self.witness}


class SchemaError(WgcatError):
    pass


class DanglingId(WgcatError):
    pass


class MissingIdentity(WgcatError):
    pass


class IdentityLawViolation(WgcatError):
    pass


class AssociativityViolation(WgcatError):
    pass


class SegalNotIso(WgcatError):
    pass


class SimplicialIdentityViolation(WgcatError):
    pass


class NotHomotopicallyDiscrete(WgcatError):
    pass


class UnknownComponent(WgcatError):
    pass


class CodomainMismatch(WgcatError):
    pass


class NotTawg(WgcatError):
    pass


class NotLta(WgcatError):
    pass


class NotAnEquivalence(WgcatError):
    pass


class CocycleViolation(WgcatError):
    pass


class NonInvertibleCoherence(WgcatError):
    pass


class NormalizationViolation(WgcatError):
    pass


class TriangleIdentityViolation(WgcatError):
    pass


class InvalidPseudoFunctor(WgcatError):
    pass


class NotSurjective(WgcatError):
    pass


class InvalidChain(WgcatError):
    pass


class UnsupportedDimension(WgcatError):
    pass


class MaxCellsExceeded(WgcatError):
    pass
