"""Exception types shared across the package.

Every error carries an optional structured ``witness`` so callers can
surface the offending element, pair, or triple without re-deriving it.
"""
from __future__ import annotations


class TritoposError(Exception):
    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


# lattice and algebra construction
class NotAPoset(TritoposError):
    pass


class NotALattice(TritoposError):
    pass


class NoResiduation(TritoposError):
    pass


class UnknownElement(TritoposError):
    pass


# predicates and indexed operations
class BaseMismatch(TritoposError):
    pass


class BoundExceeded(TritoposError):
    pass


# relations and morphisms
class CarrierMismatch(TritoposError):
    pass


class NotComposable(TritoposError):
    pass


class ShapeMismatch(TritoposError):
    pass


class InvalidResult(TritoposError):
    pass


class NotMono(TritoposError):
    pass


# hom enumeration
class HomBoundExceeded(TritoposError):
    pass


class InfiniteHom(HomBoundExceeded):
    pass


# exact completion machinery
class NotExactInstance(TritoposError):
    pass


class NotFinitelyContinuous(TritoposError):
    pass


class NoRepresentation(TritoposError):
    pass


class ResolutionUnavailable(TritoposError):
    pass


# file formats
class ParseError(TritoposError):
    pass


class ValidationError(TritoposError):
    pass
