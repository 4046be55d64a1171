"""Exception hierarchy shared by every module.

Each error carries a stable machine code (defaults to the class name) and
the HTTP status the service layer maps it to. Anything that is not a
MeritError surfaces as a 500 with code "Internal".
"""

from __future__ import annotations


class MeritError(Exception):
    code = "Internal"
    http_status = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "code" not in cls.__dict__:
            cls.code = cls.__name__


# --- domain model ---

class UnknownResource(MeritError):
    http_status = 404


class UnknownParent(MeritError):
    http_status = 404


class KindMismatch(MeritError):
    http_status = 422


class CycleDetected(MeritError):
    http_status = 422


class UnknownOwner(MeritError):
    http_status = 404


class SchemaViolation(MeritError):
    http_status = 422


class YearOutOfRange(MeritError):
    http_status = 422


class IllegalTransition(MeritError):
    http_status = 409


class MissingEvidence(MeritError):
    http_status = 422


class UnknownAchievement(MeritError):
    http_status = 404


class UnknownAttribute(MeritError):
    http_status = 422


class UnknownIndicator(MeritError):
    http_status = 404


class DuplicateId(MeritError):
    http_status = 409


class InvalidIdentifier(MeritError):
    http_status = 422


# --- value systems ---

class AllZeroWeights(MeritError):
    http_status = 422


class NegativeWeight(MeritError):
    http_status = 422


class EmptyInput(MeritError):
    http_status = 422


class LeaderHasNoPsv(MeritError):
    http_status = 422


class UnknownValueSystem(MeritError):
    http_status = 404


# --- ranking engine ---

class NonFiniteInput(MeritError):
    http_status = 422


class ResourceNotInPopulation(MeritError):
    http_status = 422


class PopulationMismatch(MeritError):
    http_status = 422


class InvalidPopulation(MeritError):
    http_status = 422


# --- league system ---

class SizeMismatch(MeritError):
    http_status = 422


class InvalidConfig(MeritError):
    http_status = 422


class LeaderPsvMissing(MeritError):
    http_status = 422


class InvalidGeneratorConfig(MeritError):
    http_status = 422


class LeagueNotInitialized(MeritError):
    http_status = 404


# --- query layer ---

class QuerySyntaxError(MeritError):
    code = "SyntaxError"
    http_status = 400

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownField(MeritError):
    http_status = 400


class UnknownKind(MeritError):
    http_status = 400


class NoValueSystem(MeritError):
    http_status = 422


class EmptyOptions(MeritError):
    http_status = 422


class UnknownOption(MeritError):
    http_status = 404


# --- store ---

class IoError(MeritError):
    http_status = 500


class HeaderMismatch(MeritError):
    http_status = 422


class DigestMismatch(MeritError):
    http_status = 500


class SchemaVersionUnsupported(MeritError):
    http_status = 500


class IntegrityViolation(MeritError):
    http_status = 500


class StoreLocked(MeritError):
    http_status = 423


# --- gateway ---

class ReadOnly(MeritError):
    code = "READ_ONLY"
    http_status = 403


class Unauthorized(MeritError):
    http_status = 401


class PortInUse(MeritError):
    http_status = 500
