"""Domain errors shared across the library.

Every error derives from SoiLabError and carries a stable machine-readable
``code`` ("<module>.<Name>") that the CLI emits on its diagnostic stream.
"""
from __future__ import annotations


class SoiLabError(Exception):
    """Base class for all domain errors raised by soi-lab."""

    code = "soi_lab.Error"


# --- dynamics: log parsing and run assembly ---

class MalformedLine(SoiLabError):
    code = "dynamics.MalformedLine"


class MissingField(SoiLabError):
    code = "dynamics.MissingField"


class FieldOutOfRange(SoiLabError):
    code = "dynamics.FieldOutOfRange"


class DuplicateCell(SoiLabError):
    code = "dynamics.DuplicateCell"


class MissingCell(SoiLabError):
    code = "dynamics.MissingCell"


class InconsistentTrueLabel(SoiLabError):
    code = "dynamics.InconsistentTrueLabel"


class EmptyRun(SoiLabError):
    code = "dynamics.EmptyRun"


class UnknownExample(SoiLabError):
    code = "dynamics.UnknownExample"


# --- soi: sequence classification ---

class EmptySequence(SoiLabError):
    code = "soi.EmptySequence"


class CutoffOutOfRange(SoiLabError):
    code = "soi.CutoffOutOfRange"


class MalformedAssignment(SoiLabError):
    """An exported category CSV could not be read back."""

    code = "soi.MalformedAssignment"


# --- cartography ---

class InvalidThresholds(SoiLabError):
    code = "cartography.InvalidThresholds"


class MissingTrueProbabilities(SoiLabError):
    code = "cartography.MissingTrueProbabilities"


# --- shared by cartography / transitions / selection ---

class ExampleSetMismatch(SoiLabError):
    code = "transitions.ExampleSetMismatch"


class EmptyIntersection(SoiLabError):
    code = "transitions.EmptyIntersection"


# --- toy lab ---

class InvalidSpec(SoiLabError):
    code = "toy.InvalidSpec"


class MissingHead(SoiLabError):
    code = "toy.MissingHead"


class NonfiniteLoss(SoiLabError):
    code = "toy.NonfiniteLoss"


class UnknownExampleId(SoiLabError):
    code = "toy.UnknownExampleId"


class InvalidConfig(SoiLabError):
    code = "toy.InvalidConfig"


# --- generic I/O ---

class IoFailure(SoiLabError):
    code = "soi_lab.IoFailure"
