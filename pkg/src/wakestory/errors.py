"""Exception hierarchy shared across the pipeline.

Grouping matters for the CLI exit-code contract: I/O problems exit 1,
anything under ValidationError exits 2, NoActors exits 3.
"""

from __future__ import annotations


class WakestoryError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(WakestoryError):
    """Input data or configuration rejected. CLI exit code 2."""


# --- CSV parsing -----------------------------------------------------------

class ParseError(ValidationError):
    pass


class BadEncoding(ParseError):
    pass


class MalformedHeader(ParseError):
    pass


class RowWidth(ParseError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} fields, got {got}")
        self.row = row


class EmptyId(ParseError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: empty id")
        self.row = row


class DuplicateId(ParseError):
    def __init__(self, id_: str):
        super().__init__(f"duplicate id {id_!r}")
        self.id = id_


class BadDate(ParseError):
    def __init__(self, row: int, value: str):
        super().__init__(f"row {row}: bad date {value!r} (expected YYYY-MM-DD)")
        self.row = row


class BadArm(ParseError):
    def __init__(self, row: int, value: str):
        super().__init__(f"row {row}: bad arm {value!r} (expected treatment or control)")
        self.row = row


class BadCoordinate(ParseError):
    def __init__(self, row: int, field: str, value: str):
        super().__init__(f"row {row}: bad {field} {value!r}")
        self.row = row
        self.field = field


class NonNumericCovariate(ParseError):
    def __init__(self, row: int, col: str, value: str):
        super().__init__(f"row {row}, column {col!r}: non-numeric covariate {value!r}")
        self.row = row
        self.col = col


# --- dataset / grid validation ---------------------------------------------

class NoTreatment(ValidationError):
    pass


class NoControl(ValidationError):
    pass


class NoDependent(ValidationError):
    pass


class OddHalfWidth(ValidationError):
    def __init__(self, value: int):
        super().__init__(f"half-width {value} must be a positive even integer")
        self.value = value


class SchemaMismatch(ValidationError):
    pass


class BadGrid(ValidationError):
    pass


# --- scenario configuration -------------------------------------------------

class ConfigError(ValidationError):
    pass


class UnknownConfigKey(ConfigError):
    def __init__(self, key: str):
        super().__init__(f"unknown scenario key {key!r}")
        self.key = key


class MissingThemeRole(ConfigError):
    def __init__(self, role: str):
        super().__init__(f"color theme is missing required role {role!r}")
        self.role = role


class UnresolvedPlaceholder(ConfigError):
    def __init__(self, name: str):
        super().__init__(f"unresolved placeholder {{{name}}}")
        self.name = name


# --- geo ---------------------------------------------------------------------

class RadiusExceedsIndex(WakestoryError):
    def __init__(self, r: float, r_max: float):
        super().__init__(f"query radius {r} km exceeds index maximum {r_max} km")


# --- actors ------------------------------------------------------------------

class NoActors(WakestoryError):
    """No treatment/control pair passes the hard constraints. CLI exit code 3."""

    def __init__(self, report: dict):
        super().__init__("no admissible actor pair")
        self.report = report
