"""Exception hierarchy shared by all circle_patterns modules."""

from __future__ import annotations


class CirclePatternError(Exception):
    """Base class for every error raised by this package."""


class MeshError(CirclePatternError, ValueError):
    """The face list does not describe an oriented triangulated disk."""


class InvalidFace(MeshError):
    pass


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class MultipleBoundaryComponents(MeshError):
    pass


class NotADisk(MeshError):
    pass


class DegenerateTriangle(CirclePatternError, ArithmeticError):
    """Side lengths violate the strict triangle inequality.

    ``face`` is the offending face index when the triangle came from a mesh.
    """

    def __init__(self, message: str, face: int | None = None):
        super().__init__(message)
        self.face = face


class DegenerateInitialState(CirclePatternError):
    """The starting radii already produce a non-constructible face."""


class SingularSystem(CirclePatternError, ArithmeticError):
    pass


class CgStalled(CirclePatternError):
    """Conjugate gradient hit its iteration cap above tolerance."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class ParseError(CirclePatternError, ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class ValidationError(CirclePatternError, ValueError):
    """Aggregates every mesh or weight violation found in one input."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid problem:\n  " + "\n  ".join(self.violations))
