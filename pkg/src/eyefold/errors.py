"""Exception types shared across the toolkit.

Plain file-system failures use the builtin ``FileNotFoundError`` / ``OSError``;
everything listed here signals a domain-level problem.
"""

from __future__ import annotations


class EyefoldError(Exception):
    """Base class for all toolkit-specific errors."""


class MalformedLine(EyefoldError, ValueError):
    """An OBJ record that could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class NonTriangleFace(EyefoldError, ValueError):
    """A face record with more than three vertices."""

    def __init__(self, line_no: int, arity: int):
        self.line_no = line_no
        self.arity = arity
        super().__init__(f"line {line_no}: face has {arity} vertices, only triangles are supported")


class SchemaError(EyefoldError, ValueError):
    """A descriptor or manifest document is structurally invalid."""


class InvariantViolation(EyefoldError, ValueError):
    """A data-model invariant does not hold."""


class CountMismatch(EyefoldError, ValueError):
    """Two objects that must share a vertex count do not."""

    def __init__(self, expected: int, actual: int, what: str = "vertex count"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} mismatch: expected {expected}, got {actual}")


class DomainError(EyefoldError, ValueError):
    """A parameter is outside its documented domain."""


class IndexOutOfRange(EyefoldError, IndexError):
    """A vertex index refers outside the mesh."""


class TopologyError(EyefoldError, ValueError):
    """Mesh connectivity does not support the requested operation."""


class DegenerateCurve(EyefoldError, ValueError):
    """A polyline with zero total arc length."""


class DegenerateFrame(EyefoldError, ValueError):
    """The brow-to-margin span vanishes at some eyelid sample."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"brow-to-margin span is degenerate at t={t:g}")


class SampleMismatch(EyefoldError, ValueError):
    """Two profiles or stats tables were sampled on different grids."""


class EmptyInput(EyefoldError, ValueError):
    """An aggregate operation received no data."""


class MissingMetadata(EyefoldError, KeyError):
    """An error entry has no metadata record."""

    def __init__(self, mesh_id: str):
        self.mesh_id = mesh_id
        super().__init__(f"no metadata for mesh id {mesh_id!r}")


class DegenerateData(EyefoldError, ValueError):
    """Input data has no spread where spread is required."""


class UnknownScan(EyefoldError, KeyError):
    """A scan id that is not in the manifest."""

    def __init__(self, scan_id: str):
        self.scan_id = scan_id
        super().__init__(f"unknown scan id {scan_id!r}")


class NoAnnotation(EyefoldError, LookupError):
    """A scan that has not been annotated yet."""

    def __init__(self, scan_id: str):
        self.scan_id = scan_id
        super().__init__(f"scan {scan_id!r} has no annotation")
