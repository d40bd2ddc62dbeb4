"""
Errors raised by the toristack pipeline.

Every error carries a human readable ``detail`` and a stable ``code``, the
same pairing DRF uses for its API exceptions, so callers (and the
management command) can branch on the code without parsing messages.
"""


class ToristackError(Exception):
    """Base class for all toristack errors."""

    default_detail = "Toric stack computation failed."
    default_code = "error"

    def __init__(self, detail: str | None = None, code: str | None = None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


class NonFiniteCokernel(ToristackError):
    default_detail = (
        "The map has infinite cokernel; the rays do not span the lattice "
        "rationally (the fan has torus factors)."
    )
    default_code = "non_finite_cokernel"


class DegeneratePolytope(ToristackError):
    default_detail = "The polytope is empty, unbounded or lower dimensional."
    default_code = "degenerate_polytope"


class NonSimpleVertex(ToristackError):
    default_detail = "A vertex lies on more facets than the dimension."
    default_code = "non_simple_vertex"


class TooManyRays(ToristackError):
    default_detail = "Too many rays for exhaustive pattern enumeration."
    default_code = "too_many_rays"


class NotMaximalCone(ToristackError):
    default_detail = "The given ray set is not a maximal cone of the fan."
    default_code = "not_maximal_cone"


class PipelineError(ToristackError):
    """An upstream error, annotated with the pipeline stage it stopped."""

    default_code = "pipeline_error"

    def __init__(self, stage: str, error: ToristackError):
        self.stage = stage
        self.error = error
        super().__init__(
            detail=f"Stage '{stage}' failed: {error.detail}",
            code=error.code,
        )


class InputError(ToristackError):
    """Base class for problems with an input document."""

    default_detail = "Invalid input document."
    default_code = "invalid_input"


class ParseError(InputError):
    default_detail = "Malformed input document."
    default_code = "parse_error"

    def __init__(
        self,
        detail: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.line = line
        self.column = column
        if detail is not None and line is not None:
            detail = f"{detail} (line {line}, column {column})"
        super().__init__(detail=detail)


class SchemaError(InputError):
    default_detail = "The input document does not match the schema."
    default_code = "schema_error"

    def __init__(self, detail: str | None = None, errors=None):
        self.errors = errors or {}
        super().__init__(detail=detail)


class ExactnessError(InputError):
    default_detail = (
        "Floating-point values are not accepted; write rationals as "
        '"p/q" strings.'
    )
    default_code = "inexact_number"

    def __init__(
        self,
        detail: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.line = line
        self.column = column
        if detail is not None and line is not None:
            detail = f"{detail} (line {line}, column {column})"
        super().__init__(detail=detail)


class ValidationFailed(ToristackError):
    """Raised when a pipeline needs data that failed validation."""

    default_detail = "The input failed validation."
    default_code = "validation_failed"

    def __init__(self, report):
        self.report = report
        super().__init__(
            detail="; ".join(str(d) for d in report.diagnostics)
            or self.default_detail
        )


class MissingLevelData(ToristackError):
    default_detail = (
        "The stacky fan carries no support numbers (eta), so no moment "
        "map level can be formed."
    )
    default_code = "missing_level_data"
