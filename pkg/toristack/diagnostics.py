from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """A single failed validation check."""

    code: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    """
    Itemized outcome of a validation pass.

    ``diagnostics`` lists failed checks; ``notes`` records facts that do not
    fail validation (e.g. a completeness assertion supplied by the user).
    """

    subject: str
    diagnostics: tuple[Diagnostic, ...] = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def codes(self) -> set[str]:
        return {diagnostic.code for diagnostic in self.diagnostics}
