"""
Input documents, pipeline commands and report rendering.

Machine reports are canonical JSON (sorted keys, exact rationals as
strings) rendered with DRF's ``JSONRenderer``; text reports go through the
``toristack/report.txt`` template.
"""

import json
import logging
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

from django.template.loader import render_to_string
from rest_framework.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer

from .diagnostics import ValidationReport
from .exactalg import dualize
from .exceptions import (
    ExactnessError,
    MissingLevelData,
    NonSimpleVertex,
    ParseError,
    PipelineError,
    SchemaError,
    ValidationFailed,
)
from .fan import (
    DEFAULT_COMPLETENESS_MAX_DIM,
    DEFAULT_MAX_RAYS,
    Fan,
    admissible_patterns,
    is_admissible,
    minimal_inadmissible_patterns,
    validate_fan,
)
from .momentred import (
    LevelConvention,
    check_regular_value,
    level_set_in_Cm,
    moment_data,
)
from .morita import certify, morita_certificate
from .polytope import (
    LabelledPolytope,
    enumerate_vertices,
    is_smooth,
    normal_fan,
    validate_polytope,
)
from .serializers import (
    COMMANDS,
    CertificateSerializer,
    CokernelSerializer,
    FinAbGroupSerializer,
    InputDocumentSerializer,
    IsotropySerializer,
    LocalChartSerializer,
    MomentSerializer,
    PatternCheckSerializer,
    PresentationSerializer,
    ReportSerializer,
    StackyFanSerializer,
    ValidationReportSerializer,
    VertexSerializer,
)
from .stackbuild import (
    IsotropyReport,
    StackyFan,
    build_H,
    build_kerbar,
    chart_extension,
    finite_extension,
    identity_component_extension,
    isotropy,
    local_chart,
)

logger = logging.getLogger(__name__)

# JSON strings are skipped so that "0.5" inside a string is not reported here
JSON_TOKEN = re.compile(r'"(?:\\.|[^"\\])*"|-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?')

LEVEL_NOTE = (
    "Rescaling xi by a positive constant rescales the level set without "
    "changing feasibility, regularity or isotropy."
)


@dataclass(frozen=True, eq=False)
class InputDocument:
    kind: str
    dim: int
    data: dict
    polytope: LabelledPolytope | None = None
    stacky_fan: StackyFan | None = None

    @property
    def name(self) -> str | None:
        return self.data.get("name")


@dataclass
class Report:
    command: str
    input: dict
    sections: dict
    passed: bool
    notes: list[str] = field(default_factory=list)

    def to_data(self) -> dict:
        return {
            "command": self.command,
            "passed": self.passed,
            "input": self.input,
            "sections": self.sections,
            "notes": list(self.notes),
        }


def _canonical(value):
    if isinstance(value, Mapping):
        return {str(key): _canonical(value[key]) for key in sorted(value)}
    if isinstance(value, list | tuple):
        return [_canonical(item) for item in value]
    return value


def _locate_inexact(text: str) -> tuple[int | None, int | None]:
    for match in JSON_TOKEN.finditer(text):
        token = match.group()
        if token.startswith('"') or not any(c in token for c in ".eE"):
            continue
        start = match.start()
        line = text.count("\n", 0, start) + 1
        column = start - text.rfind("\n", 0, start)
        return line, column
    return None, None


def _has_code(codes, code: str) -> bool:
    if isinstance(codes, Mapping):
        return any(_has_code(value, code) for value in codes.values())
    if isinstance(codes, list):
        return any(_has_code(value, code) for value in codes)
    return codes == code


def _summarize(errors, prefix: str = "") -> list[str]:
    if isinstance(errors, Mapping):
        return [
            line
            for key, value in errors.items()
            for line in _summarize(value, f"{prefix}{key}.")
        ]
    if isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            return [f"{prefix.rstrip('.')}: {item}" for item in errors]
        return [
            line
            for index, item in enumerate(errors)
            for line in _summarize(item, f"{prefix}{index}.")
        ]
    return [f"{prefix.rstrip('.')}: {errors}"]


def _build_document(validated: Mapping) -> InputDocument:
    data = _canonical(InputDocumentSerializer(validated).data)
    if validated["kind"] == "polytope":
        facets = validated["facets"]
        polytope = LabelledPolytope.from_data(
            normals=[facet["normal"] for facet in facets],
            eta=[facet["eta"] for facet in facets],
            labels=[facet["label"] for facet in facets],
            dim=validated["dim"],
        )
        return InputDocument("polytope", validated["dim"], data, polytope=polytope)

    fan = Fan(
        dim=validated["dim"],
        rays=tuple(tuple(ray) for ray in validated["rays"]),
        max_cones=tuple(
            frozenset(i - 1 for i in cone) for cone in validated["max_cones"]
        ),
    )
    stacky_fan = StackyFan.from_fan(
        fan, validated.get("labels"), validated.get("eta")
    )
    return InputDocument(
        "stacky_fan", validated["dim"], data, stacky_fan=stacky_fan
    )


def parse_input(text: str) -> InputDocument:
    """Parse and validate an input document, keeping every number exact."""
    if not text.strip():
        raise SchemaError("The document is empty.")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise SchemaError("The document must be a JSON object.")

    serializer = InputDocumentSerializer(data=data)
    try:
        serializer.is_valid(raise_exception=True)
    except ValidationError as exc:
        if _has_code(exc.get_codes(), "inexact"):
            line, column = _locate_inexact(text)
            raise ExactnessError(
                ExactnessError.default_detail, line=line, column=column
            ) from exc
        errors = serializer.errors
        raise SchemaError("; ".join(_summarize(errors)), errors=errors) from exc
    return _build_document(serializer.validated_data)


@dataclass
class _Context:
    document: InputDocument
    jobs: int
    convention: LevelConvention
    assume_complete: bool
    max_rays: int
    completeness_max_dim: int = DEFAULT_COMPLETENESS_MAX_DIM
    notes: list[str] = field(default_factory=list)

    def validate_fan(self, fan: Fan) -> ValidationReport:
        report = validate_fan(
            fan,
            assume_complete=self.assume_complete,
            completeness_max_dim=self.completeness_max_dim,
        )
        self.notes.extend(report.notes)
        return report

    def stacky_fan(self) -> StackyFan:
        polytope = self.document.polytope
        if polytope is not None:
            report = validate_polytope(polytope)
            if not report.ok:
                raise ValidationFailed(report)
            stacky_fan = normal_fan(polytope)
        else:
            stacky_fan = self.document.stacky_fan
        report = self.validate_fan(stacky_fan.fan)
        if not report.ok:
            raise ValidationFailed(report)
        return stacky_fan


def _validate(context: _Context) -> tuple[dict, bool]:
    sections = {}
    polytope = context.document.polytope
    if polytope is None:
        report = context.validate_fan(context.document.stacky_fan.fan)
        sections["fan"] = ValidationReportSerializer(report).data
        return sections, report.ok

    report = validate_polytope(polytope)
    sections["polytope"] = ValidationReportSerializer(report).data
    if not report.ok:
        return sections, False
    try:
        stacky_fan = normal_fan(polytope)
    except NonSimpleVertex as error:
        sections["fan"] = {
            "subject": "normal fan",
            "ok": False,
            "diagnostics": [{"code": error.code, "message": error.detail}],
            "notes": [],
        }
        return sections, False
    fan_report = context.validate_fan(stacky_fan.fan)
    sections["fan"] = ValidationReportSerializer(fan_report).data
    smooth, offending = is_smooth(polytope)
    sections["smoothness"] = {
        "smooth": smooth,
        "offending_vertices": VertexSerializer(offending, many=True).data,
    }
    return sections, fan_report.ok


def _fan(context: _Context) -> tuple[dict, bool]:
    stacky_fan = context.stacky_fan()
    fan = stacky_fan.fan
    sections = {
        "stacky_fan": StackyFanSerializer(stacky_fan).data,
        "admissible_patterns": [
            p.one_based()
            for p in admissible_patterns(fan, max_rays=context.max_rays)
        ],
        "minimal_inadmissible_patterns": [
            p.one_based()
            for p in minimal_inadmissible_patterns(fan, max_rays=context.max_rays)
        ],
    }
    polytope = context.document.polytope
    if polytope is not None:
        sections["vertices"] = VertexSerializer(
            enumerate_vertices(polytope), many=True
        ).data
        sections["smooth"] = is_smooth(polytope)[0]
    return sections, True


def _groups(context: _Context) -> tuple[dict, bool]:
    stacky_fan = context.stacky_fan()
    beta_star, beta_vee = dualize(stacky_fan.beta)
    algebraic = build_H(stacky_fan)
    compact = build_kerbar(stacky_fan)
    agree = algebraic.data() == compact.data()
    sections = {
        "beta_star": beta_star.to_rows(),
        "cokernel": CokernelSerializer(beta_vee).data,
        "H": PresentationSerializer(algebraic).data,
        "kerbar": PresentationSerializer(compact).data,
        "presentations_agree": agree,
        "finite_extension": FinAbGroupSerializer(
            finite_extension(stacky_fan)
        ).data,
        "identity_component_extension": FinAbGroupSerializer(
            identity_component_extension(stacky_fan)
        ).data,
    }
    return sections, agree and algebraic.is_injective()


def _charts(context: _Context) -> tuple[dict, bool]:
    stacky_fan = context.stacky_fan()
    charts = []
    passed = True
    for cone in sorted(stacky_fan.fan.max_cones, key=sorted):
        chart = local_chart(stacky_fan, cone)
        cyclic, labelled, primitive = chart_extension(stacky_fan, cone)
        consistent = (
            chart.order == chart.chart_group.order
            and chart.chart_group == labelled
            and labelled.order == cyclic.order * primitive.order
        )
        passed = passed and consistent
        charts.append(
            {
                **LocalChartSerializer(chart).data,
                "extension": {
                    "cyclic": FinAbGroupSerializer(cyclic).data,
                    "labelled": FinAbGroupSerializer(labelled).data,
                    "primitive": FinAbGroupSerializer(primitive).data,
                },
                "consistent": consistent,
            }
        )
    return {"charts": charts}, passed


def _isotropy(context: _Context) -> tuple[dict, bool]:
    stacky_fan = context.stacky_fan()
    fan = stacky_fan.fan
    algebraic = build_H(stacky_fan)
    patterns = admissible_patterns(
        fan, max_rays=context.max_rays
    ) + minimal_inadmissible_patterns(fan, max_rays=context.max_rays)
    table = [
        IsotropyReport(
            pattern=pattern,
            group=isotropy(algebraic, pattern).group,
            admissible=is_admissible(fan, pattern),
        )
        for pattern in patterns
    ]
    passed = all(entry.group.is_finite for entry in table if entry.admissible)
    return {"isotropy": IsotropySerializer(table, many=True).data}, passed


def _moment(context: _Context) -> tuple[dict, bool]:
    stacky_fan = context.stacky_fan()
    moment = moment_data(stacky_fan, context.convention)
    regular = check_regular_value(moment, stacky_fan.fan)
    inclusion = level_set_in_Cm(
        moment, stacky_fan.fan, max_rays=context.max_rays
    )
    context.notes.append(LEVEL_NOTE)
    sections = {
        "moment": MomentSerializer(moment).data,
        "regular_value": PatternCheckSerializer(regular).data,
        "level_in_V": PatternCheckSerializer(inclusion).data,
    }
    return sections, regular.passed and inclusion.passed


def _certify(context: _Context) -> tuple[dict, bool]:
    options = {
        "convention": context.convention,
        "jobs": context.jobs,
        "max_rays": context.max_rays,
        "assume_complete": context.assume_complete,
        "completeness_max_dim": context.completeness_max_dim,
    }
    # validates up front and records the completeness notes
    stacky_fan = context.stacky_fan()
    polytope = context.document.polytope
    if polytope is not None:
        certificate = morita_certificate(polytope, **options)
    else:
        certificate = certify(stacky_fan, **options)
    context.notes.append(LEVEL_NOTE)
    return (
        {"certificate": CertificateSerializer(certificate).data},
        certificate.verdict,
    )


HANDLERS: dict[str, Callable[[_Context], tuple[dict, bool]]] = {
    "validate": _validate,
    "fan": _fan,
    "groups": _groups,
    "charts": _charts,
    "isotropy": _isotropy,
    "moment": _moment,
    "certify": _certify,
}


def run_command(
    command: str,
    document: InputDocument,
    *,
    jobs: int = 1,
    convention: LevelConvention = LevelConvention.WEIGHTED,
    assume_complete: bool = False,
    max_rays: int = DEFAULT_MAX_RAYS,
    completeness_max_dim: int = DEFAULT_COMPLETENESS_MAX_DIM,
) -> Report:
    """Run one pipeline stage on a parsed document."""
    if command not in HANDLERS:
        raise ValueError(f"Unknown command {command!r}; expected one of {COMMANDS}.")
    context = _Context(
        document=document,
        jobs=jobs,
        convention=LevelConvention(convention),
        assume_complete=assume_complete,
        max_rays=max_rays,
        completeness_max_dim=completeness_max_dim,
    )
    try:
        sections, passed = HANDLERS[command](context)
    except MissingLevelData as error:
        raise SchemaError(error.detail) from error
    except PipelineError as error:
        if isinstance(error.error, MissingLevelData):
            raise SchemaError(error.error.detail) from error
        if isinstance(error.error, ValidationFailed):
            raise error.error from error
        raise
    logger.debug("Command %s finished: passed=%s", command, passed)
    return Report(
        command=command,
        input=document.data,
        sections=_canonical(sections),
        passed=passed,
        notes=list(dict.fromkeys(context.notes)),
    )


def render_json(report: Report | Mapping) -> str:
    data = report.to_data() if isinstance(report, Report) else report
    rendered = JSONRenderer().render(
        _canonical(data), renderer_context={"indent": 2}
    )
    return rendered.decode("utf-8") + "\n"


def parse_report(text: str) -> dict:
    """Read a machine report back into its canonical data."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    serializer = ReportSerializer(data=data)
    if not serializer.is_valid():
        raise SchemaError(
            "; ".join(_summarize(serializer.errors)), errors=serializer.errors
        )
    parse_input(json.dumps(serializer.validated_data["input"]))
    return _canonical(dict(serializer.validated_data))


def _format(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list):
        return "[" + ", ".join(_format(item) for item in value) + "]"
    return str(value)


def _inline(value) -> bool:
    if isinstance(value, Mapping):
        return False
    if isinstance(value, list):
        return all(_inline(item) for item in value)
    return True


def _text_lines(value, depth: int = 0) -> list[str]:
    pad = "  " * depth
    lines = []
    if isinstance(value, Mapping):
        for key, item in value.items():
            if _inline(item):
                lines.append(f"{pad}{key}: {_format(item)}")
            else:
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(item, depth + 1))
    elif isinstance(value, list):
        for item in value:
            if _inline(item):
                lines.append(f"{pad}- {_format(item)}")
            else:
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, depth + 1))
    else:
        lines.append(f"{pad}{_format(value)}")
    return lines


def render_text(report: Report) -> str:
    sections = [
        {"title": name, "lines": _text_lines(content)}
        for name, content in report.sections.items()
    ]
    return render_to_string(
        "toristack/report.txt",
        {
            "command": report.command,
            "name": report.input.get("name", report.input.get("kind")),
            "passed": report.passed,
            "sections": sections,
            "notes": report.notes,
        },
    )
