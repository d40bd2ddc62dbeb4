import re

import sympy
from rest_framework import serializers

from .exactalg import IntMatrix
from .fan import ZeroPattern

INTEGER = re.compile(r"^[+-]?\d+$")
RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+(\.\d*)?[eE][+-]?\d+)$")

COMMANDS = ["validate", "fan", "groups", "charts", "isotropy", "moment", "certify"]


class StrictIntegerField(serializers.IntegerField):
    """An integer that refuses floats and decimal strings."""

    default_error_messages = {
        "inexact": "Floating-point value {value} is not allowed here.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, float):
            self.fail("inexact", value=data)
        if isinstance(data, str):
            if DECIMAL.match(data.strip()):
                self.fail("inexact", value=data)
            if not INTEGER.match(data.strip()):
                self.fail("invalid")
        return super().to_internal_value(data)


class RationalField(serializers.Field):
    """
    An exact rational: a JSON integer or a ``"p/q"`` string.

    Floats and decimal strings fail with the ``inexact`` code.
    """

    default_error_messages = {
        "invalid": 'Expected an integer or a "p/q" string.',
        "inexact": (
            'Floating-point value {value} is not allowed; write it as "p/q".'
        ),
        "zero_denominator": "Denominator of {value} is zero.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, int):
            return sympy.Rational(data)
        if isinstance(data, float):
            self.fail("inexact", value=data)
        if isinstance(data, str):
            text = data.strip()
            if RATIONAL.match(text):
                numerator, _, denominator = text.partition("/")
                if denominator and int(denominator) == 0:
                    self.fail("zero_denominator", value=data)
                return sympy.Rational(int(numerator), int(denominator or 1))
            if DECIMAL.match(text):
                self.fail("inexact", value=data)
        self.fail("invalid")

    def to_representation(self, value):
        return str(sympy.Rational(value))


class IntMatrixField(serializers.Field):
    def to_internal_value(self, data):
        try:
            return IntMatrix.from_rows(data, cols=len(data[0]) if data else 0)
        except (TypeError, ValueError, IndexError) as exc:
            raise serializers.ValidationError(str(exc)) from exc

    def to_representation(self, value):
        return value.to_rows()


class PatternField(serializers.Field):
    """A zero-pattern as a sorted list of 1-based indices."""

    def to_internal_value(self, data):
        if not isinstance(data, list) or not all(
            isinstance(i, int) and i >= 1 for i in data
        ):
            raise serializers.ValidationError("Expected 1-based indices.")
        return ZeroPattern.from_one_based(data)

    def to_representation(self, value):
        return value.one_based()


class ConeField(serializers.Field):
    def to_internal_value(self, data):
        return frozenset(index - 1 for index in data)

    def to_representation(self, value):
        return [index + 1 for index in sorted(value)]


# Input documents


class FacetSerializer(serializers.Serializer):
    normal = serializers.ListField(child=StrictIntegerField(), allow_empty=False)
    eta = RationalField()
    label = StrictIntegerField(min_value=1, default=1)


class InputDocumentSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["polytope", "stacky_fan"])
    name = serializers.CharField(required=False)
    dim = StrictIntegerField(min_value=1)
    facets = FacetSerializer(many=True, required=False)
    rays = serializers.ListField(
        child=serializers.ListField(child=StrictIntegerField()),
        required=False,
    )
    max_cones = serializers.ListField(
        child=serializers.ListField(
            child=StrictIntegerField(min_value=1), allow_empty=False
        ),
        required=False,
    )
    labels = serializers.ListField(
        child=StrictIntegerField(min_value=1), required=False
    )
    eta = serializers.ListField(child=RationalField(), required=False)

    FAN_ONLY = ("rays", "max_cones", "labels", "eta")

    def validate(self, attrs):
        errors = {}
        dim = attrs["dim"]
        if attrs["kind"] == "polytope":
            for name in self.FAN_ONLY:
                if name in attrs:
                    errors[name] = ["Not allowed for kind 'polytope'."]
            facets = attrs.get("facets")
            if not facets:
                errors["facets"] = ["A polytope needs at least one facet."]
            else:
                wrong = [
                    str(i)
                    for i, facet in enumerate(facets, start=1)
                    if len(facet["normal"]) != dim
                ]
                if wrong:
                    errors["facets"] = [
                        f"Normals {', '.join(wrong)} do not have {dim} entries."
                    ]
        else:
            if "facets" in attrs:
                errors["facets"] = ["Not allowed for kind 'stacky_fan'."]
            rays = attrs.get("rays")
            cones = attrs.get("max_cones")
            if not rays:
                errors["rays"] = ["A stacky fan needs at least one ray."]
            elif any(len(ray) != dim for ray in rays):
                errors["rays"] = [f"Every ray must have {dim} entries."]
            if not cones:
                errors["max_cones"] = ["A stacky fan needs maximal cones."]
            elif rays and any(i > len(rays) for cone in cones for i in cone):
                errors["max_cones"] = [
                    f"Cone indices must lie in 1..{len(rays)}."
                ]
            for name in ("labels", "eta"):
                if rays and name in attrs and len(attrs[name]) != len(rays):
                    errors[name] = [f"Expected {len(rays)} entries."]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


# Library results


class FinAbGroupSerializer(serializers.Serializer):
    free_rank = serializers.IntegerField()
    torsion = serializers.ListField(child=serializers.IntegerField())
    order = serializers.IntegerField(allow_null=True)
    notation = serializers.CharField(source="__str__")


class CokernelSerializer(serializers.Serializer):
    group = FinAbGroupSerializer()
    projection = IntMatrixField()


class DiagnosticSerializer(serializers.Serializer):
    code = serializers.CharField()
    message = serializers.CharField()


class ValidationReportSerializer(serializers.Serializer):
    subject = serializers.CharField()
    ok = serializers.BooleanField()
    diagnostics = DiagnosticSerializer(many=True)
    notes = serializers.ListField(child=serializers.CharField())


class VertexSerializer(serializers.Serializer):
    point = serializers.ListField(child=RationalField())
    active_facets = ConeField()


class FanSerializer(serializers.Serializer):
    dim = serializers.IntegerField()
    rays = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField())
    )
    max_cones = serializers.ListField(child=ConeField())


class StackyFanSerializer(serializers.Serializer):
    fan = FanSerializer()
    labels = serializers.ListField(child=serializers.IntegerField())
    eta = serializers.ListField(child=RationalField(), allow_null=True)
    beta = IntMatrixField()


class PresentationSerializer(serializers.Serializer):
    flavor = serializers.CharField()
    ambient_rank = serializers.IntegerField()
    free_rank = serializers.IntegerField()
    torsion = serializers.ListField(child=serializers.IntegerField())
    exponents = IntMatrixField()
    group = FinAbGroupSerializer()
    embedding = serializers.CharField(source="describe")
    injective = serializers.BooleanField(source="is_injective")


class LocalChartSerializer(serializers.Serializer):
    cone = ConeField()
    beta_sigma = IntMatrixField()
    chart_group = FinAbGroupSerializer()
    order = serializers.IntegerField()


class IsotropySerializer(serializers.Serializer):
    pattern = PatternField()
    group = FinAbGroupSerializer()
    admissible = serializers.BooleanField(allow_null=True)


class FeasibilitySerializer(serializers.Serializer):
    pattern = PatternField()
    feasible = serializers.BooleanField()
    strict = serializers.BooleanField()
    witness = serializers.ListField(child=RationalField(), allow_null=True)
    certificate = serializers.ListField(child=RationalField(), allow_null=True)


class PatternCheckSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    offending = PatternField(allow_null=True)
    evidence = FeasibilitySerializer(many=True)


class MomentSerializer(serializers.Serializer):
    convention = serializers.CharField()
    iota_star = IntMatrixField()
    xi = serializers.ListField(child=RationalField())
    annotation = serializers.CharField(allow_null=True)


class JacobianEvidenceSerializer(serializers.Serializer):
    pattern = PatternField()
    witness = serializers.ListField(child=RationalField(), allow_null=True)
    jacobian = serializers.ListField(
        child=serializers.ListField(child=RationalField()), allow_null=True
    )
    determinant = RationalField(allow_null=True)


class M1PrimeSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    offending = PatternField(allow_null=True)
    evidence = JacobianEvidenceSerializer(many=True)


class SplittingSerializer(serializers.Serializer):
    free_rank = serializers.IntegerField()
    torsion = serializers.ListField(child=serializers.IntegerField())
    scaling_exponents = IntMatrixField()
    consistent = serializers.BooleanField()


class IsotropyMatchSerializer(serializers.Serializer):
    pattern = PatternField()
    symplectic = FinAbGroupSerializer()
    complex = FinAbGroupSerializer()
    match = serializers.BooleanField()


class CertificateSerializer(serializers.Serializer):
    verdict = serializers.BooleanField()
    splitting = SplittingSerializer()
    mu_independent = serializers.BooleanField()
    moment = MomentSerializer()
    regular_value = PatternCheckSerializer()
    level_in_V = PatternCheckSerializer()
    m1_prime = M1PrimeSerializer()
    m2 = PatternCheckSerializer()
    isotropy_table = IsotropyMatchSerializer(many=True)
    evidence_verified = serializers.BooleanField()
    remarks = serializers.ListField(child=serializers.CharField())


# Machine reports


class ReportSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=COMMANDS)
    passed = serializers.BooleanField()
    input = serializers.JSONField()
    sections = serializers.JSONField()
    notes = serializers.ListField(child=serializers.CharField(), allow_empty=True)
