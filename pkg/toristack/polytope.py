"""
Labelled rational polytopes Δ = {α : ⟨α, u_j⟩ ≥ −η_j} in H-representation.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations
from math import gcd

import sympy

from .diagnostics import Diagnostic, ValidationReport
from .exactalg import IntMatrix
from .exceptions import DegeneratePolytope, NonSimpleVertex
from .fan import Fan
from .linprog import VariableSign, solve
from .stackbuild import StackyFan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HalfSpace:
    """The half-space ⟨α, normal⟩ ≥ −eta."""

    normal: tuple[int, ...]
    eta: sympy.Rational

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(int(v) for v in self.normal))
        object.__setattr__(self, "eta", sympy.Rational(self.eta))

    @property
    def is_primitive(self) -> bool:
        return any(self.normal) and gcd(*self.normal) == 1

    def slack(self, point: Sequence) -> sympy.Rational:
        return (
            sum(
                (sympy.Rational(a) * u for a, u in zip(point, self.normal, strict=True)),
                sympy.Rational(0),
            )
            + self.eta
        )


@dataclass(frozen=True)
class LabelledFacet:
    half_space: HalfSpace
    label: int = 1


@dataclass(frozen=True)
class Vertex:
    point: tuple[sympy.Rational, ...]
    active_facets: frozenset[int]


@dataclass(frozen=True)
class LabelledPolytope:
    dim: int
    facets: tuple[LabelledFacet, ...]

    def __post_init__(self):
        object.__setattr__(self, "facets", tuple(self.facets))

    @classmethod
    def from_data(
        cls,
        normals: Sequence[Sequence[int]],
        eta: Sequence,
        labels: Sequence[int] | None = None,
        dim: int | None = None,
    ) -> "LabelledPolytope":
        if labels is None:
            labels = [1] * len(normals)
        if dim is None:
            dim = len(normals[0]) if normals else 0
        return cls(
            dim=dim,
            facets=tuple(
                LabelledFacet(HalfSpace(tuple(u), value), int(n))
                for u, value, n in zip(normals, eta, labels, strict=True)
            ),
        )

    @property
    def m(self) -> int:
        return len(self.facets)

    @property
    def normals(self) -> tuple[tuple[int, ...], ...]:
        return tuple(facet.half_space.normal for facet in self.facets)

    @property
    def eta(self) -> tuple[sympy.Rational, ...]:
        return tuple(facet.half_space.eta for facet in self.facets)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(facet.label for facet in self.facets)

    def translated(self, offset: Sequence) -> "LabelledPolytope":
        """The polytope Δ + offset."""
        offset = [sympy.Rational(c) for c in offset]
        return LabelledPolytope.from_data(
            self.normals,
            [
                facet.half_space.eta
                - sum(
                    (c * u for c, u in zip(offset, facet.half_space.normal, strict=True)),
                    sympy.Rational(0),
                )
                for facet in self.facets
            ],
            self.labels,
            dim=self.dim,
        )

    def permuted(self, order: Sequence[int]) -> "LabelledPolytope":
        """Reorder the facets so that new facet ``i`` is old facet ``order[i]``."""
        return LabelledPolytope(self.dim, tuple(self.facets[j] for j in order))

    def relabelled(self, labels: Sequence[int]) -> "LabelledPolytope":
        return LabelledPolytope.from_data(
            self.normals, self.eta, labels, dim=self.dim
        )


def _vertices(
    dim: int, facets: Sequence[HalfSpace], indices: Sequence[int]
) -> list[Vertex]:
    """
    Brute-force vertex enumeration over ``indices``: solve every d-subset
    of the bounding hyperplanes exactly and keep the feasible solutions.
    """
    found: dict[tuple, set[int]] = {}
    for subset in combinations(indices, dim):
        system = sympy.Matrix([facets[j].normal for j in subset])
        if system.det() == 0:
            continue
        point = system.LUsolve(sympy.Matrix([-facets[j].eta for j in subset]))
        point = tuple(sympy.Rational(value) for value in point)
        if point in found:
            continue
        slacks = {j: facets[j].slack(point) for j in indices}
        if all(slack >= 0 for slack in slacks.values()):
            found[point] = {j for j, slack in slacks.items() if slack == 0}
    vertices = [
        Vertex(point=point, active_facets=frozenset(active))
        for point, active in found.items()
    ]
    return sorted(vertices, key=lambda v: sorted(v.active_facets))


def _positively_spanning(dim: int, normals: Sequence[Sequence[int]]) -> bool:
    """Normals positively span ℚ^d iff they span and Σλ_j u_j = 0 with λ > 0."""
    if not normals:
        return False
    if IntMatrix.from_columns(normals, rows=dim).rank() < dim:
        return False
    rows = [[u[r] for u in normals] for r in range(dim)]
    signs = [VariableSign.POSITIVE] * len(normals)
    return solve(rows, [0] * dim, signs).feasible


def _affine_rank(points: Sequence[Sequence]) -> int:
    if not points:
        return -1
    base = points[0]
    differences = [
        [a - b for a, b in zip(point, base, strict=True)] for point in points[1:]
    ]
    if not differences:
        return 0
    return sympy.Matrix(differences).rank()


def validate_polytope(polytope: LabelledPolytope) -> ValidationReport:
    """
    Itemized check of the data: shapes, primitivity, labels, boundedness,
    full-dimensionality and irredundancy.
    """
    subject = f"polytope with {polytope.m} facets in dimension {polytope.dim}"
    diagnostics = []

    if polytope.dim < 1:
        diagnostics.append(
            Diagnostic("dimension_mismatch", "Dimension must be positive.")
        )
    for j, facet in enumerate(polytope.facets, start=1):
        normal = facet.half_space.normal
        if len(normal) != polytope.dim:
            diagnostics.append(
                Diagnostic(
                    "dimension_mismatch",
                    f"Normal {j} has {len(normal)} entries, expected "
                    f"{polytope.dim}.",
                )
            )
        elif not any(normal):
            diagnostics.append(Diagnostic("zero_normal", f"Normal {j} is zero."))
        elif not facet.half_space.is_primitive:
            diagnostics.append(
                Diagnostic(
                    "non_primitive_normal",
                    f"Normal {j} = {list(normal)} is not primitive "
                    f"(gcd {gcd(*normal)}).",
                )
            )
        if facet.label < 1:
            diagnostics.append(
                Diagnostic(
                    "invalid_label", f"Label {j} = {facet.label} is not positive."
                )
            )
    if any(d.code in ("dimension_mismatch", "zero_normal") for d in diagnostics):
        return ValidationReport(subject, tuple(diagnostics))

    half_spaces = [facet.half_space for facet in polytope.facets]
    everything = list(range(polytope.m))
    if not _positively_spanning(polytope.dim, polytope.normals):
        diagnostics.append(
            Diagnostic(
                "unbounded",
                "The normals do not positively span the space; the "
                "polytope is unbounded.",
            )
        )
        return ValidationReport(subject, tuple(diagnostics))

    vertices = _vertices(polytope.dim, half_spaces, everything)
    if not vertices:
        diagnostics.append(Diagnostic("empty", "The polytope is empty."))
        return ValidationReport(subject, tuple(diagnostics))
    if _affine_rank([v.point for v in vertices]) < polytope.dim:
        diagnostics.append(
            Diagnostic(
                "not_full_dimensional",
                "The polytope has empty interior.",
            )
        )
        return ValidationReport(subject, tuple(diagnostics))

    points = {v.point for v in vertices}
    for j in everything:
        rest = [k for k in everything if k != j]
        if not _positively_spanning(
            polytope.dim, [polytope.normals[k] for k in rest]
        ):
            continue
        if {v.point for v in _vertices(polytope.dim, half_spaces, rest)} == points:
            diagnostics.append(
                Diagnostic(
                    "redundant_facet",
                    f"Facet {j + 1} can be removed without changing the "
                    "polytope.",
                )
            )

    logger.debug("Validated %s: %d diagnostics", subject, len(diagnostics))
    return ValidationReport(subject, tuple(diagnostics))


def enumerate_vertices(polytope: LabelledPolytope) -> list[Vertex]:
    """Exact vertices with their active facets."""
    if not _positively_spanning(polytope.dim, polytope.normals):
        raise DegeneratePolytope("The polytope is unbounded.")
    half_spaces = [facet.half_space for facet in polytope.facets]
    vertices = _vertices(polytope.dim, half_spaces, range(polytope.m))
    if _affine_rank([v.point for v in vertices]) < polytope.dim:
        raise DegeneratePolytope(
            "The polytope is empty or not full-dimensional."
        )
    logger.debug("Found %d vertices", len(vertices))
    return vertices


def is_smooth(polytope: LabelledPolytope) -> tuple[bool, list[Vertex]]:
    """
    Whether the active normals form a ℤ-basis at every vertex; returns the
    offending vertices as well.
    """
    offending = []
    for vertex in enumerate_vertices(polytope):
        if len(vertex.active_facets) != polytope.dim:
            offending.append(vertex)
            continue
        block = IntMatrix.from_columns(
            [polytope.normals[j] for j in sorted(vertex.active_facets)],
            rows=polytope.dim,
        )
        if abs(block.determinant()) != 1:
            offending.append(vertex)
    return not offending, offending


def normal_fan(polytope: LabelledPolytope) -> StackyFan:
    """The normal fan with the facet labels and support numbers attached."""
    cones = []
    for vertex in enumerate_vertices(polytope):
        if len(vertex.active_facets) > polytope.dim:
            point = ", ".join(str(c) for c in vertex.point)
            raise NonSimpleVertex(
                f"Vertex ({point}) lies on {len(vertex.active_facets)} "
                f"facets in dimension {polytope.dim}."
            )
        cones.append(vertex.active_facets)
    fan = Fan(dim=polytope.dim, rays=polytope.normals, max_cones=tuple(cones))
    return StackyFan(fan=fan, labels=polytope.labels, eta=polytope.eta)
