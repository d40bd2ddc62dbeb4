"""
Simplicial fans and the zero-patterns that describe ℂᵐ_Σ.

Ray indices are 0-based internally; everything user-facing (``str`` of a
pattern, reports, input documents) is 1-based.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .diagnostics import Diagnostic, ValidationReport
from .exactalg import IntMatrix, smith_normal_form
from .exceptions import TooManyRays
from .linprog import VariableSign, solve

logger = logging.getLogger(__name__)

DEFAULT_MAX_RAYS = 30
DEFAULT_COMPLETENESS_MAX_DIM = 3


@dataclass(frozen=True)
class ZeroPattern:
    """The set of coordinates that vanish at a point of ℂᵐ."""

    indices: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))
        if any(index < 0 for index in self.indices):
            raise ValueError("Pattern indices must be nonnegative.")

    @classmethod
    def of(cls, *indices: int) -> "ZeroPattern":
        return cls(frozenset(indices))

    @classmethod
    def from_one_based(cls, indices: Iterable[int]) -> "ZeroPattern":
        return cls(frozenset(index - 1 for index in indices))

    def one_based(self) -> list[int]:
        return [index + 1 for index in sorted(self.indices)]

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return len(self.indices), tuple(sorted(self.indices))

    def __len__(self):
        return len(self.indices)

    def __str__(self):
        return "{" + ",".join(str(i) for i in self.one_based()) + "}"


@dataclass(frozen=True)
class Fan:
    """A fan given by its rays and its maximal cones (as ray-index sets)."""

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "rays",
            tuple(tuple(int(v) for v in ray) for ray in self.rays),
        )
        object.__setattr__(
            self, "max_cones", tuple(frozenset(cone) for cone in self.max_cones)
        )

    @property
    def m(self) -> int:
        return len(self.rays)

    def ray_matrix(self) -> IntMatrix:
        """The d×m matrix whose columns are the rays."""
        return IntMatrix.from_columns(self.rays, rows=self.dim)

    def cone_matrix(self, cone: Iterable[int]) -> IntMatrix:
        return IntMatrix.from_columns(
            [self.rays[j] for j in sorted(cone)], rows=self.dim
        )

    def permuted(self, order: Sequence[int]) -> "Fan":
        """Reorder the rays so that new ray ``i`` is old ray ``order[i]``."""
        position = {old: new for new, old in enumerate(order)}
        return Fan(
            dim=self.dim,
            rays=tuple(self.rays[old] for old in order),
            max_cones=tuple(
                frozenset(position[j] for j in cone) for cone in self.max_cones
            ),
        )


def _cones_intersect_properly(fan: Fan, first, second) -> bool:
    """
    No point of ``first`` using a ray outside ``second`` lies in ``second``.

    Decided by infeasibility of Σ a_i u_i = Σ b_k u_k, a, b ≥ 0, with the
    ``first``-only rays carrying total weight 1.
    """
    first = sorted(first)
    second = sorted(second)
    outside = set(first) - set(second)
    if not outside:
        return True
    rows = [
        [fan.rays[i][r] for i in first] + [-fan.rays[k][r] for k in second]
        for r in range(fan.dim)
    ]
    rows.append([int(i in outside) for i in first] + [0] * len(second))
    rhs = [0] * fan.dim + [1]
    signs = [VariableSign.NONNEG] * (len(first) + len(second))
    return not solve(rows, rhs, signs).feasible


def _completeness_diagnostics(fan: Fan) -> list[Diagnostic]:
    d = fan.dim
    wrong_size = [cone for cone in fan.max_cones if len(cone) != d]
    if wrong_size:
        return [
            Diagnostic(
                "not_complete",
                f"{len(wrong_size)} maximal cone(s) are not {d}-dimensional.",
            )
        ]

    faces: dict[frozenset[int], list[int]] = {}
    for position, cone in enumerate(fan.max_cones):
        for face in combinations(sorted(cone), d - 1):
            faces.setdefault(frozenset(face), []).append(position)

    diagnostics = []
    unpaired = [face for face, owners in faces.items() if len(owners) != 2]
    if unpaired:
        face = min(unpaired, key=lambda f: sorted(f))
        labels = ",".join(str(i + 1) for i in sorted(face))
        diagnostics.append(
            Diagnostic(
                "not_complete",
                f"Face {{{labels}}} lies in {len(faces[face])} maximal "
                "cone(s); every codimension-one face needs exactly two.",
            )
        )

    if fan.max_cones:
        reached = {0}
        frontier = [0]
        while frontier:
            current = frontier.pop()
            for owners in faces.values():
                if current in owners:
                    for other in owners:
                        if other not in reached:
                            reached.add(other)
                            frontier.append(other)
        if len(reached) != len(fan.max_cones):
            diagnostics.append(
                Diagnostic(
                    "not_complete",
                    "The maximal cones are not connected through shared "
                    "facets.",
                )
            )
    else:
        diagnostics.append(Diagnostic("not_complete", "The fan has no cones."))
    return diagnostics


def validate_fan(
    fan: Fan,
    *,
    assume_complete: bool = False,
    completeness_max_dim: int = DEFAULT_COMPLETENESS_MAX_DIM,
) -> ValidationReport:
    """
    Check that ``fan`` is a complete simplicial fan.

    Completeness is checked combinatorially up to ``completeness_max_dim``;
    above it the caller must assert completeness with ``assume_complete``,
    which is recorded as a note.
    """
    subject = f"fan with {fan.m} rays in dimension {fan.dim}"
    diagnostics = []
    notes = []

    if fan.dim < 1:
        diagnostics.append(
            Diagnostic("dimension_mismatch", "Dimension must be positive.")
        )
    for j, ray in enumerate(fan.rays, start=1):
        if len(ray) != fan.dim:
            diagnostics.append(
                Diagnostic(
                    "dimension_mismatch",
                    f"Ray {j} has {len(ray)} entries, expected {fan.dim}.",
                )
            )
    for position, cone in enumerate(fan.max_cones, start=1):
        if not cone or any(not 0 <= j < fan.m for j in cone):
            diagnostics.append(
                Diagnostic(
                    "invalid_cone",
                    f"Cone {position} refers to rays outside 1..{fan.m}.",
                )
            )
    if diagnostics:
        return ValidationReport(subject, tuple(diagnostics))

    for j, ray in enumerate(fan.rays, start=1):
        if not any(ray):
            diagnostics.append(Diagnostic("zero_ray", f"Ray {j} is zero."))
        elif gcd(*ray) != 1:
            diagnostics.append(
                Diagnostic(
                    "non_primitive_ray",
                    f"Ray {j} = {list(ray)} is not primitive.",
                )
            )
    seen = {}
    for j, ray in enumerate(fan.rays, start=1):
        if ray in seen:
            diagnostics.append(
                Diagnostic(
                    "duplicate_ray", f"Rays {seen[ray]} and {j} coincide."
                )
            )
        seen.setdefault(ray, j)
    if len(set(fan.max_cones)) != len(fan.max_cones):
        diagnostics.append(
            Diagnostic("duplicate_cone", "A maximal cone is listed twice.")
        )
    used = frozenset().union(*fan.max_cones)
    for j in range(fan.m):
        if j not in used:
            diagnostics.append(
                Diagnostic(
                    "unused_ray", f"Ray {j + 1} lies in no maximal cone."
                )
            )

    simplicial = True
    for position, cone in enumerate(fan.max_cones, start=1):
        if smith_normal_form(fan.cone_matrix(cone)).rank != len(cone):
            simplicial = False
            diagnostics.append(
                Diagnostic(
                    "not_simplicial",
                    f"The rays of cone {position} are linearly dependent.",
                )
            )

    if smith_normal_form(fan.ray_matrix()).rank < fan.dim:
        diagnostics.append(
            Diagnostic(
                "rays_not_spanning",
                "The rays do not span the ambient space (torus factors).",
            )
        )

    if fan.dim <= completeness_max_dim:
        diagnostics.extend(_completeness_diagnostics(fan))
    elif assume_complete:
        notes.append(
            f"Completeness asserted by the user for dimension {fan.dim}; "
            "not checked."
        )
    else:
        diagnostics.append(
            Diagnostic(
                "completeness_unchecked",
                f"Completeness is only checked up to dimension "
                f"{completeness_max_dim}; assert it explicitly.",
            )
        )

    if simplicial:
        for (i, first), (k, second) in combinations(
            enumerate(fan.max_cones, start=1), 2
        ):
            if not (
                _cones_intersect_properly(fan, first, second)
                and _cones_intersect_properly(fan, second, first)
            ):
                diagnostics.append(
                    Diagnostic(
                        "improper_intersection",
                        f"Cones {i} and {k} do not meet in a common face.",
                    )
                )

    logger.debug("Validated %s: %d diagnostics", subject, len(diagnostics))
    return ValidationReport(subject, tuple(diagnostics), tuple(notes))


def is_admissible(fan: Fan, pattern: ZeroPattern) -> bool:
    return any(pattern.indices <= cone for cone in fan.max_cones)


def admissible_patterns(
    fan: Fan, *, max_rays: int = DEFAULT_MAX_RAYS
) -> list[ZeroPattern]:
    """Every ray set contained in a maximal cone, smallest first."""
    if fan.m > max_rays:
        raise TooManyRays(
            f"{fan.m} rays exceed the enumeration bound of {max_rays}."
        )
    subsets = set()
    for cone in fan.max_cones:
        members = sorted(cone)
        for size in range(len(members) + 1):
            subsets.update(frozenset(c) for c in combinations(members, size))
    patterns = [ZeroPattern(subset) for subset in subsets]
    return sorted(patterns, key=ZeroPattern.sort_key)


def minimal_inadmissible_patterns(
    fan: Fan, *, max_rays: int = DEFAULT_MAX_RAYS
) -> list[ZeroPattern]:
    """
    The inclusion-minimal ray sets lying in no maximal cone.

    These are the primitive collections of the fan; any inadmissible
    pattern contains one of them.
    """
    admissible = {p.indices for p in admissible_patterns(fan, max_rays=max_rays)}
    minimal = set()
    for face in admissible:
        for j in range(fan.m):
            if j in face:
                continue
            candidate = face | {j}
            if candidate in admissible:
                continue
            if all(candidate - {i} in admissible for i in candidate):
                minimal.add(candidate)
    return sorted(
        (ZeroPattern(indices) for indices in minimal), key=ZeroPattern.sort_key
    )
