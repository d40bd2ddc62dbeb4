"""
Group presentations of a toric Deligne–Mumford stack.

From a stacky fan (Σ, β) this builds the algebraic group H(β) =
Hom(coker β*, ℂ*) and the compact group ker β̄ = Hom(coker β*, ℝ/ℤ), both
embedded diagonally in the rank-m torus through β^∨, together with
isotropy groups, local charts and the finite extension Γ.
"""

import enum
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import sympy

from .exactalg import (
    CokernelPresentation,
    FinAbGroup,
    IntMatrix,
    cokernel,
    dualize,
    integer_kernel,
    smith_normal_form,
)
from .exceptions import NotMaximalCone
from .fan import Fan, ZeroPattern

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StackyFan:
    """
    A fan with a positive label n_j on every ray.

    ``eta`` optionally carries the support numbers of a polytope with this
    normal fan, which is what the moment map needs.
    """

    fan: Fan
    labels: tuple[int, ...]
    eta: tuple[sympy.Rational, ...] | None = None

    def __post_init__(self):
        labels = tuple(int(n) for n in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != self.fan.m:
            raise ValueError(
                f"Expected {self.fan.m} labels, got {len(labels)}."
            )
        if any(n < 1 for n in labels):
            raise ValueError(f"Labels must be positive, got {list(labels)}.")
        if self.eta is not None:
            eta = tuple(sympy.Rational(value) for value in self.eta)
            if len(eta) != self.fan.m:
                raise ValueError(
                    f"Expected {self.fan.m} support numbers, got {len(eta)}."
                )
            object.__setattr__(self, "eta", eta)

    @classmethod
    def from_fan(
        cls,
        fan: Fan,
        labels: Sequence[int] | None = None,
        eta: Sequence | None = None,
    ) -> "StackyFan":
        return cls(
            fan=fan,
            labels=tuple(labels) if labels is not None else (1,) * fan.m,
            eta=tuple(eta) if eta is not None else None,
        )

    @property
    def m(self) -> int:
        return self.fan.m

    @property
    def dim(self) -> int:
        return self.fan.dim

    @property
    def beta(self) -> IntMatrix:
        """The d×m matrix with columns n_j·u_j."""
        return IntMatrix.from_columns(
            [
                tuple(n * v for v in ray)
                for n, ray in zip(self.labels, self.fan.rays, strict=True)
            ],
            rows=self.dim,
        )

    @property
    def beta0(self) -> IntMatrix:
        return self.fan.ray_matrix()

    def with_trivial_labels(self) -> "StackyFan":
        return StackyFan(self.fan, (1,) * self.m, self.eta)

    def relabelled(self, labels: Sequence[int]) -> "StackyFan":
        return StackyFan(self.fan, tuple(labels), self.eta)

    def permuted(self, order: Sequence[int]) -> "StackyFan":
        return StackyFan(
            fan=self.fan.permuted(order),
            labels=tuple(self.labels[old] for old in order),
            eta=(
                tuple(self.eta[old] for old in order)
                if self.eta is not None
                else None
            ),
        )


class GroupFlavor(enum.StrEnum):
    ALGEBRAIC = "algebraic"
    COMPACT = "compact"


@dataclass(frozen=True)
class DiagGroupPresentation:
    """
    A group (ℂ* or S¹)^l × ⊕ℤ_{t_i} embedded diagonally in the rank-m torus.

    Row j of ``exponents`` gives coordinate j of the embedding: the powers
    of the free generators, then the powers of the torsion generators
    (read modulo their order).
    """

    flavor: GroupFlavor
    ambient_rank: int
    free_rank: int
    torsion: tuple[int, ...]
    exponents: IntMatrix

    @property
    def group(self) -> FinAbGroup:
        return FinAbGroup(free_rank=self.free_rank, torsion=self.torsion)

    @property
    def generator_count(self) -> int:
        return self.free_rank + len(self.torsion)

    def data(self) -> tuple[int, tuple[int, ...], IntMatrix]:
        """The flavor-free part that both presentations must share."""
        return self.free_rank, self.torsion, self.exponents

    def character_block(self, coordinates: Iterable[int]) -> IntMatrix:
        """
        Characters of the given coordinates as columns, followed by the
        relations t_i·e_i of the torsion generators.
        """
        coordinates = list(coordinates)
        characters = IntMatrix.from_columns(
            [self.exponents.row(j) for j in coordinates],
            rows=self.generator_count,
        )
        relations = IntMatrix.from_columns(
            [
                tuple(
                    t if row == self.free_rank + i else 0
                    for row in range(self.generator_count)
                )
                for i, t in enumerate(self.torsion)
            ],
            rows=self.generator_count,
        )
        return characters.hstack(relations)

    def is_injective(self) -> bool:
        """The embedding is injective iff its characters generate everything."""
        block = self.character_block(range(self.ambient_rank))
        snf = smith_normal_form(block)
        return snf.rank == block.rows and all(
            factor == 1 for factor in snf.invariant_factors[: block.rows]
        )

    def describe(self) -> str:
        """The embedding in multiplicative notation, e.g. ``t -> (t^2, t^2, t)``."""
        free_names = (
            ["t"]
            if self.free_rank == 1
            else [f"t{k + 1}" for k in range(self.free_rank)]
        )
        torsion_names = [f"a{i + 1}" for i in range(len(self.torsion))]

        def power(name, exponent):
            if exponent == 0:
                return None
            return name if exponent == 1 else f"{name}^{exponent}"

        coordinates = []
        for j in range(self.ambient_rank):
            row = self.exponents.row(j)
            factors = [
                power(name, e)
                for name, e in zip(free_names, row[: self.free_rank], strict=True)
            ]
            for name, order, e in zip(
                torsion_names, self.torsion, row[self.free_rank :], strict=True
            ):
                if e % order:
                    root = "-1" if order == 2 else f"w{order}"
                    factors.append(f"({root})^{power(name, e % order)}")
            factors = [f for f in factors if f]
            coordinates.append(" ".join(factors) if factors else "1")
        source = ", ".join(torsion_names + free_names)
        return f"({source}) -> ({', '.join(coordinates)})"


@dataclass(frozen=True)
class LocalChart:
    cone: frozenset[int]
    beta_sigma: IntMatrix
    chart_group: FinAbGroup
    order: int


@dataclass(frozen=True)
class IsotropyReport:
    """
    Stabilizer of the points whose zero set is ``pattern``.

    ``admissible`` is ``None`` when the caller did not check the pattern
    against a fan.
    """

    pattern: ZeroPattern
    group: FinAbGroup
    admissible: bool | None = None


def _presentation(
    beta_vee: CokernelPresentation, flavor: GroupFlavor
) -> DiagGroupPresentation:
    group = beta_vee.group
    columns = [
        beta_vee.free_rows().row(k) for k in range(group.free_rank)
    ] + [beta_vee.torsion_rows().row(i) for i in range(len(group.torsion))]
    exponents = IntMatrix.from_columns(
        columns, rows=beta_vee.projection.cols
    )
    return DiagGroupPresentation(
        flavor=flavor,
        ambient_rank=beta_vee.projection.cols,
        free_rank=group.free_rank,
        torsion=group.torsion,
        exponents=exponents,
    )


def build_H(stacky_fan: StackyFan) -> DiagGroupPresentation:
    """H(β) = Hom(coker β*, ℂ*) acting on ℂᵐ through β^∨."""
    _, beta_vee = dualize(stacky_fan.beta)
    presentation = _presentation(beta_vee, GroupFlavor.ALGEBRAIC)
    logger.debug("H(beta) = %s", presentation.group)
    return presentation


def build_kerbar(stacky_fan: StackyFan) -> DiagGroupPresentation:
    """ker β̄ = Hom(coker β*, ℝ/ℤ), embedded in the compact torus."""
    _, beta_vee = dualize(stacky_fan.beta)
    return _presentation(beta_vee, GroupFlavor.COMPACT)


def finite_extension(stacky_fan: StackyFan) -> FinAbGroup:
    """
    Γ = ker(n̄: Ĝ → G) for Ĝ = ker β̄ and G = ker β̄₀.

    Γ is Ĝ ∩ ⊕ℤ_{n_j} inside the torus, whose character group is
    ℤᵐ / (im β* + im diag(n)).
    """
    dualize(stacky_fan.beta)
    block = IntMatrix.diagonal(stacky_fan.labels).hstack(stacky_fan.beta.T)
    return cokernel(block).group


def identity_component_extension(stacky_fan: StackyFan) -> FinAbGroup:
    """Kernel of n̄ restricted to the identity component of Ĝ."""
    dualize(stacky_fan.beta)
    kernel = integer_kernel(stacky_fan.beta)
    scaled = IntMatrix.diagonal(stacky_fan.labels) @ kernel
    return cokernel(scaled.T).group


def isotropy(
    presentation: DiagGroupPresentation, pattern: ZeroPattern
) -> IsotropyReport:
    """
    Elements acting trivially on every coordinate outside ``pattern``.

    Its character group is the quotient of the character group of the
    presentation by the characters of the nonvanishing coordinates.
    """
    if any(j >= presentation.ambient_rank for j in pattern.indices):
        raise ValueError(
            f"Pattern {pattern} exceeds the ambient rank "
            f"{presentation.ambient_rank}."
        )
    nonvanishing = [
        j for j in range(presentation.ambient_rank) if j not in pattern.indices
    ]
    block = presentation.character_block(nonvanishing)
    return IsotropyReport(pattern=pattern, group=cokernel(block).group)


def _require_maximal_cone(stacky_fan: StackyFan, cone) -> frozenset[int]:
    cone = frozenset(cone)
    if cone not in stacky_fan.fan.max_cones or len(cone) != stacky_fan.dim:
        labels = ",".join(str(j + 1) for j in sorted(cone))
        raise NotMaximalCone(f"{{{labels}}} is not a maximal cone of the fan.")
    return cone


def local_chart(stacky_fan: StackyFan, cone: Iterable[int]) -> LocalChart:
    cone = _require_maximal_cone(stacky_fan, cone)
    beta_sigma = stacky_fan.beta.select_columns(sorted(cone))
    return LocalChart(
        cone=cone,
        beta_sigma=beta_sigma,
        chart_group=cokernel(beta_sigma).group,
        order=abs(beta_sigma.determinant()),
    )


def chart_extension(
    stacky_fan: StackyFan, cone: Iterable[int]
) -> tuple[FinAbGroup, FinAbGroup, FinAbGroup]:
    """
    The groups of 0 → ⊕ℤ_{n_j} → H(β_σ) → H(β_{σ,0}) → 0 for one chart.
    """
    cone = sorted(_require_maximal_cone(stacky_fan, cone))
    cyclic = FinAbGroup.from_cyclic_orders(
        [stacky_fan.labels[j] for j in cone]
    )
    labelled = cokernel(stacky_fan.beta.select_columns(cone)).group
    primitive = cokernel(stacky_fan.beta0.select_columns(cone)).group
    return cyclic, labelled, primitive
