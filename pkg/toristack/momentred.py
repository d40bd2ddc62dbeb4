"""
Symplectic reduction data.

Everything is linear in r_j = ½|z_j|²: the moment map of the compact group
is r ↦ ι*·r, and a point of the level set μ⁻¹(ξ) with zero set P is a
vector r ≥ 0, vanishing exactly on P, with ι*·r = ξ.
"""

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import sympy

from .exactalg import IntMatrix, integer_kernel
from .exceptions import MissingLevelData
from .fan import Fan, ZeroPattern, minimal_inadmissible_patterns
from .linprog import (
    VariableSign,
    solve,
    verify_certificate,
    verify_witness,
)
from .polytope import LabelledPolytope, normal_fan
from .stackbuild import StackyFan

logger = logging.getLogger(__name__)


class LevelConvention(enum.StrEnum):
    """How the level ξ is formed from the support numbers η and labels n."""

    WEIGHTED = "weighted"  # ι*(n_j·η_j)
    DIVIDED = "divided"  # ι*(η_j / n_j)
    UNLABELLED = "unlabelled"  # ι*(η_j)


@dataclass(frozen=True)
class MomentData:
    iota_star: IntMatrix
    xi: tuple[sympy.Rational, ...]
    convention: LevelConvention = LevelConvention.WEIGHTED

    @property
    def coefficients(self) -> tuple[tuple[int, ...], ...]:
        """μ_Ĝ(z) = Σ_j coefficients[k][j]·½|z_j|², one row per component."""
        return tuple(self.iota_star.row(k) for k in range(self.iota_star.rows))

    @property
    def rank(self) -> int:
        return self.iota_star.rows

    @property
    def m(self) -> int:
        return self.iota_star.cols

    def annotation(self) -> str | None:
        if self.rank == 1 and all(c > 0 for c in self.coefficients[0]) and all(
            value > 0 for value in self.xi
        ):
            weights = ", ".join(str(c) for c in self.coefficients[0])
            return (
                f"level set is an ellipsoid with weights ({weights}), "
                f"diffeomorphic to S^{2 * self.m - 1}"
            )
        return None


@dataclass(frozen=True)
class FeasibilityResult:
    pattern: ZeroPattern
    feasible: bool
    witness: tuple[sympy.Rational, ...] | None = None
    certificate: tuple[sympy.Rational, ...] | None = None
    strict: bool = False

    def verify(self, moment: MomentData) -> bool:
        """Re-check the stored witness or certificate by substitution."""
        rows, rhs, signs = _system(moment, self.pattern, strict=self.strict)
        if self.feasible:
            return self.witness is not None and verify_witness(
                rows, rhs, signs, self.witness
            )
        return self.certificate is not None and verify_certificate(
            rows, rhs, signs, self.certificate
        )


class PatternCheck(NamedTuple):
    passed: bool
    offending: ZeroPattern | None
    evidence: tuple[FeasibilityResult, ...] = ()


def level_weights(
    stacky_fan: StackyFan, convention: LevelConvention
) -> tuple[sympy.Rational, ...]:
    if stacky_fan.eta is None:
        raise MissingLevelData()
    pairs = zip(stacky_fan.eta, stacky_fan.labels, strict=True)
    match convention:
        case LevelConvention.WEIGHTED:
            return tuple(eta * n for eta, n in pairs)
        case LevelConvention.DIVIDED:
            return tuple(eta / n for eta, n in pairs)
        case LevelConvention.UNLABELLED:
            return tuple(eta for eta, _ in pairs)
    raise ValueError(f"Unknown level convention {convention!r}.")


def moment_data(
    source: LabelledPolytope | StackyFan,
    convention: LevelConvention = LevelConvention.WEIGHTED,
) -> MomentData:
    """ι* from the saturated kernel of β and the level ξ = ι*·w."""
    stacky_fan = (
        normal_fan(source) if isinstance(source, LabelledPolytope) else source
    )
    iota_star = integer_kernel(stacky_fan.beta).T
    weights = level_weights(stacky_fan, LevelConvention(convention))
    xi = tuple(
        sum(
            (c * w for c, w in zip(iota_star.row(k), weights, strict=True)),
            sympy.Rational(0),
        )
        for k in range(iota_star.rows)
    )
    logger.debug("Moment data: %d components, xi = %s", iota_star.rows, xi)
    return MomentData(iota_star=iota_star, xi=xi, convention=convention)


def _system(moment: MomentData, pattern: ZeroPattern, *, strict: bool):
    off = VariableSign.POSITIVE if strict else VariableSign.NONNEG
    signs = [
        VariableSign.ZERO if j in pattern.indices else off
        for j in range(moment.m)
    ]
    return moment.coefficients, moment.xi, signs


def level_set_feasibility(
    moment: MomentData, pattern: ZeroPattern, *, strict: bool = False
) -> FeasibilityResult:
    """
    Whether some r ≥ 0 vanishing on ``pattern`` satisfies ι*·r = ξ.

    With ``strict`` the witness must also be positive off the pattern,
    i.e. the zero set is exactly ``pattern``.
    """
    rows, rhs, signs = _system(moment, pattern, strict=strict)
    outcome = solve(rows, rhs, signs)
    logger.debug(
        "Pattern %s (strict=%s): feasible=%s", pattern, strict, outcome.feasible
    )
    return FeasibilityResult(
        pattern=pattern,
        feasible=outcome.feasible,
        witness=outcome.witness,
        certificate=outcome.certificate,
        strict=strict,
    )


def _hyperplanes(iota_star: IntMatrix) -> list[frozenset[int]]:
    """Column sets of ι* spanning a subspace of rank exactly one less."""
    target = iota_star.rows - 1
    columns = iota_star.to_sympy()
    rank = {}

    def rank_of(indices):
        key = tuple(sorted(indices))
        if key not in rank:
            rank[key] = (
                columns.extract(list(range(columns.rows)), list(key)).rank()
                if key
                else 0
            )
        return rank[key]

    flats = set()
    for basis in combinations(range(iota_star.cols), target):
        if rank_of(basis) != target:
            continue
        flats.add(
            frozenset(
                j for j in range(iota_star.cols) if rank_of((*basis, j)) == target
            )
        )
    return sorted(flats, key=lambda flat: sorted(flat))


def check_regular_value(moment: MomentData, fan: Fan) -> PatternCheck:
    """
    ξ is regular iff no feasible zero-pattern leaves a rank-deficient set
    of ι* columns.

    Feasibility only grows when the pattern shrinks, so it suffices to test
    the complements of the hyperplanes of the column matroid of ι*.
    """
    if fan.m != moment.m:
        raise ValueError("Moment data and fan have different ray counts.")
    if moment.rank == 0:
        return PatternCheck(True, None)
    evidence = []
    offending = None
    patterns = sorted(
        (
            ZeroPattern(frozenset(range(moment.m)) - flat)
            for flat in _hyperplanes(moment.iota_star)
        ),
        key=ZeroPattern.sort_key,
    )
    for pattern in patterns:
        result = level_set_feasibility(moment, pattern)
        evidence.append(result)
        if result.feasible and offending is None:
            offending = pattern
    if offending is not None:
        logger.warning("Level %s is not a regular value (pattern %s)", moment.xi, offending)
    return PatternCheck(offending is None, offending, tuple(evidence))


def level_set_in_Cm(
    moment: MomentData, fan: Fan, *, max_rays: int | None = None
) -> PatternCheck:
    """
    μ⁻¹(ξ) ⊂ ℂᵐ_Σ iff every inadmissible pattern is infeasible; testing the
    minimal inadmissible ones suffices.
    """
    kwargs = {"max_rays": max_rays} if max_rays is not None else {}
    evidence = []
    offending = None
    for pattern in minimal_inadmissible_patterns(fan, **kwargs):
        result = level_set_feasibility(moment, pattern)
        evidence.append(result)
        if result.feasible and offending is None:
            offending = pattern
    if offending is not None:
        logger.warning("Level set meets the excluded locus at %s", offending)
    return PatternCheck(offending is None, offending, tuple(evidence))


def weighted_sums(
    moment: MomentData, r: Sequence
) -> tuple[sympy.Rational, ...]:
    """ι*·r, the moment map evaluated on r = ½|z|²."""
    return tuple(
        sum(
            (c * sympy.Rational(v) for c, v in zip(row, r, strict=True)),
            sympy.Rational(0),
        )
        for row in moment.coefficients
    )
