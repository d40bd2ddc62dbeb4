"""
Exact rational feasibility for ``A x = b`` with sign-constrained variables.

The equalities are eliminated by row reduction, the sign constraints that
remain are projected out by Fourier–Motzkin elimination. Every inequality
keeps the nonnegative multipliers that produced it, so a contradiction
found at the end turns directly into a Farkas/Motzkin certificate ``y``:

    yᵀA_j ≥ 0 on every live column j, and either yᵀb < 0, or yᵀb ≤ 0 and
    yᵀA_j > 0 for some strictly positive column j.
"""

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import sympy

logger = logging.getLogger(__name__)


class VariableSign(enum.StrEnum):
    ZERO = "zero"
    NONNEG = "nonneg"
    POSITIVE = "positive"


@dataclass(frozen=True)
class LinearFeasibility:
    """Outcome of a feasibility query with its exact evidence."""

    feasible: bool
    witness: tuple[sympy.Rational, ...] | None = None
    certificate: tuple[sympy.Rational, ...] | None = None


@dataclass
class _Inequality:
    # Σ coefficients[f]·x_f + constant ≥ 0 (> 0 when strict)
    coefficients: dict[int, sympy.Rational]
    constant: sympy.Rational
    strict: bool
    multipliers: list[sympy.Rational]

    def key(self):
        return (
            tuple(sorted(self.coefficients.items())),
            self.constant,
            self.strict,
        )

    def violated(self) -> bool:
        return self.constant < 0 or (self.strict and self.constant == 0)


def _as_matrix(matrix: Sequence[Sequence], cols: int) -> sympy.Matrix:
    rows = [[sympy.Rational(value) for value in row] for row in matrix]
    if not rows:
        return sympy.zeros(0, cols)
    return sympy.Matrix(rows)


def _combine(
    positive: _Inequality, negative: _Inequality, variable: int
) -> _Inequality:
    a = positive.coefficients[variable]
    b = -negative.coefficients[variable]
    coefficients = {}
    for name in set(positive.coefficients) | set(negative.coefficients):
        if name == variable:
            continue
        value = b * positive.coefficients.get(
            name, 0
        ) + a * negative.coefficients.get(name, 0)
        if value:
            coefficients[name] = value
    return _Inequality(
        coefficients=coefficients,
        constant=b * positive.constant + a * negative.constant,
        strict=positive.strict or negative.strict,
        multipliers=[
            b * p + a * n
            for p, n in zip(
                positive.multipliers, negative.multipliers, strict=True
            )
        ],
    )


def _deduplicated(inequalities: list[_Inequality]) -> list[_Inequality]:
    seen = set()
    kept = []
    for inequality in inequalities:
        key = inequality.key()
        if key not in seen:
            seen.add(key)
            kept.append(inequality)
    return kept


def _choose(lower, lower_strict, upper, upper_strict) -> sympy.Rational:
    if lower is not None and not lower_strict:
        return lower
    if upper is not None and not upper_strict and lower is None:
        return upper
    if lower is not None and upper is not None:
        return (lower + upper) / 2
    if lower is not None:
        return lower + 1
    if upper is not None:
        return upper - 1
    return sympy.Rational(0)


def solve(
    matrix: Sequence[Sequence],
    rhs: Sequence,
    signs: Sequence[VariableSign],
) -> LinearFeasibility:
    """
    Decide whether ``matrix · x = rhs`` has a solution respecting ``signs``.

    Returns a witness ``x`` when feasible and a certificate ``y`` (one
    entry per equation) when not.
    """
    n = len(signs)
    A = _as_matrix(matrix, n)
    b = sympy.Matrix(len(rhs), 1, [sympy.Rational(value) for value in rhs])
    k = A.rows
    live = [j for j, sign in enumerate(signs) if sign != VariableSign.ZERO]
    width = len(live)

    if k:
        A_live = (
            sympy.Matrix.hstack(*[A[:, j] for j in live])
            if live
            else sympy.zeros(k, 0)
        )
        reduced, pivots = A_live.row_join(b).row_join(sympy.eye(k)).rref()
        pivots = [p for p in pivots if p <= width]
    else:
        reduced, pivots = sympy.zeros(0, width + 1), []

    if width in pivots:
        row = pivots.index(width)
        certificate = tuple(-reduced[row, width + 1 + i] for i in range(k))
        logger.debug("Equalities are inconsistent (row %d).", row)
        return LinearFeasibility(feasible=False, certificate=certificate)

    pivot_row = {column: row for row, column in enumerate(pivots)}
    free = [c for c in range(width) if c not in pivot_row]
    zero = sympy.Rational(0)

    inequalities = []
    for c in range(width):
        multipliers = [zero] * width
        multipliers[c] = sympy.Rational(1)
        if c in pivot_row:
            row = pivot_row[c]
            coefficients = {
                f: -reduced[row, f] for f in free if reduced[row, f]
            }
            constant = reduced[row, width]
        else:
            coefficients = {c: sympy.Rational(1)}
            constant = zero
        inequalities.append(
            _Inequality(
                coefficients=coefficients,
                constant=constant,
                strict=signs[live[c]] == VariableSign.POSITIVE,
                multipliers=multipliers,
            )
        )

    def certificate_for(inequality: _Inequality) -> tuple:
        y = [zero] * k
        for column, row in pivot_row.items():
            weight = inequality.multipliers[column]
            if weight:
                for i in range(k):
                    y[i] += weight * reduced[row, width + 1 + i]
        return tuple(y)

    stages = []
    for variable in free:
        constants = [q for q in inequalities if not q.coefficients]
        for inequality in constants:
            if inequality.violated():
                logger.debug("Sign constraints are infeasible.")
                return LinearFeasibility(
                    feasible=False, certificate=certificate_for(inequality)
                )
        inequalities = [q for q in inequalities if q.coefficients]
        stages.append(inequalities)

        positive = [q for q in inequalities if q.coefficients.get(variable, 0) > 0]
        negative = [q for q in inequalities if q.coefficients.get(variable, 0) < 0]
        untouched = [q for q in inequalities if variable not in q.coefficients]
        inequalities = _deduplicated(
            untouched
            + [
                _combine(p, q, variable)
                for p in positive
                for q in negative
            ]
        )
        logger.debug(
            "Eliminated variable %d: %d inequalities remain.",
            variable,
            len(inequalities),
        )

    for inequality in inequalities:
        if not inequality.coefficients and inequality.violated():
            logger.debug("Sign constraints are infeasible.")
            return LinearFeasibility(
                feasible=False, certificate=certificate_for(inequality)
            )

    values: dict[int, sympy.Rational] = {}
    for variable, stage in reversed(list(zip(free, stages, strict=True))):
        lower = upper = None
        lower_strict = upper_strict = False
        for inequality in stage:
            a = inequality.coefficients.get(variable, 0)
            if not a:
                continue
            rest = inequality.constant + sum(
                (
                    value * values[name]
                    for name, value in inequality.coefficients.items()
                    if name != variable
                ),
                zero,
            )
            bound = -rest / a
            if a > 0:
                if lower is None or bound > lower or (
                    bound == lower and inequality.strict
                ):
                    lower, lower_strict = bound, inequality.strict
            elif upper is None or bound < upper or (
                bound == upper and inequality.strict
            ):
                upper, upper_strict = bound, inequality.strict
        values[variable] = _choose(lower, lower_strict, upper, upper_strict)

    local = [zero] * width
    for variable, value in values.items():
        local[variable] = value
    for column, row in pivot_row.items():
        local[column] = reduced[row, width] - sum(
            (reduced[row, f] * values[f] for f in free), zero
        )

    witness = [zero] * n
    for c, j in enumerate(live):
        witness[j] = local[c]
    return LinearFeasibility(feasible=True, witness=tuple(witness))


def verify_witness(
    matrix: Sequence[Sequence],
    rhs: Sequence,
    signs: Sequence[VariableSign],
    witness: Sequence,
) -> bool:
    """Substitute ``witness`` back into the system."""
    x = [sympy.Rational(value) for value in witness]
    if len(x) != len(signs):
        return False
    for value, sign in zip(x, signs, strict=True):
        if sign == VariableSign.ZERO and value != 0:
            return False
        if sign == VariableSign.NONNEG and value < 0:
            return False
        if sign == VariableSign.POSITIVE and value <= 0:
            return False
    return all(
        sum((sympy.Rational(a) * v for a, v in zip(row, x, strict=True)), 0)
        == sympy.Rational(target)
        for row, target in zip(matrix, rhs, strict=True)
    )


def verify_certificate(
    matrix: Sequence[Sequence],
    rhs: Sequence,
    signs: Sequence[VariableSign],
    certificate: Sequence,
) -> bool:
    """Check that ``certificate`` proves the system infeasible."""
    y = [sympy.Rational(value) for value in certificate]
    if len(y) != len(rhs):
        return False
    rows = [[sympy.Rational(a) for a in row] for row in matrix]
    strict_hit = False
    for j, sign in enumerate(signs):
        if sign == VariableSign.ZERO:
            continue
        pairing = sum((y[i] * rows[i][j] for i in range(len(y))), sympy.Rational(0))
        if pairing < 0:
            return False
        if pairing > 0 and sign == VariableSign.POSITIVE:
            strict_hit = True
    value = sum(
        (yi * sympy.Rational(t) for yi, t in zip(y, rhs, strict=True)),
        sympy.Rational(0),
    )
    return value < 0 or (value == 0 and strict_hit)
