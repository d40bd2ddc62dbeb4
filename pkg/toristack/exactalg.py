"""
Exact integer and rational linear algebra.

Integer matrices are immutable row-major tuples of Python ints, so every
computation is exact and arbitrary precision. Rational work (ranks, row
spaces) goes through sympy matrices.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import prod

import sympy

from .exceptions import NonFiniteCokernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntMatrix:
    """An exact integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("Matrix dimensions must be nonnegative.")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"Expected {self.rows * self.cols} entries, "
                f"got {len(self.entries)}."
            )
        object.__setattr__(
            self, "entries", tuple(int(value) for value in self.entries)
        )

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], cols: int | None = None
    ) -> "IntMatrix":
        rows = [tuple(row) for row in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols is required for a matrix with no rows.")
            cols = len(rows[0])
        if any(len(row) != cols for row in rows):
            raise ValueError("All rows must have the same length.")
        return cls(len(rows), cols, tuple(v for row in rows for v in row))

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[int]], rows: int | None = None
    ) -> "IntMatrix":
        columns = [tuple(column) for column in columns]
        if rows is None:
            if not columns:
                raise ValueError("rows is required for a matrix with no columns.")
            rows = len(columns[0])
        return cls.from_rows(
            [[column[i] for column in columns] for i in range(rows)],
            cols=len(columns),
        )

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(
            n,
            n,
            tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)),
        )

    @classmethod
    def from_sympy(cls, matrix: sympy.Matrix) -> "IntMatrix":
        return cls(
            matrix.rows, matrix.cols, tuple(int(value) for value in matrix)
        )

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(
                self.entries[i * self.cols + j]
                for j in range(self.cols)
                for i in range(self.rows)
            ),
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"Cannot multiply {self.rows}x{self.cols} "
                f"by {other.rows}x{other.cols}."
            )
        other_columns = other.columns()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(
                sum(a * b for a, b in zip(self.row(i), column, strict=True))
                for i in range(self.rows)
                for column in other_columns
            ),
        )

    def apply(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Multiply the matrix by a column vector."""
        return tuple(
            sum(a * b for a, b in zip(self.row(i), vector, strict=True))
            for i in range(self.rows)
        )

    def select_columns(self, indices: Iterable[int]) -> "IntMatrix":
        indices = list(indices)
        return IntMatrix.from_rows(
            [[self[i, j] for j in indices] for i in range(self.rows)],
            cols=len(indices),
        )

    def select_rows(self, indices: Iterable[int]) -> "IntMatrix":
        return IntMatrix.from_rows(
            [self.row(i) for i in indices], cols=self.cols
        )

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("Row counts differ.")
        return IntMatrix.from_rows(
            [self.row(i) + other.row(i) for i in range(self.rows)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("Column counts differ.")
        return IntMatrix(
            self.rows + other.rows, self.cols, self.entries + other.entries
        )

    def to_sympy(self) -> sympy.Matrix:
        if not self.rows or not self.cols:
            return sympy.zeros(self.rows, self.cols)
        return sympy.Matrix(self.to_rows())

    def determinant(self) -> int:
        if self.rows != self.cols:
            raise ValueError("Determinant of a non-square matrix.")
        if not self.rows:
            return 1
        return int(self.to_sympy().det(method="bareiss"))

    def rank(self) -> int:
        return smith_normal_form(self).rank

    def __str__(self):
        return str(self.to_rows())


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for factor in self.invariant_factors if factor)


@dataclass(frozen=True)
class FinAbGroup:
    """
    A finitely generated abelian group ℤ^free_rank ⊕ ℤ_t1 ⊕ … ⊕ ℤ_tk.

    The torsion list is the invariant-factor chain (every entry ≥ 2, each
    dividing the next), so two groups are isomorphic iff they compare equal.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        torsion = tuple(int(t) for t in self.torsion)
        object.__setattr__(self, "torsion", torsion)
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative.")
        if any(t < 2 for t in torsion):
            raise ValueError(f"Torsion factors must be >= 2, got {torsion}.")
        if any(b % a for a, b in zip(torsion, torsion[1:])):
            raise ValueError(f"Torsion {torsion} is not a divisibility chain.")

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls()

    @classmethod
    def from_invariant_factors(
        cls, factors: Iterable[int], extra_free: int = 0
    ) -> "FinAbGroup":
        """
        The cokernel of a diagonal map with the given invariant factors,
        plus ``extra_free`` generators that the map does not hit at all.
        """
        factors = list(factors)
        return cls(
            free_rank=extra_free + sum(1 for f in factors if f == 0),
            torsion=tuple(f for f in factors if f >= 2),
        )

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "FinAbGroup":
        """The direct sum ⊕ ℤ_n in canonical form (n = 0 means ℤ)."""
        orders = list(orders)
        return cokernel(IntMatrix.diagonal(orders)).group

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """The group order, or ``None`` for an infinite group."""
        if not self.is_finite:
            return None
        return prod(self.torsion)

    def __str__(self):
        parts = [f"Z{t}" for t in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class CokernelPresentation:
    """
    The quotient map ℤ^t → coker(A) in the canonical SNF basis.

    ``projection`` has one row per generator of ``group``: torsion
    generators first (entries reduced modulo their order), then the free
    generators.
    """

    group: FinAbGroup
    projection: IntMatrix

    @property
    def moduli(self) -> tuple[int, ...]:
        """Order of each generator, 0 for the free ones."""
        return self.group.torsion + (0,) * self.group.free_rank

    def torsion_rows(self) -> IntMatrix:
        return self.projection.select_rows(range(len(self.group.torsion)))

    def free_rows(self) -> IntMatrix:
        start = len(self.group.torsion)
        return self.projection.select_rows(
            range(start, start + self.group.free_rank)
        )

    def image(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Image of a lattice vector, torsion coordinates reduced."""
        return tuple(
            value % modulus if modulus else value
            for value, modulus in zip(
                self.projection.apply(vector), self.moduli, strict=True
            )
        )

    def relation_matrix(self) -> IntMatrix:
        """The block ``[projection | relations]`` presenting its image."""
        relations = IntMatrix.from_rows(
            [
                [self.moduli[i] if i == k else 0 for k in range(len(self.group.torsion))]
                for i in range(self.projection.rows)
            ],
            cols=len(self.group.torsion),
        )
        return self.projection.hstack(relations)

    def is_surjective(self) -> bool:
        block = self.relation_matrix()
        snf = smith_normal_form(block)
        return snf.rank == block.rows and all(
            factor == 1 for factor in snf.invariant_factors[: block.rows]
        )


def _swap_rows(matrix: list[list[int]], i: int, j: int) -> None:
    if i != j:
        matrix[i], matrix[j] = matrix[j], matrix[i]


def _swap_columns(matrix: list[list[int]], i: int, j: int) -> None:
    if i != j:
        for row in matrix:
            row[i], row[j] = row[j], row[i]


def _add_row(matrix: list[list[int]], src: int, dst: int, factor: int) -> None:
    source = matrix[src]
    matrix[dst] = [a + factor * b for a, b in zip(matrix[dst], source)]


def _add_column(
    matrix: list[list[int]], src: int, dst: int, factor: int
) -> None:
    for row in matrix:
        row[dst] += factor * row[src]


def _smallest_entry(
    matrix: list[list[int]], start: int
) -> tuple[int, int] | None:
    best = None
    for i in range(start, len(matrix)):
        for j in range(start, len(matrix[i])):
            value = abs(matrix[i][j])
            if value and (best is None or value < best[0]):
                best = (value, i, j)
                if value == 1:
                    return i, j
    return None if best is None else (best[1], best[2])


def _first_indivisible(
    matrix: list[list[int]], start: int, pivot: int
) -> int | None:
    for i in range(start + 1, len(matrix)):
        for j in range(start + 1, len(matrix[i])):
            if matrix[i][j] % pivot:
                return i
    return None


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """
    Diagonalize ``A`` over ℤ.

    Each step moves the nonzero entry of least absolute value to the pivot
    position and reduces its row and column by it, so the pivot strictly
    decreases until it divides everything it touches.
    """
    S = A.to_rows()
    U = IntMatrix.identity(A.rows).to_rows()
    V = IntMatrix.identity(A.cols).to_rows()
    # column operations on V are recorded on its transpose as row operations
    Vt = [list(row) for row in zip(*V, strict=True)] if V else []

    for t in range(min(A.rows, A.cols)):
        pivot_found = False
        while True:
            position = _smallest_entry(S, t)
            if position is None:
                break
            pivot_found = True
            i, j = position
            _swap_rows(S, t, i)
            _swap_rows(U, t, i)
            _swap_columns(S, t, j)
            _swap_rows(Vt, t, j)

            pivot = S[t][t]
            clear = True
            for i in range(t + 1, A.rows):
                quotient = S[i][t] // pivot
                if quotient:
                    _add_row(S, t, i, -quotient)
                    _add_row(U, t, i, -quotient)
                clear = clear and S[i][t] == 0
            for j in range(t + 1, A.cols):
                quotient = S[t][j] // pivot
                if quotient:
                    _add_column(S, t, j, -quotient)
                    _add_row(Vt, t, j, -quotient)
                clear = clear and S[t][j] == 0
            if not clear:
                continue

            offender = _first_indivisible(S, t, pivot)
            if offender is None:
                break
            _add_row(S, offender, t, 1)
            _add_row(U, offender, t, 1)

        if not pivot_found:
            break
        if S[t][t] < 0:
            S[t] = [-value for value in S[t]]
            U[t] = [-value for value in U[t]]

    V = [list(row) for row in zip(*Vt, strict=True)] if Vt else []
    factors = tuple(S[i][i] for i in range(min(A.rows, A.cols)))
    logger.debug(
        "SNF of %dx%d matrix: invariant factors %s", A.rows, A.cols, factors
    )
    return SmithDecomposition(
        U=IntMatrix.from_rows(U, cols=A.rows),
        S=IntMatrix.from_rows(S, cols=A.cols),
        V=IntMatrix.from_rows(V, cols=A.cols),
        invariant_factors=factors,
    )


def _sign_normalized(vector: Sequence[int]) -> tuple[int, ...]:
    """Flip the sign so the first nonzero entry is positive."""
    for value in vector:
        if value:
            return tuple(vector) if value > 0 else tuple(-v for v in vector)
    return tuple(vector)


def cokernel(A: IntMatrix) -> CokernelPresentation:
    """
    The cokernel ℤ^rows / im(A) with its quotient map.

    Rows of ``U`` whose invariant factor is 1 are dropped, torsion rows are
    reduced modulo their factor, and free rows are sign-normalized.
    """
    snf = smith_normal_form(A)
    factors = list(snf.invariant_factors) + [0] * (A.rows - len(snf.invariant_factors))

    torsion_rows = []
    torsion = []
    free_rows = []
    for i, factor in enumerate(factors):
        row = snf.U.row(i)
        if factor == 1:
            continue
        if factor == 0:
            free_rows.append(_sign_normalized(row))
        else:
            torsion.append(factor)
            torsion_rows.append(tuple(value % factor for value in row))

    group = FinAbGroup(free_rank=len(free_rows), torsion=tuple(torsion))
    projection = IntMatrix.from_rows(torsion_rows + free_rows, cols=A.rows)
    return CokernelPresentation(group=group, projection=projection)


def integer_kernel(A: IntMatrix) -> IntMatrix:
    """A saturated ℤ-basis of ker(A), one basis vector per column."""
    snf = smith_normal_form(A)
    basis = [
        _sign_normalized(snf.V.column(j)) for j in range(snf.rank, A.cols)
    ]
    return IntMatrix.from_columns(basis, rows=A.cols)


def dualize(beta: IntMatrix) -> tuple[IntMatrix, CokernelPresentation]:
    """
    Dualize β: ℤ^m → N into β*: M → (ℤ^m)* and β^∨: (ℤ^m)* → coker β*.

    Requires coker(β) finite, i.e. rank(β) equal to the rank of N.
    """
    rank = smith_normal_form(beta).rank
    if rank < beta.rows:
        raise NonFiniteCokernel(
            f"rank {rank} is smaller than the lattice rank {beta.rows}; "
            "the rays do not span the lattice rationally."
        )
    beta_star = beta.T
    return beta_star, cokernel(beta_star)


def lattice_contains(B: IntMatrix, vector: Sequence[int]) -> bool:
    """Whether ``vector`` is an integer combination of the columns of ``B``."""
    snf = smith_normal_form(B)
    image = snf.U.apply(vector)
    for i, value in enumerate(image):
        factor = snf.invariant_factors[i] if i < len(snf.invariant_factors) else 0
        if factor == 0:
            if value:
                return False
        elif value % factor:
            return False
    return True


def projection_kernel(presentation: CokernelPresentation) -> IntMatrix:
    """
    Generators (as columns) of the kernel of a cokernel projection.

    A vector y lies in the kernel iff the free coordinates of P·y vanish and
    each torsion coordinate is a multiple of its order; the torsion
    multiples are extra unknowns and are dropped from the kernel basis.
    """
    block = presentation.relation_matrix()
    kernel = integer_kernel(block)
    width = presentation.projection.cols
    return IntMatrix.from_rows(
        [kernel.row(i) for i in range(width)], cols=kernel.cols
    )


def rational_rank(matrix: sympy.Matrix) -> int:
    if not matrix.rows or not matrix.cols:
        return 0
    return matrix.rank()


def row_space_contains(space: sympy.Matrix, rows: sympy.Matrix) -> bool:
    """Whether every row of ``rows`` lies in the rational row space of ``space``."""
    if space.cols != rows.cols:
        return False
    return rational_rank(space) == rational_rank(space.col_join(rows))


def row_spaces_equal(first: sympy.Matrix, second: sympy.Matrix) -> bool:
    """Mutual containment of the rational row spaces."""
    return row_space_contains(first, second) and row_space_contains(
        second, first
    )
