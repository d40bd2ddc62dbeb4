"""
The comparison certificate between [μ⁻¹(ξ)/ker β̄] and [ℂᵐ_Σ/H(β)].

Each check stores the exact evidence it was decided on (witnesses,
infeasibility certificates, Jacobian determinants) so that
``verify_certificate`` can re-check a certificate by substitution alone.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace

import sympy

from .exactalg import (
    FinAbGroup,
    IntMatrix,
    dualize,
    integer_kernel,
    row_spaces_equal,
)
from .exceptions import PipelineError, ToristackError, ValidationFailed
from .fan import (
    DEFAULT_COMPLETENESS_MAX_DIM,
    DEFAULT_MAX_RAYS,
    ZeroPattern,
    admissible_patterns,
    validate_fan,
)
from .momentred import (
    FeasibilityResult,
    LevelConvention,
    MomentData,
    PatternCheck,
    check_regular_value,
    level_set_feasibility,
    level_set_in_Cm,
    moment_data,
)
from .polytope import LabelledPolytope, normal_fan, validate_polytope
from .stackbuild import (
    DiagGroupPresentation,
    StackyFan,
    build_H,
    build_kerbar,
    isotropy,
)

logger = logging.getLogger(__name__)

REMARKS = (
    "The isomorphism of the two quotient stacks is equivariant for the "
    "action of the torus; recorded, not verified.",
    "The isomorphism descends to a homeomorphism of the coarse moduli "
    "spaces; recorded, not verified.",
    "(M1') is certified infinitesimally; the global step follows from the "
    "classical toric case by log-linear convexity of the scaling orbits.",
)


@dataclass(frozen=True)
class Splitting:
    """coker β* = ℤ^l ⊕ T, so H = G × C_ℝ with C_ℝ ≅ ℝ^l."""

    free_rank: int
    torsion: tuple[int, ...]
    scaling_exponents: IntMatrix
    algebraic: DiagGroupPresentation
    compact: DiagGroupPresentation
    consistent: bool


@dataclass(frozen=True)
class JacobianEvidence:
    pattern: ZeroPattern
    witness: tuple[sympy.Rational, ...] | None
    jacobian: tuple[tuple[sympy.Rational, ...], ...] | None
    determinant: sympy.Rational | None

    @property
    def nonsingular(self) -> bool:
        return self.determinant is not None and self.determinant != 0


@dataclass(frozen=True)
class M1PrimeResult:
    passed: bool
    offending: ZeroPattern | None
    evidence: tuple[JacobianEvidence, ...]


@dataclass(frozen=True)
class IsotropyMatch:
    pattern: ZeroPattern
    symplectic: FinAbGroup
    complex: FinAbGroup
    match: bool


@dataclass(frozen=True)
class MoritaCertificate:
    stacky_fan: StackyFan
    moment: MomentData
    splitting: Splitting
    mu_independent: bool
    regular_value: PatternCheck
    level_in_V: PatternCheck
    m1_prime: M1PrimeResult
    m2: PatternCheck
    isotropy_table: tuple[IsotropyMatch, ...]
    evidence_verified: bool
    verdict: bool
    remarks: tuple[str, ...] = REMARKS


def check_splitting(stacky_fan: StackyFan) -> Splitting:
    algebraic = build_H(stacky_fan)
    compact = build_kerbar(stacky_fan)
    scaling = algebraic.exponents.select_columns(range(algebraic.free_rank))
    consistent = (
        algebraic.data() == compact.data()
        and algebraic.free_rank == stacky_fan.m - stacky_fan.dim
        and algebraic.is_injective()
    )
    return Splitting(
        free_rank=algebraic.free_rank,
        torsion=algebraic.torsion,
        scaling_exponents=scaling,
        algebraic=algebraic,
        compact=compact,
        consistent=consistent,
    )


def check_mu_independence(stacky_fan: StackyFan) -> bool:
    """
    Compare the reduction data of ``stacky_fan`` with its trivially
    labelled fan under the rescaling diag(n) of (ℚᵐ)*.
    """
    trivial = stacky_fan.with_trivial_labels()
    scale = sympy.diag(*stacky_fan.labels)
    beta_star = stacky_fan.beta.T.to_sympy()
    beta0_star = trivial.beta.T.to_sympy()
    images = row_spaces_equal((scale * beta0_star).T, beta_star.T)

    iota = integer_kernel(stacky_fan.beta).T.to_sympy()
    iota0 = integer_kernel(trivial.beta).T.to_sympy()
    kernels = row_spaces_equal(iota * scale, iota0)

    projection = dualize(stacky_fan.beta)[1].free_rows().to_sympy()
    projection0 = dualize(trivial.beta)[1].free_rows().to_sympy()
    target = projection * scale
    try:
        solution, parameters = projection0.T.gauss_jordan_solve(target.T)
    except ValueError:
        return False
    if parameters.rows:
        solution = solution.xreplace({p: 0 for p in parameters})
    psi = solution.T
    quotients = (
        psi.rows == psi.cols
        and (psi.rows == 0 or psi.det() != 0)
        and psi * projection0 == target
    )
    if not (images and kernels and quotients):
        logger.warning(
            "Reduction data depends on the labels %s", stacky_fan.labels
        )
    return images and kernels and quotients


def jacobian(
    moment: MomentData,
    scaling_exponents: IntMatrix,
    witness: Sequence,
) -> sympy.Matrix:
    """d(ι*·r)/dc for r_j scaled by exp(2⟨a_j, c⟩), at c = 0."""
    weights = sympy.diag(*[2 * sympy.Rational(r) for r in witness])
    return moment.iota_star.to_sympy() * weights * scaling_exponents.to_sympy()


def _sweep(
    moment: MomentData, patterns: Sequence[ZeroPattern], jobs: int
) -> list[FeasibilityResult]:
    def run(pattern):
        return level_set_feasibility(moment, pattern, strict=True)

    if jobs > 1 and len(patterns) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, patterns))
    return [run(pattern) for pattern in patterns]


def check_M1_prime(
    stacky_fan: StackyFan,
    moment: MomentData,
    *,
    strict_results: Sequence[FeasibilityResult] | None = None,
    max_rays: int = DEFAULT_MAX_RAYS,
) -> M1PrimeResult:
    """
    The scaling directions C_ℝ leave the level set transversally at every
    feasible admissible pattern.
    """
    scaling = check_splitting(stacky_fan).scaling_exponents
    if strict_results is None:
        strict_results = _sweep(
            moment,
            admissible_patterns(stacky_fan.fan, max_rays=max_rays),
            jobs=1,
        )

    evidence = []
    offending = None
    for result in strict_results:
        if not result.feasible:
            if not level_set_feasibility(moment, result.pattern).feasible:
                continue
            evidence.append(JacobianEvidence(result.pattern, None, None, None))
        else:
            matrix = jacobian(moment, scaling, result.witness)
            evidence.append(
                JacobianEvidence(
                    pattern=result.pattern,
                    witness=result.witness,
                    jacobian=tuple(
                        tuple(matrix.row(k)) for k in range(matrix.rows)
                    ),
                    determinant=sympy.Rational(matrix.det()),
                )
            )
        if not evidence[-1].nonsingular and offending is None:
            offending = result.pattern
    if offending is not None:
        logger.warning("(M1') fails at pattern %s", offending)
    return M1PrimeResult(offending is None, offending, tuple(evidence))


def check_M2(
    stacky_fan: StackyFan,
    moment: MomentData,
    *,
    strict_results: Sequence[FeasibilityResult] | None = None,
    max_rays: int = DEFAULT_MAX_RAYS,
) -> PatternCheck:
    """Every H-orbit of ℂᵐ_Σ meets the level set."""
    if strict_results is None:
        strict_results = _sweep(
            moment,
            admissible_patterns(stacky_fan.fan, max_rays=max_rays),
            jobs=1,
        )
    offending = next(
        (result.pattern for result in strict_results if not result.feasible),
        None,
    )
    if offending is not None:
        logger.warning("(M2) fails: pattern %s misses the level set", offending)
    return PatternCheck(offending is None, offending, tuple(strict_results))


def isotropy_table(
    algebraic: DiagGroupPresentation,
    compact: DiagGroupPresentation,
    patterns: Sequence[ZeroPattern],
) -> tuple[IsotropyMatch, ...]:
    table = []
    for pattern in patterns:
        symplectic = isotropy(compact, pattern).group
        complex_side = isotropy(algebraic, pattern).group
        table.append(
            IsotropyMatch(
                pattern=pattern,
                symplectic=symplectic,
                complex=complex_side,
                match=symplectic == complex_side,
            )
        )
    return tuple(table)


def verify_certificate(certificate: MoritaCertificate) -> bool:
    """Re-check every stored witness, certificate and determinant."""
    moment = certificate.moment
    for check in (
        certificate.regular_value,
        certificate.level_in_V,
        certificate.m2,
    ):
        if not all(result.verify(moment) for result in check.evidence):
            return False

    scaling = certificate.splitting.scaling_exponents
    for item in certificate.m1_prime.evidence:
        if item.witness is None:
            continue
        strict = FeasibilityResult(
            pattern=item.pattern,
            feasible=True,
            witness=item.witness,
            strict=True,
        )
        if not strict.verify(moment):
            return False
        matrix = jacobian(moment, scaling, item.witness)
        rows = tuple(tuple(matrix.row(k)) for k in range(matrix.rows))
        if rows != item.jacobian:
            return False
        if sympy.Rational(matrix.det()) != item.determinant:
            return False
    return all(
        entry.match == (entry.symplectic == entry.complex)
        for entry in certificate.isotropy_table
    )


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except ToristackError as error:
        raise PipelineError(name, error) from error


def certify(
    stacky_fan: StackyFan,
    *,
    convention: LevelConvention = LevelConvention.WEIGHTED,
    jobs: int = 1,
    max_rays: int = DEFAULT_MAX_RAYS,
    assume_complete: bool = False,
    completeness_max_dim: int = DEFAULT_COMPLETENESS_MAX_DIM,
) -> MoritaCertificate:
    """Run every check on a stacky fan that carries support numbers."""
    with _stage("fan"):
        report = validate_fan(
            stacky_fan.fan,
            assume_complete=assume_complete,
            completeness_max_dim=completeness_max_dim,
        )
        if not report.ok:
            raise ValidationFailed(report)
        patterns = admissible_patterns(stacky_fan.fan, max_rays=max_rays)
    with _stage("groups"):
        splitting = check_splitting(stacky_fan)
        mu_independent = check_mu_independence(stacky_fan)
    with _stage("moment"):
        moment = moment_data(stacky_fan, convention)
    with _stage("checks"):
        regular = check_regular_value(moment, stacky_fan.fan)
        inclusion = level_set_in_Cm(moment, stacky_fan.fan, max_rays=max_rays)
        strict_results = _sweep(moment, patterns, jobs)
        m1_prime = check_M1_prime(
            stacky_fan, moment, strict_results=strict_results
        )
        m2 = check_M2(stacky_fan, moment, strict_results=strict_results)
        table = isotropy_table(splitting.algebraic, splitting.compact, patterns)

    certificate = MoritaCertificate(
        stacky_fan=stacky_fan,
        moment=moment,
        splitting=splitting,
        mu_independent=mu_independent,
        regular_value=regular,
        level_in_V=inclusion,
        m1_prime=m1_prime,
        m2=m2,
        isotropy_table=table,
        evidence_verified=False,
        verdict=False,
    )
    verified = verify_certificate(certificate)
    verdict = (
        splitting.consistent
        and mu_independent
        and regular.passed
        and inclusion.passed
        and m1_prime.passed
        and m2.passed
        and all(entry.match for entry in table)
        and verified
    )
    logger.info("Certificate for %d rays: verdict %s", stacky_fan.m, verdict)
    return replace(certificate, evidence_verified=verified, verdict=verdict)


def morita_certificate(
    polytope: LabelledPolytope,
    *,
    convention: LevelConvention = LevelConvention.WEIGHTED,
    jobs: int = 1,
    max_rays: int = DEFAULT_MAX_RAYS,
    assume_complete: bool = False,
    completeness_max_dim: int = DEFAULT_COMPLETENESS_MAX_DIM,
) -> MoritaCertificate:
    """The full pipeline from a labelled polytope to its certificate."""
    with _stage("validate"):
        report = validate_polytope(polytope)
        if not report.ok:
            raise ValidationFailed(report)
    with _stage("normal_fan"):
        stacky_fan = normal_fan(polytope)
    return certify(
        stacky_fan,
        convention=convention,
        jobs=jobs,
        max_rays=max_rays,
        assume_complete=assume_complete,
        completeness_max_dim=completeness_max_dim,
    )
