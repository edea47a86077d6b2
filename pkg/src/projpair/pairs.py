"""Validated projection pairs and their derived operators.

Given idempotents P and Q on the same space, the derived operators are

    M = P - Q
    S = I - M^2
    U = (I-Q)(I-P) + QP
    V = (I-P)(I-Q) + PQ

linked by the structural identities QU = UP, UV = VU = S and
I - U = (I-2Q)M, which this module verifies at construction time and
exposes as residual checks.  The commutator identity

    [(I-2Q) T M, PV] = T M (I - M^2)

for any T commuting with P and Q is the engine behind the trace results:
instantiating T with partial geometric sums in M^2 writes M - M^n as an
explicit commutator, which forces tr M^n = tr M for odd n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    IdentityViolation,
    NotIdempotent,
    SingularS,
)
from .linalg import Matrix
from .scalars import DEFAULT_POLICY, FLOAT, RATIONAL, Scalar, TolerancePolicy

__all__ = [
    "ProjectionPair",
    "DerivedOps",
    "IdentityCertificate",
    "CentralizerElement",
    "commutator",
    "make_pair",
    "derived_ops",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "commutator_witness",
    "to_float_pair",
]


def commutator(a: Matrix, b: Matrix) -> Matrix:
    """AB - BA."""
    return a * b - b * a


@dataclass(frozen=True)
class ProjectionPair:
    """Two validated idempotent matrices of equal dimension and field."""

    dim: int
    P: Matrix
    Q: Matrix
    field: str
    pol: TolerancePolicy

    def identity(self) -> Matrix:
        return Matrix.identity(self.dim, self.field)


@dataclass(frozen=True)
class IdentityCertificate:
    """Max-norm residuals of the structural identities, per identity."""

    qu_up: Scalar
    uv_s: Scalar
    vu_s: Scalar
    one_minus_u: Scalar

    def max_residual(self) -> float:
        return max(
            float(self.qu_up),
            float(self.uv_s),
            float(self.vu_s),
            float(self.one_minus_u),
        )


@dataclass(frozen=True)
class DerivedOps:
    """The operators derived from a pair, with their identity certificate."""

    M: Matrix
    S: Matrix
    U: Matrix
    V: Matrix
    certificate: IdentityCertificate


def _idempotency_residual(m: Matrix) -> Scalar:
    return (m * m - m).max_norm()


def _identity_tol(pol: TolerancePolicy, dim: int, *mats: Matrix) -> float:
    """Scaled tolerance for a float identity built from the given matrices."""
    biggest = max([1.0] + [float(m.max_norm()) for m in mats])
    return pol.compare_abs_tol * (1.0 + dim * biggest * biggest)


def make_pair(
    P: Matrix, Q: Matrix, pol: TolerancePolicy = DEFAULT_POLICY
) -> ProjectionPair:
    """Validate idempotency and shapes, returning a ProjectionPair.

    Over the rationals idempotency must hold exactly; over floats the
    residual must stay below compare_abs_tol * (1 + max_norm(P)^2).
    """
    if P.field != Q.field:
        raise FieldMismatch(f"P is {P.field}, Q is {Q.field}")
    if not (P.is_square and Q.is_square):
        raise DimensionMismatch("projections must be square")
    if P.rows != Q.rows:
        raise DimensionMismatch(f"dimension mismatch: {P.rows} vs {Q.rows}")
    if P.rows < 1:
        raise DimensionMismatch("dimension must be at least 1")
    for name, m in (("P", P), ("Q", Q)):
        residual = _idempotency_residual(m)
        if m.field == RATIONAL:
            if residual != 0:
                raise NotIdempotent(name, residual)
        else:
            bound = pol.compare_abs_tol * (1.0 + float(m.max_norm()) ** 2)
            if float(residual) > bound:
                raise NotIdempotent(name, residual)
    return ProjectionPair(P.rows, P, Q, P.field, pol)


@lru_cache(maxsize=256)
def derived_ops(pair: ProjectionPair) -> DerivedOps:
    """Compute M, S, U, V and certify the structural identities.

    Raises :class:`IdentityViolation` when a float pair breaks an identity
    beyond tolerance; over the rationals the identities hold exactly for
    every valid pair.
    """
    eye = pair.identity()
    P, Q = pair.P, pair.Q
    M = P - Q
    S = eye - M * M
    U = (eye - Q) * (eye - P) + Q * P
    V = (eye - P) * (eye - Q) + P * Q
    cert = IdentityCertificate(
        qu_up=(Q * U - U * P).max_norm(),
        uv_s=(U * V - S).max_norm(),
        vu_s=(V * U - S).max_norm(),
        one_minus_u=((eye - U) - (eye - 2 * Q) * M).max_norm(),
    )
    if pair.field == RATIONAL:
        if cert.max_residual() != 0.0:
            raise IdentityViolation("exact identity check failed; invalid pair state")
    else:
        allowed = _identity_tol(pair.pol, pair.dim, P, Q, U, V)
        if cert.max_residual() > allowed:
            raise IdentityViolation(
                f"derived-operator identities exceed tolerance "
                f"({cert.max_residual():.3e} > {allowed:.3e})"
            )
    return DerivedOps(M=M, S=S, U=U, V=V, certificate=cert)


@dataclass(frozen=True)
class CentralizerElement:
    """T = sum_j coeffs[j] * (M^2)^j, a polynomial in M^2.

    These are exactly the commuting operators the trace argument needs;
    commutation with P and Q is certified on materialization.
    """

    coeffs: tuple

    @classmethod
    def identity(cls) -> "CentralizerElement":
        return cls((1,))

    @classmethod
    def m_squared(cls) -> "CentralizerElement":
        return cls((0, 1))

    @classmethod
    def geometric_sum(cls, n: int) -> "CentralizerElement":
        """T_n = sum_{j=0}^{(n-3)/2} (M^2)^j for odd n >= 3.

        Satisfies T_n * M * (I - M^2) = M - M^n by telescoping.
        """
        if n % 2 == 0 or n < 3:
            raise ValueError("n must be an odd integer >= 3")
        return cls((1,) * ((n - 3) // 2 + 1))

    def materialize(self, pair: ProjectionPair) -> Matrix:
        """Evaluate the polynomial at M^2 and certify commutation with P, Q."""
        ops = derived_ops(pair)
        m2 = ops.M * ops.M
        eye = pair.identity()
        acc = Matrix.zeros(pair.dim, pair.dim, pair.field)
        power = eye
        for j, c in enumerate(self.coeffs):
            if j > 0:
                power = power * m2
            if c != 0:
                acc = acc + c * power
        res = max(
            float(commutator(acc, pair.P).max_norm()),
            float(commutator(acc, pair.Q).max_norm()),
        )
        if pair.field == RATIONAL:
            if res != 0.0:
                raise IdentityViolation("centralizer element fails to commute")
        else:
            allowed = _identity_tol(pair.pol, pair.dim, acc, pair.P, pair.Q)
            if res > allowed:
                raise IdentityViolation(
                    f"centralizer commutation residual {res:.3e} beyond tolerance"
                )
        return acc


def check_lemma1(pair: ProjectionPair) -> tuple[Scalar, Scalar]:
    """Residual norms (||[M^2, P]||, ||[M^2, Q]||); zero for valid pairs."""
    ops = derived_ops(pair)
    m2 = ops.M * ops.M
    return (
        commutator(m2, pair.P).max_norm(),
        commutator(m2, pair.Q).max_norm(),
    )


def check_lemma2(pair: ProjectionPair, T: CentralizerElement) -> Matrix:
    """Residual of [(I-2Q) T M, P V] = T M (I - M^2); zero matrix when valid."""
    ops = derived_ops(pair)
    eye = pair.identity()
    t = T.materialize(pair)
    lhs = commutator((eye - 2 * pair.Q) * t * ops.M, pair.P * ops.V)
    rhs = t * ops.M * ops.S
    return lhs - rhs


def _s_invertible(pair: ProjectionPair, S: Matrix) -> bool:
    if pair.field == RATIONAL:
        return S.det() != 0
    sv = np.linalg.svd(S.to_numpy(), compute_uv=False)
    if sv.size == 0:
        return False
    # floor at scale one: S comes from unit-scale idempotents, so a
    # numerically-zero S is singular even though its noise singular
    # values are all within a few orders of each other.
    return float(sv[-1]) > pair.pol.rank_rel_tol * max(float(sv[0]), 1.0)


def check_lemma3(pair: ProjectionPair, T: CentralizerElement) -> Matrix:
    """Residual of [(I-2Q) T M (I-M^2)^{-1}, P V] = T M.

    Requires S = I - M^2 invertible; raises :class:`SingularS` otherwise.
    """
    ops = derived_ops(pair)
    if not _s_invertible(pair, ops.S):
        raise SingularS("I - M^2 is not invertible")
    eye = pair.identity()
    t = T.materialize(pair)
    s_inv = ops.S.inverse()
    lhs = commutator((eye - 2 * pair.Q) * t * ops.M * s_inv, pair.P * ops.V)
    rhs = t * ops.M
    return lhs - rhs


def commutator_witness(pair: ProjectionPair, n: int) -> tuple[Matrix, Matrix]:
    """Matrices (A, B) with [A, B] = M - M^n, for odd n >= 3.

    A = (I-2Q) T_n M and B = P V with T_n the geometric sum in M^2.  The
    witness is verified before returning, so trace(M^n) = trace(M) follows
    from tr[A, B] = 0 alone.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("n must be an odd integer >= 3")
    ops = derived_ops(pair)
    eye = pair.identity()
    t = CentralizerElement.geometric_sum(n).materialize(pair)
    a = (eye - 2 * pair.Q) * t * ops.M
    b = pair.P * ops.V
    expected = ops.M - ops.M**n
    residual = (commutator(a, b) - expected).max_norm()
    if pair.field == RATIONAL:
        if residual != 0:
            raise IdentityViolation("commutator witness failed exactly")
    else:
        allowed = _identity_tol(pair.pol, pair.dim, a, b, expected)
        if float(residual) > allowed:
            raise IdentityViolation(
                f"commutator witness residual {float(residual):.3e} beyond tolerance"
            )
    return a, b


def to_float_pair(
    pair: ProjectionPair, pol: TolerancePolicy | None = None
) -> ProjectionPair:
    """Convert a rational pair to the float field (idempotency revalidated)."""
    if pair.field == FLOAT:
        return pair
    return make_pair(pair.P.to_float(), pair.Q.to_float(), pol or pair.pol)
