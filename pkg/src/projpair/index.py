"""Eigenspace dimensions, odd-power traces, and the full equality report.

For an idempotent pair the trace of (P - Q)^n is the same integer for
every odd n, and that integer counts eigenvectors two ways:

    tr M^n = dim E10 - dim Et01 = dim Et10 - dim E01

where E_ab is the joint eigenspace {x : Px = ax, Qx = bx} and Et_ab its
analogue for the transposed pair.  The report recomputes the whole chain
of equalities behind that statement on a concrete pair, one named verdict
per step, so a failure pinpoints the exact link that broke.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import EigensolverFailure, FieldMismatch, ProjpairError
from .fitting import FittingDecomposition, fitting_decomposition
from .linalg import Matrix, Subspace, kernel_basis, rank, subspace_intersection, trace
from .pairs import ProjectionPair, derived_ops
from .scalars import FLOAT, RATIONAL, Scalar, scalar_to_json

__all__ = [
    "EigenspaceSet",
    "IndexReport",
    "SpectrumReport",
    "compute_eigenspaces",
    "dual_eigenspace",
    "eigenspace",
    "index_report",
    "spectrum_symmetry_check",
    "trace_power",
]

_DIM_KEYS = ("e10", "e01", "e11", "e00", "et10", "et01", "et11", "et00")


def eigenspace(pair: ProjectionPair, a: int, b: int) -> Subspace:
    """Joint eigenspace ker(P - aI) intersect ker(Q - bI), a, b in {0, 1}."""
    if a not in (0, 1) or b not in (0, 1):
        raise ProjpairError(f"eigenvalue labels must be 0 or 1, got ({a}, {b})")
    eye = pair.identity()
    # floor=1.0: P - aI is built from unit-scale idempotents, so when it
    # degenerates to the zero matrix the kernel must be everything.
    left = kernel_basis(pair.P - a * eye, pair.pol, floor=1.0)
    right = kernel_basis(pair.Q - b * eye, pair.pol, floor=1.0)
    return subspace_intersection(left, right)


def dual_eigenspace(pair: ProjectionPair, a: int, b: int) -> Subspace:
    """Joint eigenspace of the transposed pair; the finite-dimensional dual."""
    if a not in (0, 1) or b not in (0, 1):
        raise ProjpairError(f"eigenvalue labels must be 0 or 1, got ({a}, {b})")
    eye = pair.identity()
    left = kernel_basis(pair.P.transpose() - a * eye, pair.pol, floor=1.0)
    right = kernel_basis(pair.Q.transpose() - b * eye, pair.pol, floor=1.0)
    return subspace_intersection(left, right)


@dataclass(frozen=True)
class EigenspaceSet:
    """All four joint eigenspaces and their transposed-pair duals."""

    E10: Subspace
    E01: Subspace
    E11: Subspace
    E00: Subspace
    Et10: Subspace
    Et01: Subspace
    Et11: Subspace
    Et00: Subspace

    def dims(self) -> dict[str, int]:
        return {
            "e10": self.E10.dim,
            "e01": self.E01.dim,
            "e11": self.E11.dim,
            "e00": self.E00.dim,
            "et10": self.Et10.dim,
            "et01": self.Et01.dim,
            "et11": self.Et11.dim,
            "et00": self.Et00.dim,
        }


def compute_eigenspaces(pair: ProjectionPair) -> EigenspaceSet:
    return EigenspaceSet(
        E10=eigenspace(pair, 1, 0),
        E01=eigenspace(pair, 0, 1),
        E11=eigenspace(pair, 1, 1),
        E00=eigenspace(pair, 0, 0),
        Et10=dual_eigenspace(pair, 1, 0),
        Et01=dual_eigenspace(pair, 0, 1),
        Et11=dual_eigenspace(pair, 1, 1),
        Et00=dual_eigenspace(pair, 0, 0),
    )


def trace_power(pair: ProjectionPair, n: int) -> Scalar:
    """tr (P - Q)^n for n >= 1, exact over the rationals."""
    if n < 1:
        raise ProjpairError(f"power must be >= 1, got {n}")
    return trace(derived_ops(pair).M ** n)


def _odd_power_traces(m: Matrix, ns: tuple[int, ...]) -> dict[int, Scalar]:
    """Traces of m^n for the given odd n, sharing work between powers."""
    out: dict[int, Scalar] = {}
    if not ns:
        return out
    if m.rows == 0:
        zero = trace(m)
        return {n: zero for n in ns}
    m2 = m * m
    cur = m
    p = 1
    for n in sorted(ns):
        while p < n:
            cur = cur * m2
            p += 2
        out[n] = trace(cur)
    return out


def _close(pair: ProjectionPair, x: Scalar, y: Scalar) -> bool:
    if pair.field == RATIONAL:
        return x == y
    scale = max(1.0, abs(float(x)), abs(float(y)))
    return abs(float(x) - float(y)) <= pair.pol.compare_abs_tol * scale


def _is_integer(pair: ProjectionPair, x: Scalar) -> bool:
    if pair.field == RATIONAL:
        return x.denominator == 1
    return abs(float(x) - round(float(x))) <= pair.pol.compare_abs_tol * max(
        1.0, abs(float(x))
    )


@dataclass(frozen=True)
class IndexReport:
    """Traces, dimensions, and one boolean per asserted equality.

    intermediates records the two mixed-image dimensions
    dim((I-P)F + QF) and dim(PF + (I-Q)F) that the counting identities
    hinge on, so a failed verdict can be diagnosed from the report alone.
    """

    dim: int
    field: str
    odd_ns: tuple[int, ...]
    traces: dict[int, Scalar]
    trace_MF: Scalar
    traces_MF: dict[int, Scalar]
    traces_MY: dict[int, Scalar]
    dims: dict[str, int]
    fitting_k: int
    dim_F: int
    dim_Y: int
    index: int
    intermediates: dict[str, int]
    verdicts: dict[str, bool]

    @property
    def all_verdicts_true(self) -> bool:
        return all(self.verdicts.values())

    def failed_verdicts(self) -> list[str]:
        return [name for name, ok in self.verdicts.items() if not ok]

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "ns": list(self.odd_ns),
            "traces": {
                str(n): scalar_to_json(self.traces[n], self.field) for n in self.odd_ns
            },
            "dims": {key: self.dims[key] for key in _DIM_KEYS},
            "fitting": {"k": self.fitting_k, "dimF": self.dim_F, "dimY": self.dim_Y},
            "verdicts": dict(sorted(self.verdicts.items())),
        }

    def to_json(self) -> str:
        # sort_keys + fixed separators: identical input bytes in, identical
        # report bytes out, which the CLI contract relies on.
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def _mixed_image_dim(
    f: Subspace, left: Matrix, right: Matrix, pair: ProjectionPair
) -> int:
    """dim(left @ F + right @ F) for a subspace F given by its basis.

    floor=1.0 because either product can legitimately be the zero matrix
    (a projection annihilating F), and noise must not count as rank.
    """
    if f.dim == 0:
        return 0
    return rank((left * f.basis).hstack(right * f.basis), pair.pol, floor=1.0)


def index_report(pair: ProjectionPair, odd_ns: tuple[int, ...] = (1, 3, 5)) -> IndexReport:
    """Verify the whole trace/dimension chain on one pair.

    Verdicts, in the order the equalities are derived:

    - trace_split: tr M^n = tr M_F^n + tr M_Y^n for each n (block traces
      add over the two invariant parts).
    - trace_y_zero: tr M_Y^n = 0 (on Y the operator S = I - M^2 is
      invertible, and the commutator witness built from S^-1 exhibits
      M_Y^n as a commutator, which is traceless).
    - trace_f_constant: tr M_F^n = tr M_F (S is nilpotent on F, so the
      correction terms M_F - M_F^n are commutators there).
    - trace_f_rank_gap: tr M_F = tr P_F - tr Q_F.
    - counting_identity: tr P_F - tr Q_F = dim F - dim((I-P)F + QF) - dim E01.
    - dual_identification: dim F - dim((I-P)F + QF) = dim Et10.
    - counting_identity_mirror / dual_identification_mirror: the same two
      steps with the roles of the pair and its transpose exchanged,
      using dim(PF + (I-Q)F) and Et01.
    - index_formula_dual10: tr M^n = dim Et10 - dim E01.
    - index_formula_e10: tr M^n = dim E10 - dim Et01.
    - integer_trace: each tr M^n is an integer (denominator one after
      reduction; nearest-integer within tolerance over floats).
    - balance: dim E10 - dim Et01 = dim Et10 - dim E01.
    """
    ns = tuple(odd_ns)
    if not ns:
        raise ProjpairError("need at least one power n")
    for n in ns:
        if n < 1 or n % 2 == 0:
            raise ProjpairError(f"powers must be odd and >= 1, got {n}")

    ops = derived_ops(pair)
    fd = fitting_decomposition(pair)
    spaces = compute_eigenspaces(pair)
    dims = spaces.dims()
    eye = pair.identity()

    traces = _odd_power_traces(ops.M, ns)
    traces_mf = _odd_power_traces(fd.M_F, ns)
    traces_my = _odd_power_traces(fd.M_Y, ns)
    trace_mf = trace(fd.M_F)
    trace_pf = trace(fd.P_F)
    trace_qf = trace(fd.Q_F)

    codim_raw = _mixed_image_dim(fd.F, eye - pair.P, pair.Q, pair)
    codim_mirror_raw = _mixed_image_dim(fd.F, pair.P, eye - pair.Q, pair)
    gap = fd.F.dim - codim_raw
    gap_mirror = fd.F.dim - codim_mirror_raw

    verdicts: dict[str, bool] = {}
    verdicts["trace_split"] = all(
        _close(pair, traces[n], traces_mf[n] + traces_my[n]) for n in ns
    )
    verdicts["trace_y_zero"] = all(_close(pair, traces_my[n], 0) for n in ns)
    verdicts["trace_f_constant"] = all(
        _close(pair, traces_mf[n], trace_mf) for n in ns
    )
    verdicts["trace_f_rank_gap"] = _close(pair, trace_mf, trace_pf - trace_qf)
    verdicts["counting_identity"] = _close(
        pair, trace_pf - trace_qf, gap - dims["e01"]
    )
    verdicts["dual_identification"] = gap == dims["et10"]
    verdicts["counting_identity_mirror"] = _close(
        pair, trace_pf - trace_qf, dims["e10"] - gap_mirror
    )
    verdicts["dual_identification_mirror"] = gap_mirror == dims["et01"]
    verdicts["index_formula_dual10"] = all(
        _close(pair, traces[n], dims["et10"] - dims["e01"]) for n in ns
    )
    verdicts["index_formula_e10"] = all(
        _close(pair, traces[n], dims["e10"] - dims["et01"]) for n in ns
    )
    verdicts["integer_trace"] = all(_is_integer(pair, traces[n]) for n in ns)
    verdicts["balance"] = (
        dims["e10"] - dims["et01"] == dims["et10"] - dims["e01"]
    )

    return IndexReport(
        dim=pair.dim,
        field=pair.field,
        odd_ns=ns,
        traces=traces,
        trace_MF=trace_mf,
        traces_MF=traces_mf,
        traces_MY=traces_my,
        dims=dims,
        fitting_k=fd.k,
        dim_F=fd.F.dim,
        dim_Y=fd.Y.dim,
        index=dims["e10"] - dims["et01"],
        intermediates={
            "dim_mixed_image": codim_raw,
            "dim_mixed_image_mirror": codim_mirror_raw,
            "gap": gap,
            "gap_mirror": gap_mirror,
        },
        verdicts=verdicts,
    )


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of M with the negation pairing made explicit.

    Indices refer to positions in ``eigenvalues``.  Values within tol of
    -1, 0, or 1 are excluded before pairing: those eigenvalues carry the
    index and have no reason to appear in symmetric pairs.
    """

    eigenvalues: tuple[complex, ...]
    excluded: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...]
    tol: float

    @property
    def all_paired(self) -> bool:
        return not self.unmatched


def spectrum_symmetry_check(pair: ProjectionPair, tol: float | None = None) -> SpectrumReport:
    """Match eigenvalues of M = P - Q with their negatives.

    Float pairs only; the eigenvalues come from a numeric solver.  The
    trace identity forces tr M^n to agree for every odd n, which in turn
    forces the spectrum outside {-1, 0, 1} to be symmetric under
    negation, so on a well-formed pair everything should pair up.
    """
    if pair.field != FLOAT:
        raise FieldMismatch("spectrum check needs a float pair; convert first")
    if tol is None:
        tol = pair.pol.compare_abs_tol
    try:
        values = np.linalg.eigvals(derived_ops(pair).M.to_numpy())
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(f"eigenvalue computation failed: {exc}") from exc
    eigenvalues = tuple(complex(v) for v in values)

    excluded = []
    candidates = []
    for i, lam in enumerate(eigenvalues):
        if min(abs(lam - t) for t in (-1.0, 0.0, 1.0)) <= tol:
            excluded.append(i)
        else:
            candidates.append(i)

    # Greedy matching in a deterministic order; adequate because genuine
    # mirror pairs sit far closer than tol to each other than to anything
    # else in a spectrum that satisfies the trace identity.
    candidates.sort(key=lambda i: (eigenvalues[i].real, eigenvalues[i].imag))
    pairs = []
    unmatched = []
    remaining = list(candidates)
    while remaining:
        i = remaining.pop(0)
        best_j = None
        best_gap = None
        for j in remaining:
            gap = abs(eigenvalues[i] + eigenvalues[j])
            if best_gap is None or gap < best_gap:
                best_gap = gap
                best_j = j
        if best_j is not None and best_gap <= tol:
            remaining.remove(best_j)
            pairs.append((i, best_j))
        else:
            unmatched.append(i)

    return SpectrumReport(
        eigenvalues=eigenvalues,
        excluded=tuple(excluded),
        pairs=tuple(pairs),
        unmatched=tuple(unmatched),
        tol=float(tol),
    )
