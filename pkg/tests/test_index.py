"""Eigenspace counts, odd-power traces, verdicts, spectrum pairing."""

import json
from fractions import Fraction

import pytest

from projpair.errors import FieldMismatch, ProjpairError
from projpair.generators import (
    PrescribedSpec,
    PythagoreanBlock,
    ShearBlock,
    gen_pair_oblique_rational,
    gen_pair_orthogonal,
    gen_prescribed,
    mix_seed,
    random_unimodular,
)
from projpair.index import (
    compute_eigenspaces,
    dual_eigenspace,
    eigenspace,
    index_report,
    spectrum_symmetry_check,
    trace_power,
)
from projpair.linalg import Matrix, subspace_intersection
from projpair.pairs import make_pair, to_float_pair
from projpair.scalars import FLOAT, RATIONAL

VERDICT_NAMES = {
    "trace_split",
    "trace_y_zero",
    "trace_f_constant",
    "trace_f_rank_gap",
    "counting_identity",
    "dual_identification",
    "counting_identity_mirror",
    "dual_identification_mirror",
    "index_formula_dual10",
    "index_formula_e10",
    "integer_trace",
    "balance",
}


def diag_pair():
    p = Matrix([[1, 0], [0, 0]], RATIONAL)
    q = Matrix([[0, 0], [0, 1]], RATIONAL)
    return make_pair(p, q)


def shear_pair():
    p = Matrix([[1, 1], [0, 0]], RATIONAL)
    q = Matrix([[1, 0], [0, 0]], RATIONAL)
    return make_pair(p, q)


def oblique(i, lo=2, hi=6):
    h = mix_seed(0x1DE, i)
    dim = lo + h % (hi - lo + 1)
    return gen_pair_oblique_rational(
        dim, (h >> 8) % (dim + 1), (h >> 16) % (dim + 1), seed=mix_seed(0x1DF, i)
    )


class TestEigenspaces:
    def test_full_vs_zero_projection(self):
        pair = make_pair(Matrix.identity(3, RATIONAL), Matrix.zeros(3, 3, RATIONAL))
        dims = compute_eigenspaces(pair).dims()
        assert dims["e10"] == 3 and dims["et10"] == 3
        assert sum(dims.values()) == 6

    def test_complementary_diagonals(self):
        dims = compute_eigenspaces(diag_pair()).dims()
        assert dims == {
            "e10": 1, "e01": 1, "e11": 0, "e00": 0,
            "et10": 1, "et01": 1, "et11": 0, "et00": 0,
        }

    def test_shear_asymmetry(self):
        # e1 is fixed by both projections, while only the transposed pair
        # annihilates a common covector: primal and dual counts differ.
        dims = compute_eigenspaces(shear_pair()).dims()
        assert dims["e11"] == 1 and dims["e00"] == 0
        assert dims["et11"] == 0 and dims["et00"] == 1
        space = dual_eigenspace(shear_pair(), 0, 0)
        assert space.contains_vector(Matrix([[0], [1]], RATIONAL))

    def test_label_validation(self):
        pair = diag_pair()
        with pytest.raises(ProjpairError):
            eigenspace(pair, 2, 0)
        with pytest.raises(ProjpairError):
            dual_eigenspace(pair, 0, -1)

    def test_one_and_zero_spaces_meet_trivially(self):
        for i in range(10):
            pair = oblique(i)
            e10 = eigenspace(pair, 1, 0)
            e01 = eigenspace(pair, 0, 1)
            assert subspace_intersection(e10, e01).dim == 0

    def test_float_agrees_with_exact(self):
        for i in range(8):
            pair = oblique(i)
            exact = compute_eigenspaces(pair).dims()
            approx = compute_eigenspaces(to_float_pair(pair)).dims()
            assert approx == exact


class TestTracePower:
    def test_identity_vs_zero(self):
        pair = make_pair(Matrix.identity(3, RATIONAL), Matrix.zeros(3, 3, RATIONAL))
        assert trace_power(pair, 1) == 3
        assert trace_power(pair, 5) == 3

    def test_pythagorean_block_traces_vanish(self):
        block = PythagoreanBlock(2, 1)
        p = Matrix([[1, 0], [0, 0]], RATIONAL)
        pair = make_pair(p, Matrix(block.q_block(), RATIONAL))
        m = pair.P - pair.Q
        # M^3 is proportional to M here, and tr M = 0
        assert m ** 3 == Fraction(16, 25) * m
        for n in (1, 3, 5, 7):
            assert trace_power(pair, n) == 0

    def test_odd_powers_all_agree(self):
        for i in range(12):
            pair = oblique(i)
            values = {trace_power(pair, n) for n in (1, 3, 5, 7)}
            assert len(values) == 1
            assert next(iter(values)).denominator == 1

    def test_power_validation(self):
        with pytest.raises(ProjpairError):
            trace_power(diag_pair(), 0)


class TestIndexReport:
    def test_verdict_names_fixed(self):
        report = index_report(diag_pair())
        assert set(report.verdicts) == VERDICT_NAMES

    def test_equal_projections(self):
        eye = Matrix.identity(3, RATIONAL)
        report = index_report(make_pair(eye, eye))
        assert report.all_verdicts_true
        assert report.index == 0
        assert all(v == 0 for v in report.traces.values())

    def test_rank_one_difference(self):
        pair = make_pair(Matrix.identity(2, RATIONAL), Matrix([[1, 0], [0, 0]], RATIONAL))
        report = index_report(pair)
        assert report.index == 1
        assert report.traces[1] == 1
        assert report.all_verdicts_true

    def test_prescribed_index(self):
        spec = PrescribedSpec(d10=2, d01=1, seed=3, conjugate=True,
                              generic_blocks=(PythagoreanBlock(2, 1),))
        pair, expected = gen_prescribed(spec)
        assert expected == 1
        report = index_report(pair, odd_ns=(1, 3, 5, 7))
        assert report.index == 1
        assert report.all_verdicts_true
        assert report.dims["e10"] == 2 and report.dims["et01"] == 1

    def test_shear_index_zero(self):
        report = index_report(shear_pair())
        assert report.index == 0
        assert report.all_verdicts_true
        assert report.fitting_k == 0

    def test_oblique_sweep_all_verdicts(self):
        for i in range(25):
            report = index_report(oblique(i))
            assert report.all_verdicts_true, report.failed_verdicts()

    def test_orthogonal_float_sweep(self):
        for i in range(15):
            h = mix_seed(0xF10A7, i)
            dim = 2 + h % 6
            pair = gen_pair_orthogonal(
                dim, (h >> 8) % (dim + 1), (h >> 16) % (dim + 1), seed=i
            )
            report = index_report(pair)
            assert report.all_verdicts_true, report.failed_verdicts()

    def test_symmetric_pair_self_dual(self):
        # symmetric projections: transposing changes nothing, so each dual
        # dimension equals its primal counterpart
        for i in range(6):
            pair = gen_pair_orthogonal(5, 2, 3, seed=100 + i)
            dims = index_report(pair).dims
            for key in ("10", "01", "11", "00"):
                assert dims["e" + key] == dims["et" + key]

    def test_similarity_covariance(self):
        pair = oblique(4)
        base = index_report(pair)
        for i in range(4):
            g = random_unimodular(pair.dim, seed=mix_seed(0xABCD, i))
            gi = g.inverse()
            moved = make_pair(g * pair.P * gi, g * pair.Q * gi)
            report = index_report(moved)
            assert report.traces == base.traces
            assert report.dims == base.dims
            assert report.index == base.index

    def test_ns_validation(self):
        pair = diag_pair()
        with pytest.raises(ProjpairError):
            index_report(pair, odd_ns=(2,))
        with pytest.raises(ProjpairError):
            index_report(pair, odd_ns=(-1,))
        with pytest.raises(ProjpairError):
            index_report(pair, odd_ns=())

    def test_intermediates_exposed(self):
        report = index_report(diag_pair())
        assert report.intermediates["gap"] == report.dims["et10"]
        assert report.intermediates["gap_mirror"] == report.dims["et01"]


class TestReportJson:
    def test_schema_keys(self):
        doc = index_report(diag_pair()).to_json_dict()
        assert set(doc) == {"dim", "ns", "traces", "dims", "fitting", "verdicts"}
        assert doc["ns"] == [1, 3, 5]
        assert set(doc["traces"]) == {"1", "3", "5"}
        assert set(doc["fitting"]) == {"k", "dimF", "dimY"}

    def test_rational_traces_serialize_as_strings(self):
        doc = index_report(diag_pair()).to_json_dict()
        assert doc["traces"]["1"] == "0"

    def test_byte_determinism(self):
        a = index_report(oblique(7)).to_json()
        b = index_report(oblique(7)).to_json()
        assert a == b
        assert json.loads(a)["dims"]["e10"] == index_report(oblique(7)).dims["e10"]

    def test_float_traces_serialize_as_numbers(self):
        pair = gen_pair_orthogonal(4, 2, 2, seed=3)
        doc = index_report(pair).to_json_dict()
        assert isinstance(doc["traces"]["1"], float)


class TestSpectrum:
    def test_requires_float(self):
        with pytest.raises(FieldMismatch):
            spectrum_symmetry_check(diag_pair())

    def test_pythagorean_pair_pairs_up(self):
        block = PythagoreanBlock(2, 1)
        p = Matrix([[1, 0], [0, 0]], RATIONAL)
        pair = to_float_pair(make_pair(p, Matrix(block.q_block(), RATIONAL)))
        report = spectrum_symmetry_check(pair)
        # eigenvalues are +-4/5: one mirror pair, nothing excluded
        assert report.all_paired
        assert len(report.pairs) == 1
        assert report.excluded == ()
        i, j = report.pairs[0]
        assert report.eigenvalues[i] + report.eigenvalues[j] == pytest.approx(0.0, abs=1e-12)
        assert abs(report.eigenvalues[i]) == pytest.approx(0.8, abs=1e-12)

    def test_diag_pair_fully_excluded(self):
        report = spectrum_symmetry_check(to_float_pair(diag_pair()))
        assert set(report.excluded) == {0, 1}
        assert report.pairs == ()
        assert report.all_paired

    def test_random_orthogonal_always_pairs(self):
        for i in range(10):
            pair = gen_pair_orthogonal(8, 4, 3, seed=500 + i)
            assert spectrum_symmetry_check(pair).all_paired

    def test_tiny_tolerance_reports_unmatched(self):
        pair = gen_pair_orthogonal(6, 3, 3, seed=77)
        report = spectrum_symmetry_check(pair, tol=1e-17)
        loose = spectrum_symmetry_check(pair, tol=1e-8)
        assert loose.all_paired
        if loose.pairs:
            assert not report.all_paired

    def test_custom_tol_recorded(self):
        pair = gen_pair_orthogonal(4, 2, 2, seed=5)
        assert spectrum_symmetry_check(pair, tol=1e-6).tol == 1e-6


class TestWithShearBlocks:
    def test_prescribed_with_shears(self):
        spec = PrescribedSpec(
            d10=1, d01=0, d11=1, d00=0, seed=11, conjugate=True,
            generic_blocks=(ShearBlock(Fraction(3, 2)), PythagoreanBlock(3, 2)),
        )
        pair, expected = gen_prescribed(spec)
        report = index_report(pair)
        assert report.index == expected == 1
        assert report.all_verdicts_true
        # each shear block adds one vector fixed by both projections
        assert report.dims["e11"] == 2
        assert report.dims["et00"] == 1
