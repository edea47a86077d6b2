"""End-to-end CLI behavior through run_cli, no subprocesses needed."""

import json

import pytest

from projpair.cli import run_cli
from projpair.generators import gen_pair_oblique_rational
from projpair.pairfile import save_pair


def run(capsys, *args):
    code = run_cli(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_pair(tmp_path, name="pair.json", seed=5, dim=4, rp=2, rq=2):
    path = tmp_path / name
    save_pair(path, gen_pair_oblique_rational(dim, rp, rq, seed=seed))
    return path


class TestVerify:
    def test_single_file_roundtrip(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        code, out, err = run(capsys, "verify", "--input", str(path))
        assert code == 0
        assert "verdicts: 12/12 true" in out
        assert "index:" in out

    def test_json_goes_to_stdout_human_to_stderr(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        code, out, err = run(capsys, "verify", "--input", str(path), "--json")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"dim", "ns", "traces", "dims", "fitting", "verdicts"}
        assert "verdicts: 12/12 true" in err

    def test_json_byte_deterministic(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        _, out1, _ = run(capsys, "verify", "--input", str(path), "--json")
        _, out2, _ = run(capsys, "verify", "--input", str(path), "--json")
        assert out1 == out2

    def test_directory_sorted_by_filename(self, tmp_path, capsys):
        write_pair(tmp_path, "b.json", seed=2)
        write_pair(tmp_path, "a.json", seed=3)
        write_pair(tmp_path, "c.json", seed=4)
        code, out, err = run(capsys, "verify", "--input", str(tmp_path), "--json")
        assert code == 0
        docs = json.loads(out)
        assert [d["file"] for d in docs] == ["a.json", "b.json", "c.json"]
        assert err.index("== a.json ==") < err.index("== b.json ==") < err.index("== c.json ==")

    def test_custom_powers(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        code, out, _ = run(capsys, "verify", "--input", str(path), "--n", "1,7", "--json")
        assert code == 0
        assert json.loads(out)["ns"] == [1, 7]

    def test_even_power_rejected(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        code, _, err = run(capsys, "verify", "--input", str(path), "--n", "2")
        assert code == 2
        assert "n must be odd and >= 1, got 2" in err

    def test_corrupt_file_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{this is not json")
        code, _, err = run(capsys, "verify", "--input", str(bad))
        assert code == 2
        assert "error:" in err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "verify", "--input", str(tmp_path / "ghost.json"))
        assert code == 2

    def test_empty_directory_exits_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "verify", "--input", str(tmp_path))
        assert code == 2
        assert "no pair files" in err


class TestGen:
    def test_oblique_gen_then_verify(self, tmp_path, capsys):
        out_path = tmp_path / "p.json"
        code, out, _ = run(
            capsys, "gen", "--kind", "oblique", "--dim", "5",
            "--rank-p", "2", "--rank-q", "3", "--seed", "11", "--out", str(out_path),
        )
        assert code == 0
        assert f"wrote {out_path}: dim=5 field=rational" in out
        code, out, _ = run(capsys, "verify", "--input", str(out_path))
        assert code == 0

    def test_orthogonal_gen_then_verify(self, tmp_path, capsys):
        out_path = tmp_path / "o.json"
        code, *_ = run(
            capsys, "gen", "--kind", "orthogonal", "--dim", "6",
            "--rank-p", "2", "--rank-q", "4", "--seed", "7", "--out", str(out_path),
        )
        assert code == 0
        code, *_ = run(capsys, "verify", "--input", str(out_path))
        assert code == 0

    def test_prescribed_gen_reports_index(self, tmp_path, capsys):
        out_path = tmp_path / "s.json"
        code, out, _ = run(
            capsys, "gen", "--kind", "prescribed", "--d10", "2", "--d01", "1",
            "--blocks", "pyth:2:1,shear:1/3", "--conjugate", "--seed", "3",
            "--out", str(out_path),
        )
        assert code == 0
        assert "expected_index=1" in out
        assert "dim=7" in out
        code, *_ = run(capsys, "verify", "--input", str(out_path))
        assert code == 0

    def test_gen_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen", "--kind", "oblique", "--dim", "4", "--rank-p", "1",
                "--rank-q", "2", "--seed", "21"]
        run(capsys, *args, "--out", str(a))
        run(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_rank_flags(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--kind", "oblique", "--dim", "4", "--out", str(tmp_path / "x.json")
        )
        assert code == 2
        assert "needs --dim, --rank-p and --rank-q" in err

    def test_prescribed_rejects_rank_flags(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--kind", "prescribed", "--d10", "1", "--rank-p", "1",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2

    def test_prescribed_dim_crosscheck(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--kind", "prescribed", "--d10", "1", "--dim", "5",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert "does not match the prescribed total" in err

    def test_bad_block_syntax(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--kind", "prescribed", "--d10", "1",
            "--blocks", "weird:1", "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert "pyth:M:K or shear:T" in err


class TestLemma:
    def test_suite_and_bridge_pass(self, capsys):
        code, out, _ = run(capsys, "lemma", "--max-n", "7", "--numeric-samples", "3")
        assert code == 0
        assert "FAIL" not in out
        assert "PASS numeric bridge:" in out
        assert "witness_m_minus_m7" in out

    def test_bridge_can_be_skipped(self, capsys):
        code, out, _ = run(capsys, "lemma", "--max-n", "5", "--numeric-samples", "0")
        assert code == 0
        assert "numeric bridge" not in out

    def test_bad_max_n(self, capsys):
        code, _, err = run(capsys, "lemma", "--max-n", "4")
        assert code == 2


class TestSpectrum:
    def test_float_pair_csv(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        run(capsys, "gen", "--kind", "orthogonal", "--dim", "6", "--rank-p", "3",
            "--rank-q", "3", "--seed", "13", "--out", str(path))
        code, out, err = run(capsys, "spectrum", "--input", str(path))
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "index,real,imag,status,partner"
        assert len(lines) == 7
        assert "unmatched" not in out
        assert "eigenvalues: 6 total" in err

    def test_rational_pair_conversion_notice(self, tmp_path, capsys):
        path = write_pair(tmp_path)
        code, out, err = run(capsys, "spectrum", "--input", str(path))
        assert code == 0
        assert "converted to float" in err

    def test_corrupt_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("[]")
        code, *_ = run(capsys, "spectrum", "--input", str(bad))
        assert code == 2


class TestParsing:
    def test_help_exits_0(self, capsys):
        assert run_cli(["--help"]) == 0
        capsys.readouterr()

    def test_unknown_command_exits_2(self, capsys):
        assert run_cli(["frobnicate"]) == 2
        capsys.readouterr()

    def test_no_command_exits_2(self, capsys):
        assert run_cli([]) == 2
        capsys.readouterr()
