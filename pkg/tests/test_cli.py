"""Exit codes, output shapes, and byte-stable JSON for the front end."""

import json

import pytest

from kolberg import diese_quatuor, g_coeffs, quatuor_to_json, sequence_to_json
from kolberg.cli import run


@pytest.fixture
def diese_v_file(tmp_path):
    q = diese_quatuor(0, 0)
    path = tmp_path / "v.json"
    path.write_text(sequence_to_json(g_coeffs(q.level(0), 7)))
    return str(path)


@pytest.fixture
def diese_file(tmp_path):
    path = tmp_path / "dq.json"
    path.write_text(quatuor_to_json(diese_quatuor(-2, 3)))
    return str(path)


class TestExitCodes:
    def test_success(self, capsys):
        assert run(["eset", "--g", "s^3"]) == 0
        assert capsys.readouterr().out.strip() == "E = {-3}"

    def test_verification_failure_is_1(self, capsys):
        code = run(["verify", "identity", "--r0", "1+2/y+t^2",
                    "--level", "0", "--r", "1/2", "--x", "1/5",
                    "--tol", "1e-30", "--inject", "3:1e-6"])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_usage_error_is_2(self, capsys):
        assert run(["eset", "--g", "s +"]) == 2
        assert run(["assoc", "--dir", "fwd", "--in", "/nonexistent.json"]) == 2

    def test_infertile_is_3(self, capsys):
        code = run(["quatuor", "gen", "--r0", "1/(t-2)", "--level", "0",
                    "--range", "0:1"])
        assert code == 3
        assert "level 1" in capsys.readouterr().err

    def test_domain_error_is_4(self, capsys):
        assert run(["eval", "kolberg", "--a", "1", "--x", "2/5"]) == 4
        assert "1/e" in capsys.readouterr().err


class TestAssoc:
    def test_inverse_prints_expanded_u7(self, capsys, diese_v_file):
        code = run(["assoc", "--dir", "inv", "--in", diese_v_file,
                    "--N", "7"])
        assert code == 0
        out = capsys.readouterr().out
        assert "u_7 = y^7 + 44*y^6 + 861*y^5 + 9590*y^4 + 64435*y^3" \
               " + 255192*y^2 + 535423*y + 436982" in out

    def test_forward_inverse_cycle(self, capsys, diese_v_file, tmp_path):
        run(["assoc", "--dir", "inv", "--in", diese_v_file, "--json"])
        u_text = capsys.readouterr().out
        u_path = tmp_path / "u.json"
        u_path.write_text(u_text)
        run(["assoc", "--dir", "fwd", "--in", str(u_path), "--json"])
        v_text = capsys.readouterr().out
        assert json.loads(v_text) == json.loads(
            open(diese_v_file).read())

    def test_kind_mismatch(self, capsys, diese_v_file):
        assert run(["assoc", "--dir", "fwd", "--in", diese_v_file]) == 2


class TestQuatuor:
    def test_gen_to_file_and_poles(self, capsys, tmp_path):
        out = tmp_path / "q.json"
        code = run(["quatuor", "gen", "--r0", "1+2/y+t^2", "--level", "0",
                    "--range=-2:3", "--out", str(out)])
        assert code == 0
        code = run(["poles", "--in", str(out), "--levels", "0,1", "--json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["rational_poles"] == ["0", "-1", "-2", "-3"]

    def test_hcoeffs_from_file(self, capsys, diese_file):
        code = run(["quatuor", "hcoeffs", "--in", diese_file,
                    "--level", "0", "--N", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "u_2 = y^2 + 4*y + 6" in out

    def test_gcoeffs_inline(self, capsys):
        code = run(["quatuor", "gcoeffs", "--r0", "1+2/y+t^2", "--N", "2"])
        assert code == 0
        assert "v_2 = y^2 + 2*y + 2" in capsys.readouterr().out

    def test_needs_exactly_one_source(self, capsys, diese_file):
        assert run(["quatuor", "hcoeffs", "--N", "2"]) == 2
        assert run(["quatuor", "hcoeffs", "--in", diese_file, "--r0", "1",
                    "--N", "2"]) == 2

    def test_tampered_file_fails_verification(self, capsys, tmp_path):
        obj = json.loads(quatuor_to_json(diese_quatuor(-1, 1)))
        obj["levels"]["-1"] = "t + y"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(obj))
        code = run(["quatuor", "hcoeffs", "--in", str(path), "--level", "0",
                    "--N", "2"])
        assert code == 1
        assert "neighbor" in capsys.readouterr().err


class TestVerify:
    def test_identity_pass(self, capsys):
        code = run(["verify", "identity", "--r0", "1+2/y+t^2",
                    "--level", "0", "--r", "1/2", "--x", "1/5",
                    "--tol", "1e-30"])
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "residual" in out

    def test_identity_json(self, capsys):
        code = run(["verify", "identity", "--r0", "1+2/y+t^2",
                    "--level", "0", "--r", "1/2", "--x=-1/5", "--json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["passed"] is True
        assert data["form"] == "G"

    def test_table(self, capsys):
        assert run(["verify", "table", "--N", "8"]) == 0
        assert "match" in capsys.readouterr().out

    def test_roundtrip(self, capsys):
        assert run(["verify", "roundtrip", "--count", "10",
                    "--order", "20"]) == 0
        assert "10/10" in capsys.readouterr().out


class TestGolden:
    """Byte-stable JSON at fixed precision for a pinned command set."""

    def check(self, argv, name, capsys, golden_dir):
        assert run(argv) == 0
        out = capsys.readouterr().out
        golden = golden_dir / name
        assert out == golden.read_text(), f"golden mismatch for {name}"

    @pytest.fixture
    def golden_dir(self):
        import pathlib
        return pathlib.Path(__file__).parent / "golden"

    def test_eval_json(self, capsys, golden_dir):
        self.check(["eval", "kolberg", "--a", "1", "--x", "1/10",
                    "--tol", "1e-40", "--json"],
                   "eval_kolberg.json", capsys, golden_dir)

    def test_eval_sharp_json(self, capsys, golden_dir):
        self.check(["eval", "sharp", "--a", "3", "--r", "1", "--x", "1/10",
                    "--json"],
                   "eval_sharp.json", capsys, golden_dir)

    def test_quatuor_gen_json(self, capsys, golden_dir):
        self.check(["quatuor", "gen", "--r0", "1+2/y+t^2", "--level", "0",
                    "--range=-1:1", "--json"],
                   "quatuor_gen.json", capsys, golden_dir)

    def test_verify_identity_json(self, capsys, golden_dir):
        self.check(["verify", "identity", "--r0", "1+2/y+t^2",
                    "--level", "0", "--r", "1/2", "--x", "1/5", "--json"],
                   "verify_identity.json", capsys, golden_dir)
