import json

import pytest

from sqhit import hit
from sqhit.cli import main
from sqhit.modules import element_from_json, element_to_json, sq


def write_element(tmp_path, x, name="x.json"):
    path = tmp_path / name
    path.write_text(json.dumps(element_to_json(x)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBasis:
    def test_count(self, capsys):
        code, out, _ = run(capsys, "basis", "--kind", "gamma", "--s", "5", "--d", "9", "--count")
        assert code == 0 and out.strip() == "70"

    def test_json_listing(self, capsys):
        code, out, _ = run(capsys, "basis", "--kind", "gamma", "--s", "2", "--d", "3", "--json")
        assert code == 0
        assert json.loads(out) == [[1, 2], [2, 1]]

    def test_unknown_kind(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(capsys, "basis", "--kind", "bogus", "--s", "1", "--d", "1")
        assert exc.value.code == 2


class TestSq:
    def test_round_trip_bit_exact(self, capsys, tmp_path):
        x = hit.unhit_witness_5_9()
        path = write_element(tmp_path, x)
        code, out, _ = run(capsys, "sq", "--in", path, "--l", "0")
        assert code == 0
        assert element_from_json(json.loads(out)).same(x)

    def test_action_through_file_output(self, capsys, tmp_path):
        x = hit.sq2_kernel_witness()
        path = write_element(tmp_path, x)
        out_path = tmp_path / "y.json"
        code, _, _ = run(capsys, "sq", "--in", path, "--l", "1", "--out", str(out_path))
        assert code == 0
        y = element_from_json(json.loads(out_path.read_text()))
        assert y.same(sq(x, 1))

    def test_bad_json_exit_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "sq", "--in", str(path), "--l", "1")
        assert code == 2 and err

    def test_missing_file_exit_2(self, capsys, tmp_path):
        code, _, _ = run(capsys, "sq", "--in", str(tmp_path / "nope.json"), "--l", "1")
        assert code == 2


class TestDeltaImageUnhit:
    def test_delta_json(self, capsys):
        code, out, _ = run(capsys, "delta", "--kind", "gamma", "--s", "1", "--d", "3",
                           "--k", "0", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["dim"] == 1
        assert payload["basis"][0]["monomials"] == [[3]]

    def test_unhit_counterexample_bidegree(self, capsys):
        code, out, _ = run(capsys, "unhit", "--kind", "gamma", "--s", "5", "--d", "9", "--k", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["dim_delta"] == 32
        assert payload["dim_image"] == 31
        assert payload["dim_unhit"] == 1

    def test_guardrail_max_k(self, capsys):
        code, _, err = run(capsys, "delta", "--kind", "gamma", "--s", "1", "--d", "3", "--k", "9")
        assert code == 3 and "max_k" in err

    def test_guardrail_max_dim(self, capsys, tmp_path):
        cfg = tmp_path / "cfg"
        cfg.write_text("max_dim = 5\n")
        code, _, err = run(capsys, "--config", str(cfg), "delta", "--kind", "gamma",
                           "--s", "4", "--d", "12", "--k", "1")
        assert code == 3 and "max_dim" in err

    def test_bad_config_exit_2(self, capsys, tmp_path):
        cfg = tmp_path / "cfg"
        cfg.write_text("max_k = -1\n")
        code, _, _ = run(capsys, "--config", str(cfg), "basis", "--kind", "gamma",
                         "--s", "1", "--d", "1")
        assert code == 2


class TestReport:
    def test_csv_columns_and_order(self, capsys):
        code, out, _ = run(capsys, "report", "--k", "0", "--s-max", "2", "--d-max", "4")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "kind,s,d,k,dim_delta,dim_image,dim_unhit,degenerate"
        assert len(lines) == 1 + 2 * 4

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "report", "--k", "0", "--s-max", "1", "--d-max", "3",
                           "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert all(row["dim_unhit"] == 0 for row in rows)


class TestVerify:
    def test_counterexample_suite_green(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "counterexample")
        assert code == 0
        payload = json.loads(out)
        assert payload["ok"] and payload["suites"][0]["failed"] == 0

    def test_unknown_suite_exit_2(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "no-such-suite")
        assert code == 2 and "unknown suite" in err

    def test_deterministic_given_seed(self, capsys):
        code1, out1, _ = run(capsys, "verify", "--suite", "composition", "--seed", "7")
        code2, out2, _ = run(capsys, "verify", "--suite", "composition", "--seed", "7")
        assert code1 == code2 == 0 and out1 == out2


class TestPreimage:
    def test_chain_written_and_correct(self, capsys, tmp_path):
        x = element_from_json({"kind": "gamma", "s": 1, "d": 3, "monomials": [[3]]})
        path = write_element(tmp_path, x)
        prefix = str(tmp_path / "y")
        code, _, _ = run(capsys, "preimage", "--in", path, "--k", "0",
                         "--out-prefix", prefix)
        assert code == 0
        y0 = element_from_json(json.loads((tmp_path / "y0.json").read_text()))
        assert sq(y0, 1).same(x)

    def test_null_rejection_exit_4(self, capsys, tmp_path):
        # The (5,9) class has monomials with first entry 1, outside the
        # first-entry >= 2 null subspace at k=1.
        path = write_element(tmp_path, hit.unhit_witness_5_9())
        code, _, err = run(capsys, "preimage", "--in", path, "--k", "1")
        assert code == 4 and "null" in err

    def test_annihilation_rejection_exit_4(self, capsys, tmp_path):
        x = element_from_json({"kind": "gamma", "s": 1, "d": 2, "monomials": [[2]]})
        path = write_element(tmp_path, x)
        code, _, err = run(capsys, "preimage", "--in", path, "--k", "0")
        assert code == 4 and "not annihilated" in err

    def test_guardrail_exit_3(self, capsys, tmp_path):
        x = element_from_json({"kind": "gamma", "s": 1, "d": 3, "monomials": [[3]]})
        path = write_element(tmp_path, x)
        code, _, _ = run(capsys, "preimage", "--in", path, "--k", "9")
        assert code == 3


class TestExplore:
    def test_single_generator_column_json(self, capsys):
        code, out, _ = run(capsys, "explore-ker-im", "--l", "1", "--s-max", "1", "--d-max", "8")
        assert code == 0
        for row in json.loads(out):
            assert row["dim_ker"] == row["dim_im"]
            assert row["ker_not_im"] == []


class TestCache:
    def test_requires_directory(self, capsys, monkeypatch):
        monkeypatch.delenv("SQHIT_CACHE_DIR", raising=False)
        code, _, err = run(capsys, "cache", "stat")
        assert code == 2 and "cache" in err

    def test_stat_and_clear(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SQHIT_CACHE_DIR", str(tmp_path))
        code, out, _ = run(capsys, "cache", "stat")
        assert code == 0 and json.loads(out)["files"] == 0
        hit.MatrixCache(str(tmp_path)).get(hit.Bidegree(2, 4), 1, hit.ModuleKind.GAMMA)
        code, out, _ = run(capsys, "cache", "clear")
        assert code == 0 and json.loads(out)["removed"] == 1
