"""Command-line interface: pair files, reports, generators, checking."""

import json

import pytest

from rafkit.cli import main
from rafkit.trees import parse_newick, trees_equal, write_newick
from rafkit.gadgets import nochain_caterpillar_family


@pytest.fixture
def nochain_pair(tmp_path):
    t1, t2 = nochain_caterpillar_family(4)
    path = tmp_path / "pair.txt"
    path.write_text(f"# comment line\n{write_newick(t1)}\n{write_newick(t2)}\n")
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


class TestExactCommand:
    def test_basic(self, capsys, nochain_pair):
        code, out = run(capsys, "exact", nochain_pair)
        assert code == 0
        data = json.loads(out)
        assert data["size"] == 2 and data["exact"] is True
        assert data["distance"] == 1
        assert data["reduced"] is False

    def test_cover_dp_strategy(self, capsys, nochain_pair):
        code, out = run(capsys, "exact", nochain_pair,
                        "--strategy", "cover-dp")
        assert code == 0
        assert json.loads(out)["size"] == 2

    def test_identical_pair(self, capsys, tmp_path):
        t = write_newick(nochain_caterpillar_family(3)[0])
        path = tmp_path / "same.txt"
        path.write_text(f"{t}\n{t}\n")
        code, out = run(capsys, "exact", path)
        assert code == 0
        data = json.loads(out)
        assert data["size"] == 1 and data["distance"] == 0

    def test_deterministic_output(self, capsys, nochain_pair):
        _, out1 = run(capsys, "exact", nochain_pair)
        _, out2 = run(capsys, "exact", nochain_pair)
        assert out1 == out2

    def test_timeout_exit_code(self, capsys, tmp_path):
        import random
        from rafkit.trees import random_pair
        t1, t2 = random_pair([str(i) for i in range(1, 32)],
                             random.Random(31))
        path = tmp_path / "big.txt"
        path.write_text(f"{write_newick(t1)}\n{write_newick(t2)}\n")
        code, out = run(capsys, "exact", path, "--timeout", "0.01")
        data = json.loads(out)
        if code == 2:
            assert data["exact"] is False
            assert data["lower"] <= data["size"]
        else:
            assert data["exact"] is True  # solved inside the budget anyway

    def test_parse_error_exit_code(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("((1,2)\n(1,2,3);\n")
        code, _ = run(capsys, "exact", path)
        assert code == 1

    def test_wrong_line_count(self, capsys, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("(1,2,3);\n")
        code, _ = run(capsys, "exact", path)
        assert code == 1


class TestOtherSolverCommands:
    def test_mast(self, capsys, nochain_pair):
        code, out = run(capsys, "mast", nochain_pair)
        assert code == 0
        data = json.loads(out)
        assert data["size"] == len(data["taxa"]) >= 4

    def test_approx(self, capsys, nochain_pair):
        code, out = run(capsys, "approx", nochain_pair)
        assert code == 0
        assert json.loads(out)["size"] >= 2

    def test_bounds(self, capsys, nochain_pair):
        code, out = run(capsys, "bounds", nochain_pair)
        assert code == 0
        data = json.loads(out)
        assert data["lower"] <= data["upper"]

    def test_chains(self, capsys, nochain_pair):
        code, out = run(capsys, "chains", nochain_pair)
        assert code == 0
        data = json.loads(out)
        assert data["common_chains"] == []
        assert data["common_cherry_steps"] == []

    def test_pims(self, capsys, tmp_path):
        path = tmp_path / "perm.txt"
        path.write_text("2 4 1 3 5\n")
        code, out = run(capsys, "pims", path)
        assert code == 0
        data = json.loads(out)
        assert data["size"] == 2 and data["method"] == "exact"

    def test_pims_rejects_non_permutation(self, capsys, tmp_path):
        path = tmp_path / "perm.txt"
        path.write_text("1 1 2\n")
        code, _ = run(capsys, "pims", path)
        assert code == 1


class TestReport:
    def test_csv_report(self, capsys, tmp_path):
        d = tmp_path / "pairs"
        d.mkdir()
        t1, t2 = nochain_caterpillar_family(4)
        (d / "a.txt").write_text(f"{write_newick(t1)}\n{write_newick(t2)}\n")
        same = write_newick(t1)
        (d / "b.txt").write_text(f"{same}\n{same}\n")
        code, out = run(capsys, "report", d)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("pair,n,mraf,")
        assert lines[1].startswith("a.txt,8,2,2,2,")
        assert lines[2].startswith("b.txt,8,1,1,1,8,1,1,1")

    def test_json_report_and_determinism(self, capsys, tmp_path):
        d = tmp_path / "pairs"
        d.mkdir()
        t1, t2 = nochain_caterpillar_family(3)
        (d / "x.txt").write_text(f"{write_newick(t1)}\n{write_newick(t2)}\n")
        code, out1 = run(capsys, "report", d, "--out", "json")
        assert code == 0
        _, out2 = run(capsys, "report", d, "--out", "json")
        assert out1 == out2
        rows = json.loads(out1)["rows"]
        assert rows[0]["mraf"] == 2
        assert rows[0]["maf"] is not None  # n = 6 <= 12

    def test_empty_directory(self, capsys, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        code, out = run(capsys, "report", d)
        assert code == 0
        assert out.strip().splitlines() == [out.strip().splitlines()[0]]

    def test_error_row_keeps_going(self, capsys, tmp_path):
        d = tmp_path / "pairs"
        d.mkdir()
        (d / "bad.txt").write_text("((1,2)\n(1,2,3);\n")
        t1, t2 = nochain_caterpillar_family(3)
        (d / "good.txt").write_text(f"{write_newick(t1)}\n{write_newick(t2)}\n")
        code, out = run(capsys, "report", d)
        assert code == 0
        lines = out.strip().splitlines()
        assert any("ERROR" in line for line in lines)
        assert any(line.startswith("good.txt,6,2") for line in lines)


class TestGadgetCommands:
    def test_hardness_with_meta(self, capsys, tmp_path):
        meta = tmp_path / "meta.json"
        code, out = run(capsys, "gadget", "hardness", "--pi", "2 1 3",
                        "--alpha", "1", "--beta", "1", "--meta", meta)
        assert code == 0
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        t1 = parse_newick(lines[0])
        t2 = parse_newick(lines[1])
        assert t1.n == t2.n == 3 + 8 * 4
        data = json.loads(meta.read_text())
        assert data["alpha"] == 1 and len(data["side_caterpillars"]) == 16

    def test_obs2(self, capsys):
        code, out = run(capsys, "gadget", "obs2", "--n", "3")
        assert code == 0
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert parse_newick(lines[0]).n == 12

    def test_nochain(self, capsys):
        code, out = run(capsys, "gadget", "nochain", "--m", "5")
        assert code == 0
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        a, b = parse_newick(lines[0]), parse_newick(lines[1])
        assert a.n == b.n == 10
        assert not trees_equal(a, b.with_universe(a.labels))


class TestCheck:
    def test_valid_partition(self, capsys, tmp_path, nochain_pair):
        code, out = run(capsys, "exact", nochain_pair)
        partition = json.loads(out)["partition"]
        pfile = tmp_path / "partition.json"
        pfile.write_text(json.dumps(partition))
        code, out = run(capsys, "check", nochain_pair, pfile)
        assert code == 0
        data = json.loads(out)
        assert data["valid_raf"] is True

    def test_af_flag(self, capsys, tmp_path, nochain_pair):
        pfile = tmp_path / "partition.json"
        pfile.write_text(json.dumps(
            {"components": [["1"], ["2"], ["3"], ["4"],
                            ["a"], ["b"], ["c"], ["d"]], "kind": "AF"}))
        code, out = run(capsys, "check", nochain_pair, pfile, "--af")
        assert code == 0
        data = json.loads(out)
        assert data["valid_raf"] is True and data["valid_af"] is True

    def test_not_a_partition_is_usage_error(self, capsys, tmp_path,
                                            nochain_pair):
        pfile = tmp_path / "partition.json"
        pfile.write_text(json.dumps({"components": [["1", "2"]],
                                     "kind": "RAF"}))
        code, _ = run(capsys, "check", nochain_pair, pfile)
        assert code == 1

    def test_gadget_meta_lemma_check(self, capsys, tmp_path):
        meta = tmp_path / "meta.json"
        pair = tmp_path / "gadget.txt"
        code, out = run(capsys, "gadget", "hardness", "--pi", "1 2",
                        "--meta", meta)
        pair.write_text("\n".join(ln for ln in out.splitlines()
                                  if not ln.startswith("#")) + "\n")
        code, out = run(capsys, "exact", pair)
        assert code == 0
        pfile = tmp_path / "partition.json"
        pfile.write_text(json.dumps(json.loads(out)["partition"]))
        code, out = run(capsys, "check", pair, pfile, "--meta", meta)
        assert code == 0
        assert json.loads(out)["structural_violations"] == []
