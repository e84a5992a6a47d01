"""
Tests for the command-line entry point.
"""

import json

import pytest
import yaml

from main import load_configuration, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


class TestConfiguration:
    """Test cases for YAML configuration loading."""

    def test_default_files(self):
        sweep_cfg, atlas_cfg = load_configuration()
        assert set(sweep_cfg) == {"gl", "osp", "pisp", "q"}
        assert atlas_cfg["seeds"] == 50
        assert atlas_cfg["retries"] == 1000

    def test_custom_directory(self, config_dir):
        sweep_cfg, atlas_cfg = load_configuration(config_dir)
        assert sweep_cfg["gl"] == {"max_m": 2, "max_n": 1, "max_r": 1}
        assert atlas_cfg["seeds"] == 2

    def test_missing_directory(self, temp_dir, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["algebra", "--series", "gl", "--m", "1", "--n", "1", "--config", str(temp_dir / "absent")])
        assert exc.value.code == 2


class TestClassify:
    """Test cases for the classify command."""

    def test_text(self, capsys):
        code, out = run(capsys, "classify", "--series", "gl", "--m", "2", "--n", "1", "--k", "2", "--l", "0")
        assert code == 0
        assert out.startswith("gl(2|1) (2|0)")
        assert "generic        d = 2 (dimension 4)" in out
        assert "agreement      yes" in out

    def test_records(self, capsys):
        code, out = run(
            capsys, "classify", "--series", "pisp", "--m", "2", "--n", "2", "--k", "2", "--l", "0", "--format=records"
        )
        (record,) = records(out)
        assert code == 0
        assert record["generator_dim"] == 3
        assert record["closed_form_dim"] == 3
        assert record["agree"] is True

    def test_q_mirrors_k(self, capsys):
        code, out = run(capsys, "classify", "--series", "q", "--m", "2", "--n", "2", "--k", "1", "--format", "records")
        (record,) = records(out)
        assert code == 0
        assert record["l"] == [1]
        assert record["generator_dim"] == 0

    def test_outside_closed_form_window(self, capsys):
        code, out = run(capsys, "classify", "--series", "osp", "--m", "0", "--n", "2", "--k", "0", "--l", "1")
        assert code == 0
        assert "closed form    n/a" in out

    @pytest.mark.parametrize(
        "argv",
        [
            ["--series", "q", "--m", "2", "--n", "2", "--k", "1", "--l", "0"],
            ["--series", "gl", "--m", "2", "--n", "1", "--k", "2"],
            ["--series", "osp", "--m", "2", "--n", "1", "--k", "1", "--l", "0"],
            ["--series", "gl", "--m", "2", "--n", "2", "--k", "x", "--l", "0"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(["classify", *argv])
        assert exc.value.code == 2


class TestParabolic:
    """Test cases for the parabolic command."""

    def test_records(self, capsys):
        code, out = run(
            capsys, "parabolic", "--series", "gl", "--m", "2", "--n", "2", "--k", "1", "--l", "1", "--format=records"
        )
        (record,) = records(out)
        assert code == 0
        assert record["a"] == [1, 0] and record["b"] == [1, 0]
        assert record["chain"] is True
        assert record["base_point"] == [[0, 2]]
        assert record["stabilizer_dim"] == [6, 6]
        assert record["equal"] is True

    def test_bases(self, capsys):
        argv = ["--series", "osp", "--m", "2", "--n", "2", "--k", "1", "--l", "0"]
        code, out = run(capsys, "parabolic", *argv, "--bases")
        assert code == 0
        assert "stabilizer basis" in out
        assert "V_1 = <e1>" in out

    def test_q_names_odd_vectors(self, capsys):
        code, out = run(capsys, "parabolic", "--series", "q", "--m", "2", "--n", "2", "--k", "1")
        assert code == 0
        assert "V_1 = <e1, pi(e1)>" in out


class TestVerifyAtlas:
    """Test cases for the verify-atlas command."""

    def test_gl(self, capsys, config_dir):
        code, out = run(
            capsys,
            "verify-atlas",
            "--series", "gl", "--m", "2", "--n", "1", "--k", "1", "--l", "0",
            "--config", str(config_dir), "--format", "records",
        )
        (record,) = records(out)
        assert code == 0
        assert record["seeds"] == 2
        assert record["triples"] == 2 * 2 * 4
        assert "isotropy_checks" not in record

    def test_osp_adds_isotropy(self, capsys, config_dir):
        code, out = run(
            capsys,
            "verify-atlas",
            "--series", "osp", "--m", "2", "--n", "2", "--k", "1", "--l", "0",
            "--config", str(config_dir), "--seeds", "1",
        )
        assert code == 0
        assert "isotropy" in out
        assert "0 failures" in out

    def test_unreachable_overlap_exits_1(self, capsys, config_dir):
        with open(config_dir / "atlas.yml", "w") as f:
            yaml.dump({"seeds": 1, "retries": 0, "bound": 4}, f)
        code, out = run(
            capsys,
            "verify-atlas",
            "--series", "gl", "--m", "2", "--n", "1", "--k", "1", "--l", "0",
            "--config", str(config_dir), "--format", "records",
        )
        (record,) = records(out)
        assert code == 1
        assert record["unreachable"] == 2
        assert record["cocycle_failures"] == 0


class TestTable:
    """Test cases for the table command."""

    def test_configured_bounds(self, capsys, config_dir):
        code, out = run(capsys, "table", "--series", "gl", "--config", str(config_dir), "--format", "records")
        assert code == 0
        assert len(records(out)) == 6

    def test_gl22_anchor(self, capsys):
        code, out = run(
            capsys, "table", "--series", "gl", "--max-m", "2", "--max-n", "2", "--max-r", "1", "--format", "records"
        )
        assert code == 0
        nonzero = {
            (tuple(r["k"]), tuple(r["l"])): r["generator_dim"]
            for r in records(out)
            if r["m"] == r["n"] == 2 and r["generator_dim"]
        }
        assert nonzero == {((2,), (0,)): 4, ((0,), (2,)): 4}

    def test_empty_bounds(self, capsys):
        code, out = run(capsys, "table", "--series", "q", "--max-m", "0", "--max-n", "0", "--max-r", "1")
        assert code == 0
        assert out.strip().endswith("0 flag types, 0 disagreements")

    def test_deterministic(self, capsys, config_dir):
        _, first = run(capsys, "table", "--config", str(config_dir))
        _, second = run(capsys, "table", "--config", str(config_dir), "--jobs", "2")
        assert first == second

    def test_xlsx(self, capsys, config_dir, temp_dir):
        path = temp_dir / "table.xlsx"
        code, _ = run(capsys, "table", "--series", "pisp", "--config", str(config_dir), "--xlsx", str(path))
        assert code == 0
        assert path.stat().st_size > 0


class TestAlgebra:
    """Test cases for the algebra command."""

    def test_text(self, capsys):
        code, out = run(capsys, "algebra", "--series", "gl", "--m", "2", "--n", "1")
        assert code == 0
        assert out.startswith("gl(2|1): dimension (5|4)")
        assert "x1-x2" in out
        assert "summand V2   dim 2" in out

    def test_matrices(self, capsys):
        _, out = run(capsys, "algebra", "--series", "gl", "--m", "1", "--n", "1", "--matrices")
        assert "B[1,1]" in out
        assert "0 1" in out

    def test_records(self, capsys):
        _, out = run(capsys, "algebra", "--series", "q", "--m", "2", "--n", "2", "--format", "records")
        (record,) = records(out)
        assert record["dim"] == [4, 4]
        assert len(record["zero_odd"]) == 2
        assert len(record["basis"]) == 8

    def test_invalid(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["algebra", "--series", "osp", "--m", "2", "--n", "3"])
        assert exc.value.code == 2


class TestSample:
    """Test cases for the sample command."""

    def test_records_are_reproducible(self, capsys):
        argv = ["sample", "--series", "gl", "--m", "2", "--n", "2", "--k", "1", "--l", "1", "--seed", "3"]
        _, first = run(capsys, *argv, "--format", "records")
        _, second = run(capsys, *argv, "--format", "records")
        assert first == second
        (record,) = records(first)
        assert record["flag"] == "gl(2|2) (1|1)"
        assert record["generators"] == 2

    def test_text(self, capsys):
        code, out = run(capsys, "sample", "--series", "gl", "--m", "2", "--n", "1", "--k", "1", "--l", "0", "--overlap")
        assert code == 0
        assert "Z_1 = SuperMatrix" in out

    def test_chart_out_of_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sample", "--series", "gl", "--m", "2", "--n", "1", "--k", "1", "--l", "0", "--chart", "5"])
        assert exc.value.code == 2
