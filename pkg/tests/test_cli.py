import json

import pytest

from kmfactor.cli import main, parse_complex, parse_range, parse_subset


@pytest.fixture()
def a2_file(tmp_path):
    path = tmp_path / "a2.json"
    path.write_text('{"label": "A2", "matrix": [[2, -1], [-1, 2]]}')
    return str(path)


@pytest.fixture()
def affine_file(tmp_path):
    path = tmp_path / "aff.json"
    path.write_text('{"matrix": [[2, -2], [-2, 2]]}')
    return str(path)


def test_parse_complex_forms():
    assert parse_complex("0.25") == 0.25
    assert parse_complex("0.3i") == 0.3j
    assert parse_complex("1-2i") == 1 - 2j
    assert parse_complex("-1.5-0.5i") == -1.5 - 0.5j
    assert parse_complex("i") == 1j
    assert parse_complex("-i") == -1j
    assert parse_complex("1+i") == 1 + 1j
    with pytest.raises(ValueError):
        parse_complex("two")


def test_parse_range():
    assert parse_range("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_range("2:2:1") == [2.0]
    with pytest.raises(ValueError):
        parse_range("0:1")


def test_parse_subset_one_based():
    assert parse_subset("1,2", 2) == {0, 1}
    assert parse_subset("", 3) == frozenset()
    with pytest.raises(ValueError):
        parse_subset("3", 2)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_roots_json_lines(capsys, a2_file):
    code, out, _ = _run(capsys, "roots", "--gcm", a2_file, "--height", "5")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert {tuple(r["n"]) for r in rows} == {(1, 0), (0, 1), (1, 1)}


def test_roots_csv(capsys, a2_file):
    code, out, _ = _run(capsys, "roots", "--gcm", a2_file, "--height", "5",
                        "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n1,n2,m1,m2,height"
    assert len(lines) == 4


def test_output_is_deterministic(capsys, affine_file):
    args = ("series", "--gcm", affine_file, "--height", "4", "--degree", "4")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_poincare_counts(capsys, affine_file):
    code, out, _ = _run(capsys, "poincare", "--gcm", affine_file,
                        "--max-length", "4")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["count"] for r in rows[:-1]] == [1, 2, 2, 2, 2]
    assert rows[-1]["exact"] is False


def test_eval_rank1(capsys, tmp_path):
    path = tmp_path / "a1.json"
    path.write_text('{"matrix": [[2]]}')
    code, out, _ = _run(capsys, "eval", "--gcm", str(path), "--t", "0.3",
                        "--z", "0.2+0.5i", "--height", "10",
                        "--max-length", "6")
    assert code == 0
    row = json.loads(out)
    assert abs(row["value_re"] - 1.3) < 1e-10
    assert abs(row["value_im"]) < 1e-10


def test_eval_inline_matrix(capsys):
    code, out, _ = _run(capsys, "eval", "--matrix", "[[2]]", "--t", "0.3",
                        "--z", "0.5i", "--height", "8", "--max-length", "6")
    assert code == 0
    assert abs(json.loads(out)["value_re"] - 1.3) < 1e-10


def test_eval_domain_error_is_structured(capsys, a2_file):
    code, out, err = _run(capsys, "eval", "--gcm", a2_file, "--t", "0.2",
                          "--z", "0,1i", "--height", "8", "--max-length", "6")
    assert code == 1
    assert out == ""
    payload = json.loads(err)
    assert payload["error"] == "DomainError"


def test_eval_chart_at_wall(capsys, a2_file):
    code, out, _ = _run(capsys, "eval", "--gcm", a2_file, "--t", "0.2",
                        "--z", "0,1i", "--subset", "1", "--height", "10",
                        "--max-length", "8")
    assert code == 0
    row = json.loads(out)
    assert abs(row["value_re"] - 1.488) < 1e-6


def test_usage_error_exit_code(capsys, a2_file):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--gcm", a2_file])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert json.loads(err)["error"] == "usage"


def test_classify_output(capsys, a2_file):
    code, out, _ = _run(capsys, "classify", "--gcm", a2_file,
                        "--pairings=-1,1")
    assert code == 0
    row = json.loads(out)
    assert row["word"] == [1]
    assert row["subset"] == "2"
    assert row["representative"] == [1.0, 0.0]
    assert row["status"] == "interior"


def test_series_macdonald_flag(capsys, a2_file):
    code, out, _ = _run(capsys, "series", "--gcm", a2_file,
                        "--check-macdonald", "1,2", "--height", "6",
                        "--degree", "6")
    assert code == 0
    row = json.loads(out)
    assert row["passed"] is True
    assert row["poincare"] == [1, 2, 2, 1]


def test_series_sum_rows_sorted(capsys, affine_file):
    code, out, _ = _run(capsys, "series", "--gcm", affine_file, "--height",
                        "4", "--degree", "4")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    keys = [(sum(r["mu"]), tuple(r["mu"])) for r in rows]
    assert keys == sorted(keys)
    assert all(len(r["poly"]) == 5 for r in rows)


def test_correction_trivial_for_finite_type(capsys, a2_file):
    code, out, _ = _run(capsys, "correction", "--gcm", a2_file,
                        "--height", "5", "--degree", "5")
    assert code == 0
    row = json.loads(out)
    assert row["m"] == [{"mu": [0, 0], "poly": [1, 0, 0, 0, 0, 0]}]
    assert row["poincare"] == [1, 2, 2, 1, 0, 0]


def test_weyl_coset_listing(capsys, a2_file):
    code, out, _ = _run(capsys, "weyl", "--gcm", a2_file, "--max-length", "6",
                        "--coset", "1")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["word"] for r in rows] == [[], [2], [1, 2]]


def test_verify_subcommand(capsys, a2_file):
    code, out, _ = _run(capsys, "verify", "--gcm", a2_file, "--t", "0.2",
                        "--z", "0.5i,0.7i", "--words", "1;2;1,2",
                        "--height", "10", "--max-length", "8")
    assert code == 0
    row = json.loads(out)
    assert row["max_deviation"] < 1e-6
    assert len(row["entries"]) == 3


def test_grid_csv(capsys, a2_file):
    code, out, _ = _run(capsys, "grid", "--gcm", a2_file, "--t", "0.2",
                        "--axis", "1=0.4:0.8:2", "--axis", "2=0.5:0.5:1",
                        "--height", "10", "--max-length", "8",
                        "--format", "csv", "--workers", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ("index,t_re,t_im,z1_re,z1_im,z2_re,z2_im,"
                        "C_re,C_im,tail_bound,chart_X,error")
    assert len(lines) == 3
    assert lines[1].split(",")[-1] == ""


def test_grid_reports_bad_points(capsys, affine_file):
    code, out, _ = _run(capsys, "grid", "--gcm", affine_file, "--t", "0.1",
                        "--axis", "1=-1.0:-1.0:1", "--axis", "2=-1.0:-1.0:1",
                        "--height", "10", "--max-length", "8",
                        "--format", "csv")
    assert code == 1
    lines = out.strip().splitlines()
    assert "OutsideOmega" in lines[1]


def test_grid_deterministic_across_workers(capsys, a2_file):
    args = ("grid", "--gcm", a2_file, "--t", "0.2", "--axis", "1=0.3:0.9:4",
            "--axis", "2=0.4:0.8:3", "--height", "10", "--max-length", "8")
    _, seq, _ = _run(capsys, *args, "--workers", "1")
    _, par, _ = _run(capsys, *args, "--workers", "4")
    assert seq == par


def test_check_suite_passes(capsys, a2_file):
    code, out, _ = _run(capsys, "check", "--gcm", a2_file)
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert all(r["status"] in ("pass", "skip") for r in rows)
    names = {r["name"] for r in rows}
    assert "correction-factor-trivial" in names
    assert "chart-agreement" in names


def test_check_suite_affine(capsys, affine_file):
    code, out, _ = _run(capsys, "check", "--gcm", affine_file)
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    status = {r["name"]: r["status"] for r in rows}
    assert status["correction-factor-trivial"] == "skip"
    assert status["constant-term-poincare"] == "pass"
