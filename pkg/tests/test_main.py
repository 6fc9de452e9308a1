import csv
import json

import numpy as np
import pytest

from Config.config import ENV_KEYS
from main import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from Service.spectral_service import SpectralService
from tests.conftest import system


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_KEYS:
        monkeypatch.delenv(name, raising=False)


def read_csv(path):
    """(comment lines, rows) of a report file, rows as lists of strings"""
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    comments = [line for line in lines if line.startswith("#")]
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    return comments, rows


def write_function(path, values, spec, depth=None):
    f = SpectralService.from_json({"radices": list(system(spec, depth).radices), "depth": system(spec, depth).depth,
                                   "values": [[complex(v).real, complex(v).imag] for v in values]})
    path.write_text(json.dumps(SpectralService.to_json(f)), encoding="utf-8")
    return f


# ========== TRANSFORM ==========
def test_transform_constant(tmp_path):
    source, out = tmp_path / "one.json", tmp_path / "coeffs.json"
    write_function(source, [1.0] * 8, "2^3")
    assert main(["transform", "--input", str(source), "--out", str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["kind"] == "spectral"
    coeffs = np.array([complex(re, im) for re, im in document["values"]])
    np.testing.assert_allclose(coeffs, [1, 0, 0, 0, 0, 0, 0, 0], atol=1e-15)


def test_transform_roundtrip_and_verify(tmp_path, rng):
    source, coeffs, back = tmp_path / "f.json", tmp_path / "c.json", tmp_path / "back.json"
    values = rng.standard_normal(144) + 1j * rng.standard_normal(144)
    write_function(source, values, "2,3,4", 5)
    assert main(["transform", "--input", str(source), "--out", str(coeffs), "--verify"]) == EXIT_OK
    document = json.loads(coeffs.read_text())
    assert document["verification"]["ok"] is True
    assert document["verification"]["max_deviation"] < 1e-10
    assert main(["transform", "--inverse", "--input", str(coeffs), "--out", str(back)]) == EXIT_OK
    restored = np.array([complex(re, im) for re, im in json.loads(back.read_text())["values"]])
    assert np.max(np.abs(restored - values)) < 1e-10


def test_transform_malformed_input(tmp_path, capsys):
    source = tmp_path / "broken.json"
    source.write_text('{"radices": [2, 2],\n "depth": 2,\n "values": [[1, 0], [1 0]]}\n', encoding="utf-8")
    assert main(["transform", "--input", str(source)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "parse-error" in err
    assert ":3:" in err


def test_transform_oracle_violation_exits_two(tmp_path, rng):
    source = tmp_path / "f.json"
    write_function(source, rng.standard_normal(81), "3^4")
    code = main(["transform", "--input", str(source), "--out", str(tmp_path / "c.json"),
                 "--verify", "--oracle-tolerance", "1e-300"])
    assert code == EXIT_VIOLATION


@pytest.mark.parametrize("inverse", [False, True])
def test_verify_leaves_transform_values_unchanged(tmp_path, rng, inverse):
    source = tmp_path / "in.json"
    write_function(source, rng.standard_normal(144) + 1j * rng.standard_normal(144), "2,3,4", 5)
    if inverse:
        assert main(["transform", "--input", str(source), "--out", str(tmp_path / "c.json")]) == EXIT_OK
        source = tmp_path / "c.json"
    extra = ["--inverse"] if inverse else []
    plain, checked, strict = tmp_path / "plain.json", tmp_path / "checked.json", tmp_path / "strict.json"
    assert main(["transform", *extra, "--input", str(source), "--out", str(plain)]) == EXIT_OK
    assert main(["transform", *extra, "--input", str(source), "--out", str(checked), "--verify"]) == EXIT_OK
    assert main(["transform", *extra, "--input", str(source), "--out", str(strict), "--verify",
                 "--oracle-tolerance", "1e-300"]) == EXIT_VIOLATION
    baseline = json.loads(plain.read_text())
    assert "verification" not in baseline
    for path in (checked, strict):
        document = json.loads(path.read_text())
        assert set(document) - set(baseline) == {"verification"}
        for key in ("kind", "radices", "depth", "values"):
            assert document[key] == baseline[key]


def test_unwritable_output_reports_error(tmp_path, capsys):
    assert main(["lemma1", "--radix", "2^4", "--out", str(tmp_path)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert err.startswith("vilenkin-lab: error:")
    assert "Traceback" not in err


# ========== KERNEL ==========
def test_kernel_dirichlet(tmp_path):
    out = tmp_path / "d3.json"
    assert main(["kernel", "--radix", "2^2", "--n", "3", "--verify", "--out", str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    assert [re for re, _ in document["values"]] == [3.0, 1.0, 1.0, -1.0]
    assert document["l1_norm"] == pytest.approx(1.5)
    assert document["verification"]["ok"] is True


def test_kernel_out_of_range(capsys):
    assert main(["kernel", "--radix", "2^2", "--n", "5"]) == EXIT_USAGE
    assert "out-of-range" in capsys.readouterr().err


# ========== SCANS ==========
def test_lebesgue_scan_dyadic(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["lebesgue-scan", "--radix", "2^8", "--threads", "2", "--out", str(out)]) == EXIT_OK
    comments, rows = read_csv(out)
    assert rows[0] == ["n", "v", "v_star", "L_n", "lower_bound", "upper_bound", "lower_slack", "upper_slack"]
    assert len(rows) == 1 + 255
    by_n = {int(row[0]): row for row in rows[1:]}
    assert float(by_n[2][3]) == pytest.approx(1.0)
    assert float(by_n[3][3]) == pytest.approx(1.5)
    assert "# violations=0" in comments
    assert any(line.startswith("# radix=2^8 depth=8") for line in comments)


def test_lemma1_rows(tmp_path):
    out = tmp_path / "lemma1.csv"
    assert main(["lemma1", "--radix", "2^6", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    assert rows[0] == ["n", "M_n", "average_nM", "average_M", "running_min"]
    assert len(rows) == 1 + 6
    assert float(rows[3][2]) == pytest.approx(2 / 3)
    assert float(rows[1][2]) == pytest.approx(1.0)


def test_divergence_writes_tables(tmp_path):
    out = tmp_path / "div.csv"
    assert main(["divergence", "--radix", "2^10", "--alphas", "1,4,9", "--out", str(out)]) == EXIT_OK
    comments, rows = read_csv(out)
    assert rows[0][:6] == ["k", "alpha_k", "M_alpha_k", "B_k", "alpha_k_sqrt", "ratio"]
    assert [int(row[1]) for row in rows[1:]] == [1, 4, 9]
    windows = [float(row[3]) for row in rows[1:]]
    assert windows == sorted(windows)
    assert "# windows_increasing=True" in comments
    _, cesaro = read_csv(tmp_path / "div.cesaro.csv")
    assert cesaro[0] == ["n", "cesaro_average"]


def test_divergence_depth_insufficient(capsys):
    assert main(["divergence", "--radix", "2^5", "--alphas", "1,4,9"]) == EXIT_USAGE
    assert "depth-insufficient" in capsys.readouterr().err


def test_gat_corpus(tmp_path):
    out = tmp_path / "gat.json"
    assert main(["gat", "--radix", "2^6", "--corpus", "12", "--format", "json", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["summary"]["corpus"] == 12
    assert payload["summary"]["max_subsequence_ratio"] <= 1.0 + 1e-12
    assert payload["summary"]["max_fejer_ratio"] <= 2.0
    assert len(payload["tables"]["fejer"]["rows"]) == 12


def test_gat_ratio_stable_across_seeds(tmp_path):
    ratios = []
    for seed in (1, 2, 3):
        out = tmp_path / f"gat{seed}.json"
        assert main(["gat", "--radix", "2^6", "--seed", str(seed), "--format", "json", "--out", str(out)]) == EXIT_OK
        ratios.append(json.loads(out.read_text())["summary"]["max_ratio"])
    assert max(ratios) <= 1.1 * min(ratios)


def test_equiv_check(tmp_path):
    out = tmp_path / "equiv.csv"
    code = main(["equiv-check", "--radix", "2,3,4", "--depth", "4", "--corpus", "20", "--out", str(out)])
    assert code == EXIT_OK
    comments, rows = read_csv(out)
    assert len(rows) == 1 + 20
    assert all(row[5] == "True" for row in rows[1:])
    assert "# violations=0" in comments


# ========== DETERMINISM AND CONFIG ==========
def test_repeated_runs_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert main(["equiv-check", "--radix", "3^4", "--seed", "7", "--corpus", "10", "--out", str(out)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_rows_do_not_depend_on_threads(tmp_path):
    single, pooled = tmp_path / "one.csv", tmp_path / "four.csv"
    assert main(["lebesgue-scan", "--radix", "3^7", "--n-stop", "1500", "--out", str(single)]) == EXIT_OK
    assert main(["lebesgue-scan", "--radix", "3^7", "--n-stop", "1500", "--threads", "4", "--out", str(pooled)]) == EXIT_OK
    assert read_csv(single)[1] == read_csv(pooled)[1]


def test_config_file_and_precedence(tmp_path, monkeypatch):
    config = tmp_path / "run.conf"
    config.write_text("radix=3^4\nseed=5\n", encoding="utf-8")
    out = tmp_path / "lemma1.csv"
    monkeypatch.setenv("VILENKIN_RADIX", "2^4")

    assert main(["lemma1", "--out", str(out)]) == EXIT_OK
    assert any(line.startswith("# radix=2^4 ") for line in read_csv(out)[0])

    assert main(["lemma1", "--config", str(config), "--out", str(out)]) == EXIT_OK
    assert any(line.startswith("# radix=3^4 ") for line in read_csv(out)[0])

    assert main(["lemma1", "--config", str(config), "--radix", "2^5", "--out", str(out)]) == EXIT_OK
    comments = read_csv(out)[0]
    assert any(line.startswith("# radix=2^5 depth=5 seed=5 ") for line in comments)


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("radix=2^4\ncolour=blue\n", encoding="utf-8")
    assert main(["lemma1", "--config", str(config)]) == EXIT_USAGE
    assert "unknown config key" in capsys.readouterr().err


def test_invalid_radix(capsys):
    assert main(["lemma1", "--radix", "1,2"]) == EXIT_USAGE
    assert "invalid-radix" in capsys.readouterr().err


def test_unknown_experiment_is_usage_error():
    with pytest.raises(SystemExit) as exit_info:
        main(["fourier-magic"])
    assert exit_info.value.code == EXIT_USAGE
