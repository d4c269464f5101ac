import csv
import io
import json
import math
from importlib import resources

import jsonschema
import pytest

from steinweiss import cli
from steinweiss.errors import DomainError

SCHEMA = json.loads(resources.files("steinweiss").joinpath("record.schema.json").read_text())


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, stdout=out)
    return code, out.getvalue()


def rows(argv):
    code, text = run(argv)
    records = [json.loads(line) for line in text.splitlines()]
    for r in records:
        jsonschema.validate(r, SCHEMA)
    return code, records


def test_constants_pitt_example():
    code, (r,) = rows(["constants", "pitt", "--n", "4", "--alpha", "2", "--format", "json"])
    assert code == 0
    assert r["value"] == pytest.approx(4 * math.pi**2, rel=1e-14)
    assert r["formula_id"] == "pitt"


def test_constants_trace_example():
    code, (r,) = rows(["constants", "trace", "--n", "3"])
    assert code == 0 and r["pass"] is True
    assert r["value"] == pytest.approx(math.pi / 4, rel=1e-14)


def test_constants_gradient_example():
    _, (r,) = rows(["constants", "gradient-d", "--n", "3", "--alpha", "2"])
    assert r["value"] == pytest.approx(144 / 25 * math.pi**2, rel=1e-12)
    assert r["argmax_k"] == 1


def test_constants_iterated_gradient_matches_closed_form():
    code, (r,) = rows(["constants", "iter-grad", "--n", "5", "--alpha", "1.5", "--ell", "2"])
    assert code == 0 and r["pass"] is True


def test_kernel_l1_example():
    code, (r,) = rows(["kernel", "l1", "--n", "4", "--alpha", "2", "--ell", "0", "--tol", "1e-8"])
    assert code == 0
    assert r["value"] == pytest.approx(2.0, rel=1e-6)
    assert r["deviation"] <= 1e-6
    assert r["evaluations"] > 0 and "est_error" in r


def test_kernel_recursion_example():
    code, (r,) = rows(["kernel", "recursion", "--n", "3", "--alpha", "1", "--ell", "0", "--t", "2"])
    assert code == 0 and r["value"] <= 1e-8


def test_kernel_riesz_example():
    code, (r,) = rows(["kernel", "riesz", "--n", "3", "--beta", "2", "--delta", "2"])
    assert code == 0
    assert r["value"] == pytest.approx(math.pi**3, rel=1e-4)
    assert r["check"] == pytest.approx(math.pi**3, rel=1e-12)


def test_kernel_kappa_reports_both_forms():
    code, (r,) = rows(["kernel", "kappa", "--n", "4", "--rho", "1", "--sigma", "1"])
    assert code == 0 and r["pass"] is True
    assert r["printed_form"] != pytest.approx(r["check"], rel=1e-3)


def test_verify_hardy_rellich_suite():
    code, recs = rows(["verify", "hardy-rellich", "--m", "8", "--trials", "50", "--seed", "1"])
    assert code == 0
    assert len(recs) == 51
    assert all(r["pass"] for r in recs)
    assert all(r["integration_by_parts_residual"] <= 1e-8 for r in recs[:-1])
    assert recs[-1]["quantity"] == "hardy-rellich_summary"


def test_verify_log_suite():
    code, recs = rows(["verify", "log", "--m", "4", "--trials", "50", "--seed", "1"])
    assert code == 0 and all(r["pass"] for r in recs)


def test_verify_pitt_suite_example():
    code, recs = rows(["verify", "pitt", "--m", "5", "--alpha", "2", "--trials", "20", "--seed", "7"])
    assert code == 0 and len(recs) == 21


def test_verify_sharpness_example():
    code, (r,) = rows(["verify", "sharpness", "--n", "4", "--alpha", "2", "--sigma-u", "50"])
    assert code == 0
    assert r["fraction_of_sharp"] >= 0.99


def test_verify_operator_probe():
    code, (r,) = rows(["verify", "operator", "--n", "4", "--alpha", "2", "--sigma-u", "50"])
    assert code == 0 and r["fraction_of_sharp"] >= 0.99


def test_seed_gives_byte_identical_output():
    argv = ["verify", "gradient", "--m", "4", "--alpha", "1", "--trials", "5", "--seed", "3"]
    assert run(argv) == run(argv)
    other = run(argv[:-1] + ["4"])
    assert other[1] != run(argv)[1]


def test_regimes_sign_change_n3():
    code, recs = rows(["regimes", "--n", "3", "--alpha-grid", "0.05:0.05:0.35"])
    assert code == 0
    lam = {round(r["params"]["alpha"], 2): r["log_ratio_k1_k0"] for r in recs}
    assert lam[0.1] < 0 < lam[0.2]


def test_regimes_n6_labels():
    code, recs = rows(["regimes", "--n", "6", "--alpha-grid", "0.5:0.5:5.5"])
    assert code == 0
    for r in recs:
        a = r["params"]["alpha"]
        if a <= 3:
            assert r["argmax_k"] == 0
        if a >= 4:
            assert r["argmax_k"] == 1


def test_regimes_n2_always_k1():
    code, recs = rows(["regimes", "--n", "2", "--alpha-grid", "0.1:0.1:1.9"])
    assert code == 0 and {r["argmax_k"] for r in recs} == {1}


def test_table_cor1():
    code, recs = rows(["table", "cor1"])
    assert code == 0
    got = {r["params"]["n"]: r["value"] for r in recs}
    assert got[3] == pytest.approx(144 / 25, rel=1e-12)
    assert got[4] == pytest.approx(4 / 3, rel=1e-12)
    assert got[5] == pytest.approx(16 / 25, rel=1e-12)
    assert all(r["pass"] for r in recs)


def test_table_trace():
    _, recs = rows(["table", "trace"])
    got = {r["params"]["n"]: r["value"] for r in recs}
    g = math.gamma(1.25) / math.gamma(1.75)
    assert got[2] == pytest.approx(2.5 * g**2, rel=1e-12)
    assert got[3] == pytest.approx(math.pi / 4, rel=1e-12)
    assert got[4] == pytest.approx(0.5 * g**2, rel=1e-12)


def test_table_anchors():
    code, recs = rows(["table", "anchors"])
    assert code == 0
    by = {(r["quantity"], json.dumps(r["params"])): r for r in recs}
    assert by[("trace_log_ratio_printed_form", '{"w": 1.0}')]["pass"] is True
    # the directly computed trace anchor is ln 16 away from the tabulated one
    direct = by[("trace_log_ratio", '{"w": 1.0}')]
    assert direct["value"] - direct["check"] == pytest.approx(math.log(16), abs=1e-3)
    assert by[("n3_log_ratio", '{"alpha": 0.2}')]["pass"] is True


def test_csv_output_parses():
    code, text = run(["table", "cor1", "--format", "csv"])
    assert code == 0
    assert text.endswith("\r\n")
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert len(parsed) == 10
    assert float(parsed[0]["value"]) == pytest.approx(144 / 25, rel=1e-15)
    assert parsed[0]["params.n"] == "3"


def test_text_output_six_digits():
    _, text = run(["constants", "pitt", "--n", "4", "--alpha", "2", "--format", "text"])
    assert "value=39.4784" in text and "39.47842" not in text


def test_json_has_seventeen_digits():
    _, text = run(["constants", "pitt", "--n", "4", "--alpha", "2"])
    assert "39.478417604357" in text
    assert json.loads(text)["value"] == pytest.approx(4 * math.pi**2, rel=1e-15)


def test_exit_code_validation():
    assert run(["constants", "pitt", "--n", "4", "--alpha", "4"])[0] == 2
    assert run(["constants", "pitt", "--n", "4"])[0] == 2
    assert run(["regimes", "--n", "3", "--alpha-grid", "1:0:2"])[0] == 2
    assert run(["verify", "pitt", "--trials", "0"])[0] == 2


def test_exit_code_quadrature(monkeypatch):
    from steinweiss import kernels
    from steinweiss.errors import QuadratureError

    def boom(*_a, **_k):
        raise QuadratureError("no convergence", 1e-3)

    monkeypatch.setattr(kernels, "psi_L1_numeric", boom)
    assert run(["kernel", "l1", "--n", "3", "--alpha", "1"])[0] == 3


def test_exit_code_verification_failure(monkeypatch, capsys):
    from steinweiss import verify

    real = verify.pitt_ratio

    def failing(f, alpha):
        rep = real(f, alpha)
        rep.passed = False
        return rep

    monkeypatch.setattr(verify, "pitt_ratio", failing)
    code, _ = run(["verify", "pitt", "--m", "3", "--alpha", "1", "--trials", "2"])
    assert code == 4
    assert "failed: pitt" in capsys.readouterr().err


def test_parse_grid():
    assert cli.parse_grid("0.1:0.1:0.5") == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert cli.parse_grid("0.5:0.5:5.5")[-1] == 5.5
    assert cli.parse_grid("1:1:1") == [1.0]
    for bad in ("1:2", "a:1:2", "1:-1:2", "2:1:1", "0:inf:1"):
        with pytest.raises(DomainError):
            cli.parse_grid(bad)


def test_help_documents_deviations(capsys):
    for sub, needle in (("constants", "1/pi^2"), ("kernel", "misprint")):
        with pytest.raises(SystemExit):
            cli.main([sub, "--help"])
        assert needle in capsys.readouterr().out
