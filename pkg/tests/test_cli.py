"""CLI behavior: exit codes, structured report round trips, instance dumps."""

import json
from pathlib import Path

from npikit.cli import run

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_parse_ok(capsys):
    code, out = invoke(capsys, "parse", CORPUS / "torus.2cx")
    assert code == 0
    assert "PASS" in out


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.2cx"
    bad.write_text("complex c\nvertex v\nedge a v w\n")
    code, out = invoke(capsys, "parse", bad)
    assert code == 2
    assert "line 3" in out


def test_check_coloring_pass(capsys):
    code, _ = invoke(capsys, "check", "coloring", CORPUS / "hnn_k1.2cx",
                     "--angles", "standard")
    assert code == 0


def test_check_coloring_fail_with_witness(capsys):
    code, out = invoke(capsys, "check", "coloring", CORPUS / "aa.2cx")
    assert code == 1
    assert "witness" in out


def test_certify_standard_all_k(capsys):
    for k in (1, 2, 3, 4):
        code, out = invoke(
            capsys, "certify", "npi", CORPUS / f"hnn_pair_k{k}.2cx",
            "--sub", "K", "--fold-edge", "y1", "--angles", "standard",
            "--format", "structured",
        )
        assert code == 0
        report = json.loads(out)
        assert report["detail"]["tier"] == "relative collapsing NPI"


def test_certify_search_refutes_xyxy_pair(capsys):
    code, out = invoke(
        capsys, "certify", "npi", CORPUS / "xyxy_pair.2cx",
        "--sub", "K", "--fold-edge", "y", "--angles", "search",
        "--format", "structured",
    )
    assert code == 1
    report = json.loads(out)
    assert report["detail"]["conclusion"] == "none"


def test_audit_npi_refutes_aa(capsys):
    code, out = invoke(
        capsys, "audit", "npi", CORPUS / "aa.2cx", "--max-cells", "1",
        "--format", "structured",
    )
    assert code == 1
    report = json.loads(out)
    assert report["witnesses"][0]["chi_x"] == 1


def test_audit_npi_torus_clean(capsys):
    code, _ = invoke(capsys, "audit", "npi", CORPUS / "torus.2cx",
                     "--max-cells", "2")
    assert code == 0


def test_audit_truncation_exit_3(capsys):
    code, _ = invoke(capsys, "audit", "npi", CORPUS / "hnn_pair_k1.2cx",
                     "--max-cells", "2", "--max-configs", "2")
    assert code == 3


def test_structured_reports_round_trip(capsys):
    cases = [
        ("parse", CORPUS / "torus.2cx"),
        ("links", CORPUS / "torus.2cx"),
        ("curvature", CORPUS / "torus.2cx"),
        ("check", "coloring", CORPUS / "torus.2cx"),
        ("audit", "npi", CORPUS / "aa.2cx", "--max-cells", "1"),
    ]
    for case in cases:
        _, out = invoke(capsys, *case, "--format", "structured")
        report = json.loads(out)
        assert report["schema_version"] == 1
        assert json.loads(json.dumps(report)) == report


def test_reports_deterministic_across_jobs(capsys):
    _, out1 = invoke(capsys, "audit", "npi", CORPUS / "torus.2cx",
                     "--max-cells", "2", "--format", "structured", "--jobs", "1")
    _, out2 = invoke(capsys, "audit", "npi", CORPUS / "torus.2cx",
                     "--max-cells", "2", "--format", "structured", "--jobs", "4")
    assert out1 == out2


def test_dump_instances_round_trip(tmp_path, capsys):
    dump = tmp_path / "instances"
    code, _ = invoke(capsys, "audit", "npi", CORPUS / "aa.2cx",
                     "--max-cells", "1", "--dump-instances", dump)
    assert code == 1
    files = sorted(dump.glob("*.2cx"))
    assert files
    from npikit.formats import parse_complex, parse_map
    from npikit.maps import validate_map

    base = parse_complex((CORPUS / "aa.2cx").read_text()).complex
    text = files[0].read_text()
    head, _, maptext = text.partition("map\n")
    X = parse_complex(head).complex
    f = parse_map("map\n" + maptext, X, base)
    assert validate_map(f) == []


def test_thin_identity_on_pair(capsys):
    code, out = invoke(capsys, "thin", CORPUS / "hnn_pair_k1.2cx", "--sub", "K",
                       "--format", "structured")
    assert code == 0
    report = json.loads(out)
    assert report["detail"]["hollowed_components"] == 0


def test_lot_check_and_certify(capsys):
    code, out = invoke(capsys, "lot", "check", CORPUS / "lot123.lot",
                       "--format", "structured")
    assert code == 0
    report = json.loads(out)
    assert report["detail"]["reduced"] and report["detail"]["injective"]
    assert report["detail"]["complex_euler_characteristic"] == 0

    code, out = invoke(capsys, "lot", "certify", CORPUS / "lot5.lot",
                       "--sub", "K", "--collapse-vertex", "2",
                       "--format", "structured")
    assert code == 0
    report = json.loads(out)
    assert report["detail"]["conclusion"] == "full"


def test_out_flag_writes_report(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out = invoke(capsys, "parse", CORPUS / "torus.2cx",
                       "--format", "structured", "--out", out_path)
    assert code == 0
    assert out_path.read_text() == out


def test_usage_error_exit_2(capsys):
    assert run(["certify", "npi"]) == 2
