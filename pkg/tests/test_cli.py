import json
import os

import jsonschema
import pytest

from eigenwl.cli import SCAN_REPORT_SCHEMA, main
from eigenwl.graphs import complete_graph, cycle_graph, parse_graph6, write_graph6
from eigenwl.witnesses import parse_witness_corpus

C6 = "EhEG"
TWO_TRIANGLES = "EwCW"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_compare_distinguished_exit_code(capsys):
    code, out, _ = run_cli(capsys, "compare", "--alg", "epwl:A", "--g", C6, "--h", TWO_TRIANGLES)
    assert code == 1
    detail = json.loads(out)
    assert detail["distinguished"] is True
    assert detail["algorithm"] == "epwl:A"


def test_compare_indistinguishable_exit_code(capsys):
    code, out, _ = run_cli(capsys, "compare", "--alg", "wl1", "--g", C6, "--h", TWO_TRIANGLES)
    assert code == 0
    assert json.loads(out)["distinguished"] is False


def test_compare_bad_spec_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "compare", "--alg", "zzz", "--g", C6, "--h", C6)
    assert code == 2
    assert "error" in err


def test_compare_bad_graph6_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "compare", "--alg", "wl1", "--g", "A", "--h", C6)
    assert code == 2
    assert "truncated" in err


def test_scan_report_schema_and_determinism(tmp_path, capsys):
    corpus = tmp_path / "corpus.g6"
    corpus.write_text("# demo corpus\n" + "\n".join([C6, TWO_TRIANGLES, "Bw"]) + "\n")
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    csv_path = tmp_path / "rel.csv"
    for out in (out_a, out_b):
        code, _, _ = run_cli(
            capsys,
            "scan",
            "--algs",
            "wl1,epwl:A,fwl2",
            "--corpus",
            str(corpus),
            "--out",
            str(out),
            "--csv",
            str(csv_path),
        )
        assert code == 0
    assert out_a.read_bytes() == out_b.read_bytes()  # byte-identical reruns
    report = json.loads(out_a.read_text())
    jsonschema.validate(report, SCAN_REPORT_SCHEMA)
    assert report["algorithms"] == ["wl1", "epwl:A", "fwl2"]
    assert "timing" not in report
    relations = {(r["a"], r["b"]): r for r in report["relations"]}
    wl1_vs_epwl = relations[("wl1", "epwl:A")]
    assert wl1_vs_epwl["relation"] == "b_strictly_finer"
    assert wl1_vs_epwl["witnesses_a_not_finer"]  # pair merged by wl1, split by epwl
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "alg_a,alg_b,relation"
    assert len(lines) == 4


def test_scan_connected_corpus_shows_strict_refinement(tmp_path, capsys):
    """On the connected corpus up to 6 vertices, the projection refinement
    is strictly finer than plain vertex refinement, with witnesses."""
    from eigenwl.graphs import enumerate_graphs

    corpus = tmp_path / "n6.g6"
    lines = []
    for n in range(2, 7):
        lines += [write_graph6(g) for g in enumerate_graphs(n, connected_only=True)]
    corpus.write_text("\n".join(lines) + "\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(
        capsys, "scan", "--algs", "wl1,epwl:A", "--corpus", str(corpus), "--out", str(out)
    )
    assert code == 0
    report = json.loads(out.read_text())
    (rel,) = report["relations"]
    assert rel["relation"] == "b_strictly_finer"
    assert rel["witnesses_a_not_finer"]  # pairs merged by wl1, split by epwl
    i, j = rel["witnesses_a_not_finer"][0]
    assert report["graphs"][i] != report["graphs"][j]


def test_scan_single_graph_all_equivalent(tmp_path, capsys):
    corpus = tmp_path / "one.g6"
    corpus.write_text(C6 + "\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(
        capsys, "scan", "--algs", "wl1,pswl", "--corpus", str(corpus), "--out", str(out)
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert all(r["relation"] == "equivalent" for r in report["relations"])
    assert all(len(buckets) == 1 for buckets in report["buckets"].values())


def test_scan_timings_only_on_request(tmp_path, capsys):
    corpus = tmp_path / "one.g6"
    corpus.write_text(C6 + "\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(
        capsys, "scan", "--algs", "wl1", "--corpus", str(corpus), "--out", str(out), "--timings"
    )
    assert code == 0
    assert "wl1" in json.loads(out.read_text())["timing"]


def test_scan_missing_corpus_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "scan", "--algs", "wl1", "--corpus", "/nonexistent.g6")
    assert code == 2


def test_distances_csv(capsys):
    code, out, _ = run_cli(capsys, "distances", "--kind", "rd", "--g", "Bw")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "u,v,value"
    assert len(lines) == 1 + 9
    assert lines[1] == "0,0,0"


def test_distances_infinity(capsys):
    code, out, _ = run_cli(capsys, "distances", "--kind", "spd", "--g", "C`")  # 2K2 on 4 vertices
    assert code == 0
    assert any(line.endswith(",inf") for line in out.splitlines())


def test_furer_and_twist_round_trip(capsys):
    code, out, _ = run_cli(capsys, "furer", "--base", "Bw")
    assert code == 0
    product = parse_graph6(out.strip())
    assert product.n == 6
    code, out2, _ = run_cli(capsys, "furer", "--base", "Bw", "--twist", "0-1")
    twisted = parse_graph6(out2.strip())
    assert twisted.n == 6 and twisted != product


def test_token_command(capsys):
    code, out, _ = run_cli(capsys, "token", "--k", "2", "--g", C6)
    assert code == 0
    assert parse_graph6(out.strip()).n == 15


def test_hunt_is_deterministic_and_appends(tmp_path, capsys):
    out = tmp_path / "w.txt"
    argv = [
        "hunt",
        "--a",
        "wl1",
        "--b",
        "epwl:A",
        "--max-base-n",
        "3",
        "--budget",
        "4",
        "--seed",
        "9",
        "--out",
        str(out),
    ]
    code, _, _ = run_cli(capsys, *argv)
    assert code == 0
    first = out.read_text()
    witnesses, statuses = parse_witness_corpus(first)
    assert witnesses and statuses
    code, _, _ = run_cli(capsys, *argv)
    assert out.read_text() == first  # rerun appends nothing new


def test_verify_quick_smoke(capsys):
    code, out, _ = run_cli(
        capsys,
        "verify",
        "--quick",
        "--corpus-max-n",
        "4",
        "--random-graphs",
        "4",
        "--hierarchy-random-graphs",
        "4",
        "--parity-max-base-n",
        "3",
    )
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith(("PASS", "FAIL"))]
    assert len(lines) == 9
    assert all(line.startswith("PASS") for line in lines)


def test_verify_empty_corpus_vacuous(capsys):
    code, _, err = run_cli(capsys, "verify", "--corpus-max-n", "0")
    assert code == 0
    assert "vacuous" in err


def test_config_file_and_env_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("digits=5\nseed=7\n")
    corpus = tmp_path / "c.g6"
    corpus.write_text(C6 + "\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(
        capsys, "scan", "--algs", "wl1", "--corpus", str(corpus), "--out", str(out), "--config", str(cfg)
    )
    assert code == 0
    meta = json.loads(out.read_text())["meta"]
    assert meta["digits"] == 5 and meta["seed"] == 7
    monkeypatch.setenv("EIGENWL_DIGITS", "4")
    code, _, _ = run_cli(
        capsys, "scan", "--algs", "wl1", "--corpus", str(corpus), "--out", str(out), "--config", str(cfg)
    )
    assert json.loads(out.read_text())["meta"]["digits"] == 4  # env beats file
    code, _, _ = run_cli(
        capsys,
        "scan",
        "--algs",
        "wl1",
        "--corpus",
        str(corpus),
        "--out",
        str(out),
        "--config",
        str(cfg),
        "--digits",
        "6",
    )
    assert json.loads(out.read_text())["meta"]["digits"] == 6  # flag beats env


def test_bad_config_line_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("digits 5\n")
    code, _, err = run_cli(capsys, "verify", "--config", str(cfg))
    assert code == 2
    assert "key=value" in err


def test_run_config_text_round_trip(tmp_path):
    import argparse

    from eigenwl.cli import RunConfig

    original = RunConfig(seed=99, digits=5, budget=7, eig_gap_scale=1e-9, jobs=2)
    path = tmp_path / "run.cfg"
    path.write_text(original.to_text())
    restored = RunConfig.from_sources(str(path), argparse.Namespace())
    assert restored == original


def test_unknown_config_key_rejected(tmp_path):
    import argparse

    import pytest as _pytest

    from eigenwl.cli import RunConfig
    from eigenwl.refinement import UsageError

    path = tmp_path / "run.cfg"
    path.write_text("not_a_key=3\n")
    with _pytest.raises(UsageError, match="unknown config key"):
        RunConfig.from_sources(str(path), argparse.Namespace())
