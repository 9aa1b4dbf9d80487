import io

import pytest

from hypermon.cli import RunConfig, main

EQ = "forall p. forall q. G (a[p] <-> a[q])"


def run(argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def traces(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("a;a\na;-\n")
    return str(p)


def test_monitor_violation_exit_code(traces):
    code, out = run(["monitor", EQ, traces])
    assert code == 1
    assert "verdict: Violation" in out
    assert "witness: t0 t1" in out and "t1: a;-" in out


@pytest.mark.parametrize("extra", [
    ["--mode", "offline"], ["--mode", "offline", "--jobs", "2"], ["--model", "parallel"],
    ["--model", "parallel", "--trie"], ["--model", "parallel", "--mode", "offline"],
    ["--trie"], ["--spec-analysis"], ["--trace-analysis"],
])
def test_monitor_modes_agree(traces, extra):
    code, out = run(["monitor", EQ, traces, *extra])
    assert code == 1 and "Violation" in out


def test_monitor_satisfied_from_stream(monkeypatch):
    code, out = run(["monitor", EQ], "#trace x\na\n#end\n#trace y\na\n#end\n", monkeypatch)
    assert code == 0 and out.strip() == "verdict: Satisfied"


def test_protocol_error_exit_two(monkeypatch, capsys):
    code, _ = run(["monitor", EQ], "#trace x\na\n", monkeypatch)
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_formula_error_exit_two(traces):
    assert run(["monitor", "forall p. a[q]", traces])[0] == 2


def test_trie_with_trace_analysis_rejected(traces):
    assert run(["monitor", EQ, traces, "--trie", "--trace-analysis"])[0] == 2
    with pytest.raises(ValueError):
        RunConfig(EQ, trie=True, trace_analysis=True)


def test_stats_csv_deterministic(tmp_path, traces):
    s1, s2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["monitor", EQ, traces, "--keep-going", "--stats", str(s1), "--no-timing"])
    run(["monitor", EQ, traces, "--keep-going", "--stats", str(s2), "--no-timing"])
    assert s1.read_text() == s2.read_text()
    lines = s1.read_text().splitlines()
    assert lines[0].startswith("traces_seen,")
    assert lines[-1] == "2,1,0,1,4,0,0"


def test_dump_template(traces):
    code, out = run(["monitor", EQ, traces, "--dump-template"])
    assert "a[p]" in out


def test_analyze():
    code, out = run(["analyze", EQ])
    assert code == 0 and out.splitlines()[0].startswith("symmetric: yes")
    assert run(["analyze", "exists p. a[p]"])[0] == 2


def test_monitorability():
    code, out = run(["monitorability", "forall p. G F a[p]"])
    assert code == 0 and "NotMonitorable" in out
    code, out = run(["monitorability", "forall p. exists q. G (a[p] -> b[q])", "--model", "bounded"])
    assert "ModelUnsupported" in out


def test_gen_then_monitor(tmp_path):
    tf, ff = tmp_path / "g.txt", tmp_path / "f.txt"
    assert run(["gen", "--kind", "bounded_obsdet", "--count", "20", "--length", "10",
                "--noise", "0", "--n", "4", "--out", str(tf), "--formula-out", str(ff)])[0] == 0
    code, out = run(["monitor", str(ff), str(tf), "--trace-analysis"])
    assert code == 0


def test_gen_formats():
    for fmt, marker in [("stream", "#trace t0"), ("parallel", "#step"), ("file", ";")]:
        code, out = run(["gen", "--count", "2", "--length", "3", "--aps", "a,b", "--format", fmt])
        assert marker in out


def test_bench_small():
    code, out = run(["bench", "--n", "4", "--count", "30", "--length", "12", "--no-timing"])
    assert code == 0
    rows = out.splitlines()
    assert rows[0].startswith("n,seen") and rows[1].startswith("4,30,")
