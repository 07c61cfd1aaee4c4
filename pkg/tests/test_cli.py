import pytest

from compactlin.cli import main
from compactlin.io import parse_instance, serialize_instance
from compactlin import zoo


@pytest.fixture
def files(tmp_path, example_a, example_b):
    a = tmp_path / "exampleA.bqp"
    b = tmp_path / "exampleB.bqp"
    a.write_text(serialize_instance(example_a))
    b.write_text(serialize_instance(example_b))
    return a, b


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_plan(capsys, files):
    code, out, _ = run(capsys, "plan", files[0])
    assert code == 0
    assert "B[1] = {3, 4}" in out and "Q = (1,3) (1,4) (2,3) (2,4)" in out


def test_plan_with_weights(capsys, files):
    code, out, _ = run(capsys, "plan", files[1], "--weights", "1,1", "--method", "milp")
    assert code == 0 and "B[1] = {1, 2, 3}" in out


def test_verify_theorem2_example_a(capsys, files):
    code, out, _ = run(capsys, "verify", files[0], "--theorem", "2")
    assert code == 0 and "result: pass" in out


def test_verify_theorem1_general(capsys, files):
    code, out, _ = run(capsys, "verify", files[1], "--theorem", "1", "--regime", "general")
    assert code == 0 and "result: pass" in out and "regime: general" in out


def test_verify_regime_mismatch_is_usage_error(capsys, files):
    code, _, err = run(capsys, "verify", files[1], "--theorem", "2")
    assert code == 2 and "non-unit" in err


def test_verify_theorem3_qtsp(capsys, tmp_path):
    path = tmp_path / "t.bqp"
    assert run(capsys, "gen", "qtsp", "--v", "4", "--seed", "7", "--out", path)[0] == 0
    code, out, _ = run(capsys, "verify", path, "--theorem", "3")
    assert code == 0 and "result: pass" in out


def test_gen_is_deterministic(capsys, tmp_path):
    one, two = tmp_path / "1.bqp", tmp_path / "2.bqp"
    run(capsys, "gen", "qtsp", "--v", "4", "--seed", "7", "--out", one)
    run(capsys, "gen", "qtsp", "--v", "4", "--seed", "7", "--out", two)
    assert one.read_bytes() == two.read_bytes()
    assert parse_instance(one.read_text()).n == 6


def test_gen_random_and_qap(capsys):
    code, out, _ = run(capsys, "gen", "random", "--n", "7", "--k", "2", "--seed", "3", "--assignment")
    assert code == 0 and parse_instance(out).n == 7
    code, out, _ = run(capsys, "gen", "qap", "--n", "2")
    assert code == 0 and parse_instance(out) == zoo.gen_qap(zoo.QapSpec(2))


def test_gen_bad_size(capsys):
    code, _, err = run(capsys, "gen", "qap", "--n", "9")
    assert code == 2 and "QAP" in err


def test_linearize_writes_lp(capsys, files, tmp_path):
    out = tmp_path / "m.lp"
    assert run(capsys, "linearize", files[0], "--method", "compact", "--out", out)[0] == 0
    text = out.read_text()
    assert text.count("cmp_k") == 4 and text.count("orig_k") == 2
    assert run(capsys, "linearize", files[0], "--method", "standard", "--out", out)[0] == 0
    assert "mc_lb_1_3" in out.read_text()


def test_compare(capsys, files):
    code, out, _ = run(capsys, "compare", files[0])
    assert code == 0 and "delta: 0" in out


def test_match(capsys):
    code, out, _ = run(capsys, "match", "qtsp", "--size", "5")
    assert code == 0 and "compact rows: 20" in out and "match: yes" in out


def test_reports_are_deterministic(capsys, files):
    first = run(capsys, "verify", files[1], "--theorem", "1", "--regime", "general")
    assert run(capsys, "verify", files[1], "--theorem", "1", "--regime", "general") == first


def test_usage_errors(capsys, files, tmp_path):
    assert run(capsys, "plan")[0] == 2
    assert run(capsys, "verify", files[0], "--theorem", "4")[0] == 2
    assert run(capsys, "plan", files[0], "--weights", "oops")[0] == 2
    assert run(capsys, "plan", tmp_path / "missing.bqp")[0] == 2
    bad = tmp_path / "bad.bqp"
    bad.write_text("n 2\n[equations]\n1 1 1:x\n")
    code, _, err = run(capsys, "plan", bad)
    assert code == 2 and ":3: syntax-error" in err


def test_verification_failure_exit_code(capsys, files, monkeypatch):
    from compactlin import cli
    from compactlin.verifier import ConsistencyReport

    def failing(inst, plan, cap=25):
        report = ConsistencyReport(inst.name, {((1, 3), "mc_lb"): 1}, 1)
        return report

    monkeypatch.setattr(cli, "verify_theorem1", failing)
    code, out, _ = run(capsys, "verify", files[0], "--theorem", "1")
    assert code == 1 and "FAIL" in out
