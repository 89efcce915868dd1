import csv
import io
import json

import pytest

from diqpq.cli import angle, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_angle_parser():
    assert angle("pi/2") == pytest.approx(1.5707963267948966)
    assert angle("2*pi/3") == pytest.approx(2.0943951023931953)
    assert angle("0.25") == 0.25


def test_angles_exact_payload(capsys):
    code, out, _ = run(capsys, "angles", "--theta", "1.5707963268")
    assert code == 0
    assert out.strip() == '{"phi":0.785398163,"psi1":0.785398163,"psi2":2.356194490,"p_max":0.853553391}'


def test_angles_pi_6_and_domain(capsys):
    code, out, _ = run(capsys, "angles", "--theta", "0.5235987756")
    assert json.loads(out)["p_max"] == 0.779508497
    code, out, err = run(capsys, "angles", "--theta", "0")
    assert code == 2 and out == "" and "theta" in err


def test_pmax_curve(capsys):
    code, out, _ = run(capsys, "pmax-curve", "--min", "0.01", "--max", "1.5707963", "--steps", "100")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta", "p_max"]
    values = [float(r[1]) for r in rows[1:]]
    assert len(values) == 100 and values == sorted(values)
    assert abs(values[-1] - 0.853553) <= 1e-5
    assert rows[1][0] == "0.010000000"
    code, out, _ = run(capsys, "pmax-curve", "--min", "0.3", "--max", "1.0", "--steps", "1")
    assert len(out.strip().splitlines()) == 2


def test_sample_size(capsys):
    code, out, _ = run(capsys, "sample-size", "--theta", "pi/2", "--epsilon", "0.01", "--gamma", "0.01")
    payload = json.loads(out)
    assert (payload["m_opt"], payload["n"]) == (31605, 63210)
    _, out, _ = run(capsys, "sample-size", "--theta", "pi/2", "--epsilon", "0.1", "--gamma", "0.01")
    assert json.loads(out)["m_opt"] == 317
    _, out, _ = run(capsys, "sample-size", "--gamma", "0.9999999")
    assert json.loads(out)["m_opt"] <= 2
    _, out, _ = run(capsys, "sample-size", "--database-size", "100000")
    assert json.loads(out)["repetitions"] == 4


def test_sample_size_sweep(capsys):
    _, out, _ = run(capsys, "sample-size", "--sweep", "epsilon", "--range", "0.01:0.1:2")
    assert out == "axis_value,m_opt\n0.010000000,31605\n0.100000000,317\n"
    code, _, _ = run(capsys, "sample-size", "--sweep", "p_max", "--range", "0.5:0.9:5", "--output", "json")
    assert code == 0
    with pytest.raises(SystemExit) as exc:
        main(["sample-size", "--sweep", "epsilon"])
    assert exc.value.code == 2


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--m", "10000", "--n", "20000", "--eps-chsh", "1e-6", "--eps-qpq", "1e-6")
    payload = json.loads(out)
    assert code == 0
    assert payload["delta"] == 0.026282609 and payload["nu"] == 0.037171080
    assert run(capsys, "bounds", "--m", "10", "--n", "10")[0] == 2
    _, out, _ = run(capsys, "bounds", "--m", "10", "--n", "20", "--eps-qpq", "1")
    assert json.loads(out)["nu"] == 0.0


def test_attack_report(capsys):
    _, out, _ = run(capsys, "attack", "--theta", "pi/2", "--epsilon", "0.01")
    payload = json.loads(out)
    assert payload["threshold_paper"] == 0.155377397
    assert payload["threshold_exact"] == 0.153490367
    assert payload["additional_leakage_at_threshold"] == 0.024142136
    _, out, _ = run(capsys, "attack", "--r", "100", "--n", "63210")
    assert json.loads(out)["threshold_partial"] == 0.5
    assert run(capsys, "attack", "--r", "100")[0] == 2


def test_attack_sweep(capsys):
    _, out, _ = run(capsys, "attack", "--sweep-eps-a", "0:0.5:51")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["epsilon_a", "success_prob", "accepted", "leakage_fraction"]
    assert len(rows) == 51
    flags = [r["accepted"] for r in rows]
    flip = flags.index("false")
    assert set(flags[:flip]) == {"true"} and set(flags[flip:]) == {"false"}
    assert float(rows[flip - 1]["epsilon_a"]) <= 0.153490367 < float(rows[flip]["epsilon_a"])


def test_run_transcript(capsys, tmp_path):
    target = tmp_path / "t.json"
    argv = ["run", "--epsilon", "0.05", "--gamma", "0.05", "--seed", "7", "--include-rounds", "--output-path", str(target)]
    _, out, _ = run(capsys, *argv)
    payload = json.loads(target.read_text())
    assert out == ""
    assert payload["seed"] == 7
    assert len(payload["rounds"]) == payload["params"]["m"]


def test_run_summary_adversary(capsys):
    _, out, _ = run(capsys, "run", "--m", "2000", "--adv-eps-a", "0.4", "--trials", "20")
    payload = json.loads(out)
    assert payload["acceptance_rate"] == 0.0
    assert payload["adversary"]["eps_a"] == 0.4
    assert run(capsys, "run", "--adv-r", "4")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--epsilon", "0.05", "--gamma", "0.05", "--seed", "3", "--adv-eps-a", "0.1"],
        ["run", "--epsilon", "0.05", "--gamma", "0.05", "--seed", "3", "--trials", "16"],
        ["verify", "--suite", "theorem1", "--trials", "50"],
    ],
)
def test_byte_identical_across_threads(capsys, argv):
    outputs = {run(capsys, *argv, "--threads", str(t))[1] for t in (1, 3, 8)}
    assert len(outputs) == 1


def test_verify_formulas(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "formulas")
    payload = json.loads(out)
    assert code == 0 and payload["passed"]
    assert payload["checks"][0]["value"] < 1e-12


def test_verify_bounds_and_leakage(capsys):
    assert run(capsys, "verify", "--suite", "bounds")[0] == 0
    assert run(capsys, "verify", "--suite", "leakage", "--trials", "20000")[0] == 0
