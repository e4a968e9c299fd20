import json

import pytest

from hypeq.cli import FAIL, OK, UNDECIDED, USAGE, main, run


def payload(argv, env=None):
    res = run(list(argv) + ["--json"], env or {})
    return res, json.loads(res.render()) if res.payload is not None else None


@pytest.fixture(scope="module")
def bundles(tmp_path_factory):
    root = tmp_path_factory.mktemp("bundles")
    out = {}
    for name in ("worked-hy", "mismatched", "tampered-legendre", "partial-legendre", "double-legendre"):
        res = run(["catalog", "bundle", name, "--json"], {})
        path = root / f"{name}.json"
        path.write_text(res.render(), encoding="utf-8")
        out[name] = str(path)
    return out


def test_classify_example():
    res, data = payload(["classify", "--f", "ux^2"])
    assert res.code == OK and data["label"] == "HyPrime"


def test_classify_indeterminate_exit_code():
    res, data = payload(["classify", "--f", "(sin(u)^2 + cos(u)^2 - 1)*ux*exp(u)"])
    assert res.code == UNDECIDED and data["label"] == "Indeterminate"


def test_reduce_to_wave_example():
    res, data = payload(["reduce-to-wave", "--f", "ux*uy"])
    assert res.code == OK and data["theta"] == "exp(u)" and data["verified"] is True


def test_reduce_to_wave_rejects_non_hxy():
    res, _ = payload(["reduce-to-wave", "--f", "ux^2"])
    assert res.code == FAIL


def test_verify_worked_bundle(bundles):
    res, data = payload(["verify", "--bundle", bundles["worked-hy"], "--numeric", "1000"])
    assert res.code == OK and data["numeric"]["passed"] and data["numeric"]["max_abs_residual"] < 1e-9


def test_verify_failures(bundles):
    res, data = payload(["verify", "--bundle", bundles["mismatched"], "--numeric", "100"])
    assert res.code == FAIL and data["numeric"]["max_abs_residual"] > 0.1
    res, data = payload(["verify", "--bundle", bundles["tampered-legendre"], "--contact"])
    assert res.code == FAIL and not data["contact"]["passed"]


@pytest.mark.parametrize("argv", [["classify"], ["classify", "--f", "ux^"], ["frobnicate"], ["catalog", "show", "kdv"], ["verify", "--bundle", "/nonexistent.json"]])
def test_usage_errors(argv):
    res = run(argv, {})
    assert res.code == USAGE and res.diagnostics


def test_compose_legendre_with_itself(bundles):
    res, data = payload(["compose", "--bundle", bundles["partial-legendre"], "--bundle", bundles["partial-legendre"]])
    assert res.code == OK


def test_darboux_subcommands():
    res, data = payload(["darboux", "f-from-theta", "--expr", "exp(u)"])
    assert res.code == OK and data["f"] == "ux*uy"
    res, data = payload(["darboux", "gauge", "--expr", "-1/ux - y", "--gauge", "2*eta"])
    assert res.code == OK


def test_wave_symmetry_subcommands(bundles):
    res, data = payload(["wave-symmetry", "verify", "--bundle", bundles["double-legendre"], "--numeric", "200"])
    assert res.code == OK
    res, data = payload(["wave-symmetry", "build", "--c", "2", "--X", "ux", "--Y", "uy", "--theta1", "eta", "--theta2", "eta"])
    assert res.code == OK
    res, data = payload(["wave-symmetry", "catalog"])
    assert res.code == OK


def test_json_output_is_deterministic(bundles):
    argv = ["verify", "--bundle", bundles["worked-hy"], "--numeric", "100", "--json"]
    assert run(argv, {}).render() == run(argv, {}).render()


def test_seed_precedence(tmp_path):
    base = ["catalog", "templates", "--n", "2", "--json"]
    assert json.loads(run(base, {}).render())["seed"] == 42
    assert json.loads(run(base, {"HYPEQ_SEED": "7"}).render())["seed"] == 7
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 9}), encoding="utf-8")
    assert json.loads(run(base + ["--config", str(cfg)], {"HYPEQ_SEED": "7"}).render())["seed"] == 9
    assert json.loads(run(base + ["--config", str(cfg), "--seed", "11"], {"HYPEQ_SEED": "7"}).render())["seed"] == 11


@pytest.mark.parametrize("argv", [["classify", "--f", "sin(u)"], ["reduce-to-wave", "--f", "ux*uy"], ["catalog", "show", "wave"]])
def test_human_and_json_agree(argv):
    human = run(argv, {})
    machine = run(argv + ["--json"], {})
    assert human.code == machine.code
    assert human.payload == machine.payload
    assert not human.render().startswith("{")


def test_main_prints(capsys):
    assert main(["classify", "--f", "0"]) == OK
    assert "Hxy" in capsys.readouterr().out
    assert main(["classify"]) == USAGE
    assert "error" in capsys.readouterr().err
