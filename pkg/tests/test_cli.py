import io
import json
import subprocess
import sys

import pytest

from padic_dyn.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_roots_example():
    code, out, _ = call("roots", "--prime", "7", "--a", "1/1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["g"] == 3
    assert sorted(int(r["unit"]) % 49 for r in doc["roots"]) == [1, 18, 30]


def test_roots_of_unity():
    code, out, _ = call("roots", "--prime", "31", "--k", "15")
    assert code == EXIT_OK and json.loads(out)["g"] == 15


def test_periodic_m2_rejected():
    code, out, err = call("periodic", "--prime", "31", "--a", "1/1", "--m", "2")
    assert code == EXIT_DOMAIN
    doc = json.loads(out)
    assert doc["error"] == "PeriodRejectedError"
    assert "no solutions other than the fixed points" in doc["message"]
    assert "m=2" in err


def test_classify_outside():
    code, out, _ = call("classify", "--prime", "5", "--a", "v:1", "--radius", "-1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["region"] == "OUTSIDE"
    assert (doc["even_limit"], doc["odd_limit"]) == ("inf", "0")


def test_periodic_p31_m4():
    code, out, _ = call("periodic", "--prime", "31", "--m", "4")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert len(doc["mm_members"]) == 12 and len(doc["cycles"]) == 3


def test_fixed_points_and_bound():
    code, out, _ = call("fixed-points", "--prime", "2")
    assert code == EXIT_OK and json.loads(out)["character"] == "ATTRACTING"
    code, out, _ = call("bound", "--prime", "7", "--m", "2", "--radius", "1")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["kind"] == "S" and doc["satisfied"]


def test_norm_and_distance():
    code, out, _ = call("norm", "--prime", "2", "--x", "9/8", "--y", "1/8")
    doc = json.loads(out)
    assert doc["norm"] == {"p": 2, "num": -3, "den": 1}
    assert doc["distance"]["num"] == 0  # 9/8 - 1/8 = 1


def test_iterate_csv_radius():
    code, out, _ = call("iterate", "--prime", "5", "--a", "v:1", "--radius", "1/2",
                        "--steps", "2", "--format", "csv")
    assert code == EXIT_OK
    assert out == "n,num,den\n0,1,2\n1,0,1\n2,1,1\n"


def test_iterate_exact_orbit():
    code, out, _ = call("iterate", "--prime", "3", "--a", "3", "--x", "1", "--steps", "2",
                        "--format", "csv")
    assert code == EXIT_OK
    rows = out.strip().split("\n")
    assert rows[0] == "n,v,unit,digits"
    assert rows[1].startswith("0,0,1,") and rows[2].startswith("1,1,1,")
    assert rows[3].startswith("2,-1,1,")


def test_pretty_and_json_agree():
    _, compact, _ = call("fixed-points", "--prime", "7")
    _, pretty, _ = call("fixed-points", "--prime", "7", "--format", "pretty")
    assert json.loads(compact) == json.loads(pretty)
    assert "\n  " in pretty


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("roots", "--nope", "1"),
    ("roots",),
    ("roots", "--prime", "7", "--precision", "4"),
    ("roots", "--prime", "7", "--q", "0"),
    ("roots", "--prime", "7", "--a", "1/0"),
    ("periodic", "--prime", "7"),
    ("roots", "--prime", "7", "--format", "csv"),
    (),
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == EXIT_USAGE and out == "" and err


def test_domain_errors():
    assert call("roots", "--prime", "9")[0] == EXIT_DOMAIN
    assert call("roots", "--prime", "3")[0] == EXIT_DOMAIN
    assert call("bound", "--prime", "7", "--m", "2", "--radius", "0")[0] == EXIT_DOMAIN


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# battery settings\nprime = 31\nm = 4\nprecision=32\n")
    code, out, _ = call("periodic", "--config", str(cfg))
    assert code == EXIT_OK and len(json.loads(out)["mm_members"]) == 12
    code, out, _ = call("periodic", "--config", str(cfg), "--m", "5")
    assert code == EXIT_OK and json.loads(out)["m"] == 5
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = red\n")
    assert call("roots", "--config", str(bad))[0] == EXIT_USAGE
    assert call("roots", "--config", str(tmp_path / "missing"))[0] == EXIT_USAGE


def test_env_seed(monkeypatch):
    argv = ("verify", "--prime", "7", "--samples", "3", "--steps", "5")
    monkeypatch.setenv("PADIC_DYN_SEED", "17")
    code, out, _ = call(*argv)
    assert code == EXIT_OK and json.loads(out)["seed"] == 17
    code, out, _ = call(*argv, "--seed", "18")
    assert json.loads(out)["seed"] == 18
    monkeypatch.setenv("PADIC_DYN_SEED", "x")
    assert call(*argv)[0] == EXIT_USAGE


def test_verify_schema_and_golden_stability():
    argv = ("verify", "--prime", "13", "--samples", "4", "--steps", "10", "--seed", "5")
    first, second = call(*argv), call(*argv)
    assert first == second and first[0] == EXIT_OK
    doc = json.loads(first[1])
    for rep in doc["reports"]:
        assert {"theorem", "seed", "samples", "failures", "undecided", "pass"} <= rep.keys()
        assert rep["undecided"] == 0


def test_verify_failure_exit_code():
    # precision 8 at p = 2 runs out of digits during contraction -> undecided, not a pass
    code, out, _ = call("verify", "--prime", "2", "--samples", "3", "--steps", "30",
                        "--precision", "8")
    assert code == EXIT_VERIFY and json.loads(out)["pass"] is False


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padic_dyn", "roots", "--prime", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["g"] == 1
