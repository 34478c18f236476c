import json
import math

import pytest

from abel_orbits import cli, poincare
from abel_orbits.cli import AnalysisRequest, UsageError, dumps, main, run
from abel_orbits.lyapunov import design_two_orbit_trig


def write(tmp_path, text, name="eq.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


TRIG_CRIT = "A: {trig: {c0: 2, cos: [1], sin: [0]}}\nB: {trig: {c0: 0, cos: [5], sin: [0]}}\n"
TRIG_V4 = f"A: {{trig: {{c0: 0, cos: [0], sin: [{4 * math.pi!r}]}}}}\nB: {{trig: {{c0: 0, cos: [1], sin: [0]}}}}\n"
QUAD = "A: {trig: {c0: 0}}\nB: {trig: {c0: 1}}\n"


class TestDumps:
    def test_format(self):
        text = dumps({"b": 0.1, "a": [1, 2.5, None, True], "c": {"z": float("inf")}})
        assert text.index('"a"') < text.index('"b"') < text.index('"c"')
        assert "0.10000000000000001" in text
        assert '"inf"' in text
        assert json.loads(text)["a"] == [1, 2.5, None, True]

    def test_enum_and_numpy(self):
        import numpy as np
        assert json.loads(dumps({"x": np.float64(1.5), "s": poincare.Stability.ATTRACTING})) == \
            {"x": 1.5, "s": "attracting"}


class TestCommands:
    def test_criterion_example(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "criterion", "--spec", write(tmp_path, TRIG_CRIT))
        assert code == 0
        rep = json.loads(out)["results"]["criteria"][0]
        assert rep["applies"] and rep["orbit_bound"] == 1
        assert (rep["witness"]["a"], rep["witness"]["b"]) == (1, 0)

    def test_lyapunov_example(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "lyapunov", "--spec", write(tmp_path, TRIG_V4))
        lyap = json.loads(out)["results"]["lyapunov"]
        assert code == 0 and lyap["v2"] == 0 and lyap["v3"] == 0
        assert lyap["v4"] == pytest.approx(1.0, rel=1e-15)

    def test_orbits_example(self, tmp_path, capsys):
        csv_path = tmp_path / "scan.csv"
        code, out, _ = invoke(capsys, "orbits", "--spec", write(tmp_path, QUAD), "--csv", str(csv_path))
        orbits = json.loads(out)["results"]["scan"]["orbits"]
        assert code == 0 and len(orbits) == 1 and orbits[0]["stability"] == "zero_solution"
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "series,index,u,v"
        assert any(l.startswith("trajectory,0,") for l in lines)
        assert sum(l.startswith("scan,") for l in lines) == 2001

    def test_scan_options(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "orbits", "--spec", write(tmp_path, "A: {trig: {c0: 1}}\nB: {trig: {c0: 1}}\n"),
                              "--scan-min", "-3", "--scan-max", "3", "--scan-n", "101", "--tol", "1e-9")
        d = json.loads(out)
        assert d["diagnostics"]["tolerances"]["scan"] == [-3, 3, 101, "sinh"]
        assert d["diagnostics"]["tolerances"]["rel_tol"] == 1e-9
        assert d["results"]["scan"]["nonzero_count"] == 1

    def test_analyze(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "analyze", "--spec", write(tmp_path, "A: {trig: {c0: 1}}\nB: {trig: {c0: 1}}\n"))
        d = json.loads(out)
        assert code == 0 and not d["INCONSISTENCY"]
        assert d["results"]["zero_solution"]["kind"] == "SemiStable"
        assert d["results"]["scan"]["nonzero_count"] == 1

    def test_analyze_with_linear_term(self, tmp_path, capsys):
        spec = "A: {trig: {c0: 1}}\nB: {trig: {c0: 0}}\nC: {trig: {c0: 0, cos: [0.5]}}\n"
        code, out, _ = invoke(capsys, "analyze", "--spec", write(tmp_path, spec), "--witness", "1,0,0.5")
        d = json.loads(out)
        names = [c["criterion"] for c in d["results"]["criteria"]]
        assert code == 0 and names == ["thm51", "thm52"]
        assert d["diagnostics"]["warnings"]

    def test_bifurcate(self, tmp_path, capsys):
        spec = "design: {family: trig, v4: 100, mu: 1, lambda: 0.002}\n"
        code, out, _ = invoke(capsys, "bifurcate", "--spec", write(tmp_path, spec))
        v = json.loads(out)["results"]["verification"]
        assert code == 0 and v["passes"] and v["hyperbolic_orbits"] == 2

    def test_perturb(self, tmp_path, capsys):
        spec = "perturbation: {b1: 1, a2: -0.75, b0: 0.25}\n"
        code, out, _ = invoke(capsys, "perturb", "--spec", write(tmp_path, spec), "--epsilon", "1e-3")
        d = json.loads(out)["results"]
        assert code == 0 and len(d["w_hat"]["quadrature_roots"]) == 2
        assert len(d["validation"]["orbits_found"]) == 2
        for r in d["validation"]["records"]:
            assert r["gap"] <= 1e-2

    def test_transform(self, tmp_path, capsys):
        spec = "A: {trig: {c0: 1}}\nB: {trig: {c0: -1}}\nC: {trig: {c0: 0, sin: [1]}}\n"
        code, out, _ = invoke(capsys, "transform", "--spec", write(tmp_path, spec))
        d = json.loads(out)["results"]
        assert code == 0 and d["periodic_correspondence"]
        eq = cli.parse_document(d["spec_document"]).equation
        assert eq.C.is_zero and eq.A(0.0) == pytest.approx(1.0)

    def test_json_file_and_determinism(self, tmp_path, capsys):
        spec = write(tmp_path, TRIG_CRIT)
        j = tmp_path / "r.json"
        _, first, _ = invoke(capsys, "analyze", "--spec", spec, "--json", str(j))
        _, second, _ = invoke(capsys, "analyze", "--spec", spec)
        assert first == second == j.read_text()

    def test_timings_only_on_request(self, tmp_path, capsys):
        spec = write(tmp_path, QUAD)
        _, out, _ = invoke(capsys, "orbits", "--spec", spec)
        assert "runtimes" not in json.loads(out)["diagnostics"]
        _, out, _ = invoke(capsys, "orbits", "--spec", spec, "--timings")
        assert "scan" in json.loads(out)["diagnostics"]["runtimes"]

    def test_sweep_seeded(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("ABEL_ORBITS_SEED", "7")
        spec = write(tmp_path, TRIG_CRIT)
        args = ("criterion", "--spec", spec, "--sweep", "3", "--scan-n", "401")
        code, a, _ = invoke(capsys, *args)
        _, b, _ = invoke(capsys, *args)
        assert code == 0 and a == b
        assert json.loads(a)["results"]["sweep"]["violations"] == []


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ("orbits", "--epsilon", "0.1"),
        ("lyapunov", "--scan-n", "11"),
        ("frobnicate",),
        ("orbits", "--witness", "1"),
        ("orbits", "--scan-min", "2", "--scan-max", "1"),
        ("orbits", "--tol", "2"),
        ("lyapunov", "--csv", "x.csv"),
        ("bifurcate",),
        ("perturb",),
        ("criterion", "--sweep", "0"),
    ])
    def test_usage(self, tmp_path, capsys, argv):
        spec = write(tmp_path, QUAD)
        code, out, err = invoke(capsys, argv[0], "--spec", spec, *argv[1:])
        assert code == 2 and out == "" and "error" in err

    def test_parse_error(self, tmp_path, capsys):
        code, _, err = invoke(capsys, "orbits", "--spec", write(tmp_path, "A: {trig: {c0: 1}}\n"))
        assert code == 2 and "'B'" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = invoke(capsys, "orbits", "--spec", str(tmp_path / "none.yaml"))
        assert code == 2

    def test_lyapunov_needs_zero_c(self, tmp_path, capsys):
        spec = "A: {trig: {c0: 1}}\nB: {trig: {c0: 1}}\nC: {trig: {c0: 1}}\n"
        code, _, _ = invoke(capsys, "lyapunov", "--spec", write(tmp_path, spec))
        assert code == 2

    def test_bad_design(self, tmp_path, capsys):
        spec = "design: {family: trig, v4: 1, mu: 0.01, lambda: 0.01}\n"
        code, _, err = invoke(capsys, "bifurcate", "--spec", write(tmp_path, spec))
        assert code == 2 and "lambda" in err


class TestInconsistency:
    def test_flag_and_exit_code(self, tmp_path, capsys, monkeypatch):
        real = poincare.scan_periodic_orbits

        two_orbits = design_two_orbit_trig(100.0, 1.0, 2e-3)

        def fake(eq, cfg=None):
            # substitute an equation with two hyperbolic orbits; the criterion bounds them by one
            return real(two_orbits, cfg)

        monkeypatch.setattr(poincare, "scan_periodic_orbits", fake)
        code, out, _ = invoke(capsys, "analyze", "--spec", write(tmp_path, TRIG_CRIT))
        d = json.loads(out)
        assert code == 3 and d["INCONSISTENCY"]
        assert any("bounds non-zero orbits by 1" in s for s in d["inconsistencies"])

    def test_request_validation(self):
        with pytest.raises(UsageError):
            run(AnalysisRequest("orbits", None))
