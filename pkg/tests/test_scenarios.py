import json

import jsonschema
import pytest

from maslovkit import scenarios as sc
from maslovkit.tolerances import current

SCHEMA = sc.report_schema()


def run(scenario, **kw):
    report, code = sc.run_scenario(scenario, **kw)
    jsonschema.validate(report, SCHEMA)
    return report, code


def test_maslov_example():
    report, code = run({"kind": "maslov", "params": {"preset": "rotating_line", "k": 1, "m": 64}})
    assert code == 0 and report["index"] == 1 and report["status"] == "ok"
    assert report["inputs"]["params"]["k"] == 1
    assert "wall_seconds" in report["timing"]


def test_hormander_example():
    report, code = run({"kind": "hormander", "params": {"preset": "r2_quadruple"}})
    assert code == 0 and report["index"] == 1
    assert report["inertia_QZ"] == [1, 0] and report["inertia_QW"] == [0, 1]


def test_hormander_explicit_and_random():
    frames = {"X": [[1], [0]], "Y": [[0], [1]], "Z": [[1], [-1]], "W": [[1], [1]]}
    report, code = run({"kind": "hormander", "params": {"frames": frames}})
    assert code == 0 and report["index"] == -1
    report, code = run({"kind": "hormander", "params": {"random": {"n": 3}}, "seed": 4})
    assert code == 0 and report["checks"]["swap_antisymmetry"]


def test_cech_scenario():
    scen = {"kind": "cech", "seed": 2,
            "params": {"sections": {"X": {"preset": "horizontal", "N": 256},
                                    "Y": {"preset": "rotating_line", "k": 2, "N": 256}},
                       "cover": {"m": 8, "overlap_fraction": 0.4}, "pullback": [-1, 2]}}
    report, code = run(scen)
    assert code == 0 and report["pairing"] == -2 and len(report["cocycle"]) == 8
    assert report["pullbacks"] == {"-1": 2, "2": -4}


def test_cech_with_samples():
    from maslovkit.hormander import rotating_line_section
    y = rotating_line_section(1, 64).to_json()
    scen = {"kind": "cech", "params": {"sections": {"X": {"preset": "horizontal", "N": 64}, "Y": y}}}
    report, code = run(scen)
    assert code == 0 and report["pairing"] == -1


def test_surface_and_fomenko():
    report, code = run({"kind": "surface", "params": {"preset": "product_torus",
                                                      "radii": [1.0, 1.0], "m": 64}})
    assert code == 0 and report["indices_gauss"] == [2, 2] and not report["in_lh"]
    report, code = run({"kind": "fomenko", "params": {"preset": "flat_plane", "n": 2, "m": 32}})
    assert code == 0 and report["verdict"] == "CONSISTENT" and report["in_lh"]


def test_custom_immersion():
    from maslovkit.surface import circle
    report, code = run({"kind": "surface", "params": {"immersion": circle(1.0, 128).to_json()}})
    assert code == 0 and report["indices_gauss"] == [2]


@pytest.mark.parametrize("scenario", [
    {"kind": "maslov", "params": {"preset": "rotating_line", "k": "one"}},
    {"kind": "maslov", "params": {"preset": "rotating_line", "bogus": 1}},
    {"kind": "maslov", "params": {"preset": "nowhere"}},
    {"kind": "maslov"},
    {"kind": "volcano", "params": {}},
    {"kind": "cech", "params": {"sections": {"X": {"preset": "horizontal"}}}},
    {"kind": "cech", "params": {"sections": {"X": {"preset": "horizontal"},
                                             "Y": {"preset": "horizontal"}},
                                "cover": {"m": 2}}},
    {"kind": "suite", "params": {"criterion": 12}},
    {"kind": "surface", "params": {"preset": "circle", "r": -1}},
    [1, 2, 3],
])
def test_malformed_params_exit_2(scenario, monkeypatch):
    called = []
    for kind in sc.HANDLERS:
        monkeypatch.setitem(sc.HANDLERS, kind, lambda *a, **k: called.append(1))
    report, code = run(scenario)
    assert code == sc.EXIT_VALIDATION
    assert report["status"] == "validation_error" and report["error"]["name"] == "ValidationError"
    assert not called   # nothing was computed


def test_numerical_errors_exit_3():
    report, code = run({"kind": "maslov", "params": {"preset": "rotating_line", "k": 1, "m": 3}})
    assert code == sc.EXIT_NUMERICAL and report["error"]["name"] == "Undersampled"
    loop = {"n": 2, "samples": [[[1, 0], [0, 0], [0, 1], [0, 0]]] * 4}
    report, code = run({"kind": "maslov", "params": {"loop": loop}})
    assert code == sc.EXIT_NUMERICAL and report["error"]["name"] == "NotLagrangian"


def test_failed_expectation_exit_1():
    report, code = run({"kind": "maslov", "params": {"preset": "circle", "m": 64},
                        "expect": {"index": 3}})
    assert code == sc.EXIT_FAILED and report["checks"]["expect_index"] is False


def test_tolerance_scale_applies_inside_only():
    seen = []
    orig = sc.HANDLERS["maslov"]

    def spy(params, seed):
        seen.append(current().isotropy)
        return orig(params, seed)
    sc.HANDLERS["maslov"] = spy
    try:
        run({"kind": "maslov", "params": {"preset": "circle", "m": 64}}, tolerance_scale=10.0)
    finally:
        sc.HANDLERS["maslov"] = orig
    assert seen == [pytest.approx(1e-7)]
    assert current().isotropy == 1e-8
    _, code = run({"kind": "maslov", "params": {"preset": "circle"}}, tolerance_scale=0.0)
    assert code == sc.EXIT_VALIDATION


def test_determinism_modulo_timing():
    scen = {"kind": "cech", "seed": 7,
            "params": {"sections": {"X": {"preset": "random", "n": 2, "seed": 1, "k": 1, "N": 900},
                                    "Y": {"preset": "horizontal", "n": 2, "N": 900}},
                       "cover": {"m": 32}}}
    a, _ = sc.run_scenario(scen)
    b, _ = sc.run_scenario(scen)
    assert sc.canonical_report(a) == sc.canonical_report(b)
    assert "timing" not in json.loads(sc.canonical_report(a))


def test_run_suite(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    (src / "a.json").write_text(json.dumps({"kind": "hormander", "params": {"preset": "r2_quadruple"},
                                            "criterion": "AC4", "expect": {"index": 1}}))
    (src / "b.json").write_text(json.dumps({"kind": "maslov", "params": {"preset": "circle"}}))
    out = tmp_path / "out"
    summary, code = sc.run_suite(src, out)
    assert code == 0 and summary["scenarios"] == 2
    assert set(summary["table"]) == {"AC4", "b"}
    assert (out / "a.json").exists() and (out / "summary.json").exists()
    (src / "c.json").write_text("{not json")
    summary, code = sc.run_suite(src, out, jobs=2)
    assert code != 0 and not summary["table"]["c"]["passed"]


def test_run_suite_empty(tmp_path):
    summary, code = sc.run_suite(tmp_path)
    assert code == 0 and summary["scenarios"] == 0 and summary["table"] == {}


def test_shipped_scenarios_are_valid():
    paths = sorted(sc.shipped_suite_dir().glob("*.json"))
    ids = set()
    for p in paths:
        scen = sc.load_scenario(p)
        sc.validate_scenario(scen)
        ids.add(scen.get("criterion") or f"AC{scen['params']['criterion']}")
    assert ids == {f"AC{i}" for i in range(1, 12)}


@pytest.mark.parametrize("name", ["ex_maslov_rotating_line.json", "ex_hormander_r2.json",
                                  "ex_cech_rotating_line.json", "ex_surface_circle.json",
                                  "ex_fomenko_graph.json", "ex_fomenko_torus.json",
                                  "ex_maslov_circle.json"])
def test_shipped_examples_pass(name):
    report, code = run(sc.load_scenario(sc.shipped_suite_dir() / name))
    assert code == 0, report
