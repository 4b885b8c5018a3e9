"""JSON scenarios: validate, dispatch to the core modules, report.

A scenario is ``{"kind": ..., "params": {...}, "seed": int, "expect": {...}}``.
``expect`` is optional; each entry becomes a check comparing a top-level
report field to the expected value. Reports carry everything except wall
time deterministically, so two runs compare equal once ``timing`` is dropped.
"""

from __future__ import annotations

import concurrent.futures
import importlib.resources
import json
import pathlib
import time

import jsonschema
import numpy as np

from . import acceptance
from . import hormander as hm
from . import maslov as ms
from . import surface as sf
from .errors import MaslovKitError, NumericalError, ValidationError
from .symplectic import LagrangianFrame, random_lagrangian
from .tolerances import scaled

EXIT_OK, EXIT_FAILED, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3
KINDS = ("maslov", "hormander", "cech", "surface", "fomenko", "suite")

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_samples = {"type": "object", "required": ["n", "samples"],
            "properties": {"n": {"type": "integer", "minimum": 1},
                           "samples": {"type": "array", "items": _matrix},
                           "endpoint_included": {"type": "boolean"}}}
_preset = {"type": "object", "required": ["preset"],
           "properties": {"preset": {"type": "string"}}}
_section = {"oneOf": [_preset, _samples]}
_immersion = {"type": "object", "required": ["k", "n", "positions"],
              "properties": {"k": {"type": "integer", "minimum": 1},
                             "n": {"type": "integer", "minimum": 1},
                             "periodic": {"type": "array", "items": {"type": "boolean"}},
                             "positions": {"type": "array"},
                             "translations": _matrix,
                             "spacings": {"type": "array", "items": {"type": "number"}}}}

PARAM_SCHEMAS = {
    "maslov": {"oneOf": [_preset,
                         {"type": "object", "required": ["loop"],
                          "properties": {"loop": _samples}, "additionalProperties": False}]},
    "hormander": {"oneOf": [
        {"type": "object", "required": ["preset"],
         "properties": {"preset": {"enum": ["r2_quadruple"]}}, "additionalProperties": False},
        {"type": "object", "required": ["frames"], "additionalProperties": False,
         "properties": {"frames": {"type": "object", "required": ["X", "Y", "Z", "W"],
                                   "additionalProperties": False,
                                   "properties": {k: _matrix for k in "XYZW"}}}},
        {"type": "object", "required": ["random"], "additionalProperties": False,
         "properties": {"random": {"type": "object", "required": ["n"],
                                   "properties": {"n": {"type": "integer", "minimum": 1}},
                                   "additionalProperties": False}}},
    ]},
    "cech": {"type": "object", "required": ["sections"], "additionalProperties": False,
             "properties": {
                 "sections": {"type": "object", "required": ["X", "Y"], "additionalProperties": False,
                              "properties": {"X": _section, "Y": _section}},
                 "cover": {"type": "object", "additionalProperties": False,
                           "properties": {"m": {"type": "integer", "minimum": 3},
                                          "overlap_fraction": {"type": "number",
                                                               "exclusiveMinimum": 0,
                                                               "exclusiveMaximum": 1}}},
                 "pullback": {"type": "array",
                              "items": {"type": "integer", "not": {"const": 0}}}}},
    "surface": {"oneOf": [_preset,
                          {"type": "object", "required": ["immersion"], "additionalProperties": False,
                           "properties": {"immersion": _immersion}}]},
    "fomenko": {"oneOf": [
        {"type": "object", "required": ["preset"],
         "properties": {"preset": {"type": "string"}, "arcs": {"type": "integer", "minimum": 2}}},
        {"type": "object", "required": ["immersion"], "additionalProperties": False,
         "properties": {"immersion": _immersion, "arcs": {"type": "integer", "minimum": 2}}}]},
    "suite": {"type": "object", "required": ["criterion"], "additionalProperties": False,
              "properties": {"criterion": {"type": "integer", "minimum": 1, "maximum": 11}}},
}

_int = {"type": "integer"}
_pos = {"type": "integer", "minimum": 1}
_grid = {"type": "integer", "minimum": 3}
_real = {"type": "number"}
_reals = {"type": "array", "items": _real}
_terms = {"type": "array", "items": {"type": "object"}}


def _preset_schema(**props):
    return {"type": "object", "properties": props, "additionalProperties": False}


LOOP_PRESET_SCHEMAS = {
    "constant": _preset_schema(n=_pos, m=_grid, seed=_int),
    "rotating_line": _preset_schema(k=_int, m=_grid, n=_pos),
    "circle": _preset_schema(m=_grid),
    "interpolated_random": _preset_schema(n=_pos, seed=_int, k=_int, nodes=_pos, m=_grid),
}
SECTION_PRESET_SCHEMAS = {
    "horizontal": _preset_schema(n=_pos, N=_grid),
    "constant_random": _preset_schema(n=_pos, seed=_int, N=_grid),
    "rotating_line": _preset_schema(k=_int, n=_pos, N=_grid),
    "random": _preset_schema(n=_pos, seed=_int, k=_int, nodes=_pos, N=_grid),
}
_m_or_ms = {"oneOf": [_grid, {"type": "array", "items": _grid}]}
IMMERSION_PRESET_SCHEMAS = {
    "circle": _preset_schema(r={"type": "number", "exclusiveMinimum": 0}, m=_grid),
    "plane_curve": _preset_schema(terms=_terms, m=_grid),
    "product_torus": _preset_schema(radii=_reals, m=_m_or_ms),
    "lagrangian_graph": _preset_schema(terms=_terms, m=_m_or_ms, n=_pos, shift=_reals),
    "flat_plane": _preset_schema(n=_pos, m=_m_or_ms),
    "linear_graph": _preset_schema(slopes={"type": "array", "items": _reals}, m=_m_or_ms),
    "perturbed_torus": _preset_schema(radii=_reals, terms=_terms, m=_m_or_ms, shift=_reals),
}


def _check_preset(spec, table, what, drop=("preset",)):
    name = spec["preset"]
    if name not in table:
        raise ValidationError(f"unknown {what} preset {name!r}; choose from {sorted(table)}")
    rest = {k: v for k, v in spec.items() if k not in drop}
    try:
        jsonschema.validate(rest, table[name])
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"bad parameters for {what} preset {name!r}: {exc.message}") from None


SCENARIO_SCHEMA = {
    "type": "object", "required": ["kind", "params"],
    "properties": {"kind": {"enum": list(KINDS)},
                   "params": {"type": "object"},
                   "seed": {"type": "integer", "minimum": 0},
                   "criterion": {"type": "string"},
                   "expect": {"type": "object"},
                   "output_path": {"type": "string"}},
    "additionalProperties": False,
}


def _data_file(name: str):
    return importlib.resources.files("maslovkit") / "data" / name


def report_schema() -> dict:
    return json.loads(_data_file("report_schema.json").read_text())


def shipped_suite_dir() -> pathlib.Path:
    return pathlib.Path(str(_data_file("acceptance")))


def load_scenario(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None


def validate_scenario(scenario) -> None:
    try:
        jsonschema.validate(scenario, SCENARIO_SCHEMA)
        jsonschema.validate(scenario["params"], PARAM_SCHEMAS[scenario["kind"]])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"invalid scenario at {path}: {exc.message}") from None
    kind, params = scenario["kind"], scenario["params"]
    if kind == "maslov" and "preset" in params:
        _check_preset(params, LOOP_PRESET_SCHEMAS, "loop")
    elif kind == "cech":
        for spec in params["sections"].values():
            if "preset" in spec:
                _check_preset(spec, SECTION_PRESET_SCHEMAS, "section")
    elif kind in ("surface", "fomenko") and "preset" in params:
        _check_preset(params, IMMERSION_PRESET_SCHEMAS, "immersion", ("preset", "arcs"))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _split(params, key="preset"):
    rest = dict(params)
    return rest.pop(key), rest


# Kind handlers. Each returns (results, checks).

def _run_maslov(params, seed):
    if "loop" in params:
        loop = ms.LagrangianLoop.from_json(params["loop"])
    else:
        name, rest = _split(params)
        loop = ms.loop_preset(name, **rest)
    inc = ms.det2_phase_increments(loop)
    index = ms.maslov_index(loop)
    liftable = ms.is_liftable(loop)
    return ({"index": index, "winding": float(np.sum(inc) / (2 * np.pi)),
             "liftable": liftable, "n": loop.n, "m": loop.m,
             "max_increment": float(np.max(np.abs(inc)))},
            {"parity_law": liftable == (index % 2 == 0)})


def _r2_quadruple():
    return (LagrangianFrame([[1], [0]]), LagrangianFrame([[0], [1]]),
            LagrangianFrame([[1], [1]]), LagrangianFrame([[1], [-1]]))


def _run_hormander(params, seed):
    if "frames" in params:
        x, y, z, w = (LagrangianFrame(params["frames"][k]) for k in "XYZW")
    elif "random" in params:
        n = params["random"]["n"]
        x, y, z, w = (random_lagrangian(n, [seed, j]) for j in range(4))
    else:
        x, y, z, w = _r2_quadruple()
    index = hm.hormander_index(x, y, z, w)
    pz, qz = hm.signature(hm.q_form(x, y, z))
    pw, qw = hm.signature(hm.q_form(x, y, w))
    meet, _ = hm.intersection_split(x, y)
    return ({"index": index, "n": x.n, "inertia_QZ": [pz, qz], "inertia_QW": [pw, qw],
             "dim_intersection": int(meet.shape[1]),
             "frames": {k: f.basis.tolist() for k, f in zip("XYZW", (x, y, z, w))}},
            {"swap_antisymmetry": index == -hm.hormander_index(x, y, w, z),
             "pair_exchange": index == -hm.hormander_index(z, w, x, y)})


def _section(spec):
    if "preset" in spec:
        name, rest = _split(spec)
        return hm.section_preset(name, **rest)
    n = int(spec["n"])
    sec = hm.SectionOverLoop(spec["samples"])
    if sec.n != n:
        raise ValidationError(f"section samples do not match declared n={n}")
    return sec


def _run_cech(params, seed):
    x, y = _section(params["sections"]["X"]), _section(params["sections"]["Y"])
    if x.N != y.N or x.n != y.n:
        raise ValidationError("sections X and Y must share the sample grid and dimension")
    c = params.get("cover", {})
    cover = hm.GoodCoverOnLoop.uniform(c.get("m", 8), c.get("overlap_fraction", 0.5))
    cocycle = hm.build_cocycle(x, y, cover, seed)
    pairing = hm.pair_with_fundamental_cycle(cocycle)
    reverse = hm.pair_with_fundamental_cycle(hm.build_cocycle(y, x, cover, seed))
    lx, ly = ms.maslov_index(x.to_loop()), ms.maslov_index(y.to_loop())
    results = {"cocycle": cocycle.to_json(), "pairing": pairing, "n": x.n, "N": x.N,
               "arcs": cover.m, "maslov_X": lx, "maslov_Y": ly}
    checks = {"antisymmetry": reverse == -pairing,
              "winding_difference": pairing == acceptance.WINDING_SIGN * (ly - lx)}
    if params.get("pullback"):
        pulled = {str(d): hm.pullback_pairing(d, x, y, cover, seed) for d in params["pullback"]}
        results["pullbacks"] = pulled
        checks["pullback_naturality"] = all(v == int(d) * pairing for d, v in pulled.items())
    return results, checks


def _immersion(params):
    if "immersion" in params:
        return sf.ImmersedLagrangianGrid.from_json(params["immersion"])
    rest = {k: v for k, v in params.items() if k not in ("preset", "arcs")}
    return sf.immersion_preset(params["preset"], **rest)


def _run_surface(params, seed):
    imm = _immersion(params)
    data = sf.curvature_data(imm)
    gauss = sf.gauss_indices(imm)
    beta = sf.maslov_via_beta(data)
    h_norm = np.linalg.norm(data.H, axis=-1)
    return ({"immersion": imm.name, "grid": list(imm.shape), "n": imm.n,
             "lagrangian_residual": sf.lagrangian_residual_max(imm),
             "normal_residual": data.normal_residual,
             "max_abs_H": float(np.max(h_norm)),
             "periods": data.periods.tolist(),
             "max_abs_d_beta": data.max_abs_d_beta,
             "lh_tolerance": sf.lh_tolerance(data),
             "in_lh": sf.in_lh(data),
             "indices_gauss": gauss,
             "indices_beta": beta.tolist()},
            {"beta_matches_gauss": bool(np.all(np.abs(beta - np.array(gauss)) < 0.05))})


def _run_fomenko(params, seed):
    rep = sf.fomenko_check(_immersion(params), arcs=params.get("arcs", 8), seed=seed)
    return rep, {"consistent": rep["verdict"] == "CONSISTENT"}


def _run_suite(params, seed):
    res = acceptance.run_criterion(params["criterion"], seed)
    details = dict(res["details"])
    details.pop("seconds", None)   # wall time is not part of the deterministic report
    return ({"criterion_title": res["title"], "details": details},
            {res["id"]: res["passed"]})


HANDLERS = {"maslov": _run_maslov, "hormander": _run_hormander, "cech": _run_cech,
            "surface": _run_surface, "fomenko": _run_fomenko, "suite": _run_suite}


def run_scenario(scenario, tolerance_scale: float = 1.0, seed: int | None = None):
    """Run one scenario; returns (report, exit_code). Never raises on bad input."""
    start = time.perf_counter()
    report = {"kind": scenario.get("kind") if isinstance(scenario, dict) else None,
              "inputs": scenario, "status": "ok", "checks": {}, "passed": False,
              "criterion": None, "error": None}
    try:
        if not isinstance(scenario, dict):
            raise ValidationError("scenario must be a JSON object")
        validate_scenario(scenario)
        if not tolerance_scale > 0:
            raise ValidationError(f"tolerance scale must be positive, got {tolerance_scale}")
        run_seed = scenario.get("seed", 0) if seed is None else seed
        kind = scenario["kind"]
        report["criterion"] = scenario.get("criterion") or (
            f"AC{scenario['params']['criterion']}" if kind == "suite" else None)
        with scaled(tolerance_scale):
            results, checks = HANDLERS[kind](scenario["params"], run_seed)
        for key, want in scenario.get("expect", {}).items():
            checks[f"expect_{key}"] = results.get(key) == want
        report.update(results)
        report["seed"] = run_seed
        report["checks"] = checks
        report["passed"] = all(checks.values())
        code = EXIT_OK if report["passed"] else EXIT_FAILED
        if not report["passed"]:
            report["status"] = "failed"
    except ValidationError as exc:
        report.update(status="validation_error", error={"name": type(exc).__name__, "message": str(exc)})
        code = EXIT_VALIDATION
    except (NumericalError, MaslovKitError, np.linalg.LinAlgError) as exc:
        report.update(status="numerical_error", error={"name": type(exc).__name__, "message": str(exc)})
        code = EXIT_NUMERICAL
    report["timing"] = {"wall_seconds": time.perf_counter() - start}
    return _jsonable(report), code


def canonical_report(report) -> str:
    """Serialized report without the timing block; the determinism key."""
    return dumps({k: v for k, v in report.items() if k != "timing"})


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _run_file(path, tolerance_scale, seed):
    try:
        scenario = load_scenario(path)
    except (OSError, ValidationError) as exc:
        return ({"kind": None, "inputs": str(path), "status": "validation_error",
                 "checks": {}, "passed": False, "criterion": None,
                 "error": {"name": type(exc).__name__, "message": str(exc)},
                 "timing": {"wall_seconds": 0.0}}, EXIT_VALIDATION)
    return run_scenario(scenario, tolerance_scale, seed)


def run_suite(directory, out_dir=None, jobs: int = 1, tolerance_scale: float = 1.0,
              seed: int | None = None):
    """Run every *.json scenario in a directory.

    Returns (summary, exit_code). Per-scenario reports go to out_dir (if
    given) along with summary.json; the summary table is keyed by criterion
    ID where a scenario declares one, by file stem otherwise.
    """
    directory = pathlib.Path(directory)
    if not directory.is_dir():
        raise ValidationError(f"{directory} is not a directory")
    paths = sorted(directory.glob("*.json"))
    if jobs > 1 and len(paths) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_file, paths, [tolerance_scale] * len(paths),
                                     [seed] * len(paths)))
    else:
        outcomes = [_run_file(p, tolerance_scale, seed) for p in paths]

    table = {}
    for path, (report, code) in zip(paths, outcomes):
        key = report.get("criterion") or path.stem
        row = table.setdefault(key, {"passed": True, "scenarios": []})
        row["scenarios"].append({"file": path.name, "status": report["status"], "exit_code": code})
        row["passed"] = row["passed"] and code == EXIT_OK
    summary = {"directory": str(directory), "scenarios": len(paths),
               "passed": all(r["passed"] for r in table.values()), "table": table}

    if out_dir is not None:
        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for path, (report, _) in zip(paths, outcomes):
            (out / path.name).write_text(dumps(report))
        (out / "summary.json").write_text(dumps(summary))
    return summary, (EXIT_OK if summary["passed"] else EXIT_FAILED)
