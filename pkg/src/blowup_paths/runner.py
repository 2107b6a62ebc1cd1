"""Batch front-end: config ingestion, experiment runners, data export.

Subcommands (all driven by a JSON config validated against
:data:`CONFIG_SCHEMA`):

* ``simulate``          one path -> trajectory CSV, assumption report and
                        quasi-convergence report (with the induced label);
* ``sweep``             grid over ``(s, lambda)`` -> summary table of
                        induced decompositions and wall times;
* ``qde-check``         integrator vs closed-form agreement report;
* ``walls``             wall-crossing times along one path;
* ``specfun-validate``  exponential-integral oracle suite;
* ``mutate``            mutation-orbit exploration of a decomposition.

Outputs are deterministic: fixed sample grids, sorted JSON keys, fixed
float formatting, no timestamps.  Every artifact embeds the resolved
configuration (JSON under a ``config`` key, CSV as a leading comment
line).  Exit status is 0 on success, 2 on config/schema errors and 1 on
runtime failures, with a machine-readable error JSON on stderr.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from . import paths as pathsmod
from .chambers import NoSignChangeError, find_wall_crossing
from .charges import YCharge
from .lattice import DivisorClass, SurfaceModel, default_model, make_surface_model
from .paths import (
    InconclusiveError,
    boundary_path_config,
    build_path,
    check_assumptions,
    induced_sod,
    quasi_convergence_report,
    trajectories_csv,
    w2_path_config,
)
from .qde import QdeParams, QdeState, closed_form, integrate, second_order_residual
from .sod import EXC_LEFT, EXC_RIGHT, SodLabel, mutate, mutation_orbit, twist_by_oc
from .specfun import ei, ei_value

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "model": {
            "type": "object",
            "properties": {
                "rho": {"type": "integer", "minimum": 1},
                "QY": {"type": "array", "items": {"type": "array",
                                                  "items": {"type": "number"}}},
                "KY": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["rho", "QY", "KY"],
            "additionalProperties": False,
        },
        "family": {"enum": ["start-in-W2", "start-in-boundary"]},
        "s_values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "lambda_values": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "items": {"type": "number"},
                      "minItems": 2, "maxItems": 2},
        },
        "lam0_re": {"type": "number"},
        "ZY": {
            "type": "object",
            "properties": {
                "alpha": {"type": "number"}, "beta": {"type": "number"},
                "B": {"type": "array", "items": {"type": "number"}},
                "omega": {"type": "array", "items": {"type": "number"}},
            },
            "additionalProperties": False,
        },
        "B_bC": {"type": "number"},
        "omega": {"type": "array", "items": {"type": "number"}},
        "T0": {
            "type": "object",
            "properties": {
                "policy": {"enum": ["auto", "explicit"]},
                "value": {"type": "number"},
                "eps": {"type": "number"},
            },
            "required": ["policy"],
            "additionalProperties": False,
        },
        "horizon_factor": {"type": "number", "exclusiveMinimum": 1},
        "grid": {"type": "integer", "minimum": 16},
        "objects": {"type": "array", "items": {"type": "string"}},
        "depth": {"type": "integer", "minimum": 1},
        "n_points": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

_DEFAULTS = {
    "family": "start-in-W2",
    "s_values": [0.0],
    "lambda_values": [[1.0, -0.8]],
    "lam0_re": 0.25,
    "ZY": {"alpha": 1.0, "beta": 0.0, "B": None, "omega": None},
    "B_bC": 1.0,
    "omega": None,
    "T0": {"policy": "auto", "eps": 1.0},
    "horizon_factor": 100.0,
    "depth": 10,
    "n_points": 200,
    "tol": 1e-9,
}


class ConfigError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _dump_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=1)


def load_config(path: str | None) -> dict:
    cfg = {}
    if path is not None:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if jsonschema is not None:
        try:
            jsonschema.validate(cfg, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config schema violation: {exc.message}") from exc
    merged = dict(_DEFAULTS)
    merged.update(cfg)
    if "T0" in cfg:
        t0 = dict(_DEFAULTS["T0"])
        t0.update(cfg["T0"])
        merged["T0"] = t0
    return merged


def _model_from(cfg: dict) -> SurfaceModel:
    m = cfg.get("model")
    if m is None:
        return default_model()
    return make_surface_model(m["rho"], m["QY"], m["KY"])


def _path_for(cfg: dict, model: SurfaceModel, s: float, lam: complex):
    t0cfg = cfg["T0"]
    explicit = t0cfg.get("value") if t0cfg["policy"] == "explicit" else None
    if cfg["family"] == "start-in-W2":
        zy = cfg["ZY"]
        rho = model.rho
        B = tuple(zy.get("B") or (0.0,) * rho)
        omega = tuple(zy.get("omega") or (1.0,) + (0.0,) * (rho - 1))
        ZY = YCharge(model, alpha=zy.get("alpha", 1.0), beta=zy.get("beta", 0.0),
                     B=B, omega=omega)
        pc = w2_path_config(model, ZY, lam0_re=cfg["lam0_re"], s=s, lam=lam,
                            T0=explicit, eps_T0=t0cfg.get("eps", 1.0))
    else:
        B = DivisorClass((Fraction(0),) * model.rho, Fraction(cfg["B_bC"]))
        omega = cfg.get("omega")
        pc = boundary_path_config(model, B, s=s, lam=lam, omega=omega,
                                  T0=explicit if explicit is not None else 1.0)
    return build_path(pc)


def _resolved(cfg: dict, **extra) -> dict:
    out = dict(cfg)
    out.update(extra)
    return out


def _horizon(cfg: dict, T0: float) -> float:
    h = cfg["horizon_factor"] * T0
    lam_res = [abs(l[0]) for l in cfg["lambda_values"]]
    if max(lam_res) * h > 700.0:
        raise ConfigError(
            f"horizon {h} with Re lambda {max(lam_res)} overflows the "
            "double-precision charge range (Re lambda * horizon < 700)")
    return h


def _simulate_cell(cfg: dict, s: float, lam: complex) -> dict:
    model = _model_from(cfg)
    path = _path_for(cfg, model, s, lam)
    horizon = _horizon(cfg, path.cfg.T0)
    rec = {
        "s": s, "lambda": lam, "T0": path.cfg.T0,
        "weight": path.cfg.weight,
        "initial_region": path.initial_region.render(),
    }
    try:
        report = quasi_convergence_report(path, horizon,
                                          objects=tuple(cfg.get("objects") or
                                                        pathsmod.DIAGNOSTIC_OBJECTS),
                                          grid=cfg.get("grid"))
        rec["conclusive"] = report.conclusive
        rec["final_region"] = report.itinerary_final
        rec["sim_equals_sim_i"] = report.sim_equals_sim_i
        label = induced_sod(report, k=-1)
        rec["sod"] = label.render()
        rec["sod_orientation"] = label.orientation
        rec["sod_k"] = label.k
    except InconclusiveError as exc:
        rec["conclusive"] = False
        rec["final_region"] = None
        rec["sod"] = None
        rec["error"] = str(exc)
        return rec
    if lam.imag < 0:
        try:
            wc = find_wall_crossing(path.zfun("O_C(-1)"),
                                    path.cfg.T0 * (1 + 1e-9), horizon)
            rec["wall_time"] = wc.t_star
        except NoSignChangeError:
            rec["wall_time"] = None
    else:
        rec["wall_time"] = None
    return rec


def cmd_simulate(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    model = _model_from(cfg)
    s = cfg["s_values"][0]
    lam = complex(*cfg["lambda_values"][0])
    path = _path_for(cfg, model, s, lam)
    horizon = _horizon(cfg, path.cfg.T0)
    resolved = _resolved(cfg, s=s, lam=[lam.real, lam.imag],
                         T0=path.cfg.T0, horizon=horizon,
                         weight=[path.cfg.weight.real, path.cfg.weight.imag])

    names = tuple(cfg.get("objects") or pathsmod.DIAGNOSTIC_OBJECTS)
    csv = trajectories_csv(path, horizon, names=names, grid=cfg.get("grid"))
    (outdir / "trajectories.csv").write_text(
        "# config=" + json.dumps(_jsonable(resolved), sort_keys=True) + "\n" + csv)

    assum = check_assumptions(path, horizon, grid=cfg.get("grid"))
    (outdir / "assumptions.json").write_text(_dump_json({
        "config": resolved,
        "nonvanishing": assum.nonvanishing,
        "monotone_arg": assum.monotone_arg,
        "mass_divergence": assum.mass_divergence,
        "normalized_limit": assum.normalized_limit,
        "evidence": assum.evidence,
    }))

    payload = {"config": resolved}
    try:
        report = quasi_convergence_report(path, horizon, objects=names,
                                          grid=cfg.get("grid"))
        payload["report"] = json.loads(report.to_json())
        payload["sod"] = induced_sod(report, k=-1).render()
    except InconclusiveError as exc:
        payload["report"] = None
        payload["sod"] = None
        payload["error"] = str(exc)
    (outdir / "qc_report.json").write_text(_dump_json(payload))
    print(f"simulate: sod={payload.get('sod')} -> {outdir}")
    return 0


def cmd_sweep(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    cells = [(s, complex(*lv)) for s in cfg["s_values"]
             for lv in cfg["lambda_values"]]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_worker,
                                    [(cfg, s, lam) for s, lam in cells]))
    else:
        results = [_simulate_cell(cfg, s, lam) for s, lam in cells]

    header = ["s", "re_lambda", "im_lambda", "T0", "conclusive",
              "final_region", "sod", "wall_time"]
    lines = ["# config=" + json.dumps(_jsonable(cfg), sort_keys=True),
             ",".join(header)]
    for rec in results:
        lam = rec["lambda"]
        row = [format(rec["s"], ".17g"), format(lam.real, ".17g"),
               format(lam.imag, ".17g"), format(rec["T0"], ".17g"),
               str(rec["conclusive"]).lower(),
               rec["final_region"] or "",
               rec["sod"] or "",
               format(rec["wall_time"], ".17g") if rec.get("wall_time") else ""]
        lines.append(",".join(row))
    (outdir / "sweep.csv").write_text("\n".join(lines) + "\n")
    (outdir / "sweep.json").write_text(_dump_json(
        {"config": cfg, "cells": results}))
    print(f"sweep: {len(results)} cells -> {outdir}")
    return 0


def _sweep_worker(args):
    cfg, s, lam = args
    return _simulate_cell(cfg, s, lam)


def cmd_qde_check(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    n = cfg["n_points"] if cfg["n_points"] != _DEFAULTS["n_points"] else 20
    rows, worst = [], 0.0
    for _ in range(n):
        a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        b = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        im = rng.uniform(0.2, 1.0) * rng.choice((-1.0, 1.0))
        lam = complex(rng.uniform(0.5, 2.0), im)
        p = QdeParams(z=1.0, q=lam)
        nu0 = -a * cmath.exp(lam * 1.0)
        init = QdeState(xi0=0.0, a=0.0, D=(), nu=nu0,
                        xi2=a * ei_value(lam) + b)
        traj = integrate(p, init, 1.0, 10.0, tol=cfg["tol"])
        cf = closed_form(a, b, lam)
        rel = max(abs(traj.xi2[i] - cf(t)) / (1 + abs(cf(t)))
                  for i, t in enumerate(traj.ts))
        resid = second_order_residual(traj)
        worst = max(worst, rel)
        rows.append({"a": a, "b": b, "lambda": lam, "max_rel_err": rel,
                     "second_order_residual": resid})
    payload = {"config": cfg, "n": n, "worst_rel_err": worst, "cases": rows,
               "pass": worst < 1e-8}
    (outdir / "qde_check.json").write_text(_dump_json(payload))
    print(f"qde-check: worst rel err {worst:.3e} -> {outdir}")
    return 0 if payload["pass"] else 1


def cmd_walls(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    model = _model_from(cfg)
    s = cfg["s_values"][0]
    lam = complex(*cfg["lambda_values"][0])
    path = _path_for(cfg, model, s, lam)
    horizon = _horizon(cfg, path.cfg.T0)
    payload = {"config": _resolved(cfg, s=s, lam=[lam.real, lam.imag],
                                   T0=path.cfg.T0)}
    try:
        wc = find_wall_crossing(path.zfun("O_C(-1)"),
                                path.cfg.T0 * (1 + 1e-9), horizon)
        payload["wall"] = {
            "t_star": wc.t_star, "bracket": list(wc.bracket),
            "im_at_root": wc.im_at_root, "abs_at_root": wc.abs_at_root,
            "evidence": dict(wc.evidence),
        }
    except NoSignChangeError as exc:
        payload["wall"] = None
        payload["error"] = str(exc)
    (outdir / "walls.json").write_text(_dump_json(payload))
    print(f"walls: {payload.get('wall') and payload['wall']['t_star']} -> {outdir}")
    return 0


def cmd_specfun_validate(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    from scipy.integrate import quad

    rng = np.random.default_rng(seed)
    n = cfg["n_points"]

    def oracle(z: complex) -> complex:
        re = quad(lambda u: ((np.exp(z * u) - 1) / u).real, 0.0, 1.0,
                  epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        im = quad(lambda u: ((np.exp(z * u) - 1) / u).imag, 0.0, 1.0,
                  epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        head = (np.euler_gamma + math.log(abs(z))
                if z.imag == 0 and z.real < 0 else np.euler_gamma + cmath.log(z))
        return head + complex(re, im)

    worst, cases = 0.0, []
    for _ in range(n):
        r = 10 ** rng.uniform(-1, math.log10(50.0))
        th = rng.uniform(-math.pi, math.pi)
        z = complex(r * math.cos(th), r * math.sin(th))
        v = ei(z)
        ref = oracle(z)
        err = abs(v.value - ref) / (1 + abs(ref))
        worst = max(worst, err)
        cases.append({"z": z, "regime": v.regime, "err": err,
                      "est_error": v.est_error})
    payload = {"config": cfg, "n": n, "worst_err": worst,
               "pass": worst < 1e-10, "cases": cases[:20]}
    (outdir / "specfun_validate.json").write_text(_dump_json(payload))
    print(f"specfun-validate: worst err {worst:.3e} -> {outdir}")
    return 0 if payload["pass"] else 1


def cmd_mutate(cfg: dict, outdir: Path, jobs: int, seed: int) -> int:
    depth = cfg["depth"]
    start = SodLabel(EXC_LEFT, -1)
    orbit = mutation_orbit(start, depth)
    closure = all(mutate(mutate(lab, "left"), "right") == lab for lab in orbit)
    twists = {lab.render(): twist_by_oc(lab).render() for lab in sorted(
        orbit, key=lambda l: (l.orientation, l.k))}
    payload = {
        "config": cfg,
        "start": start.render(),
        "depth": depth,
        "orbit": sorted(lab.render() for lab in orbit),
        "orbit_size": len(orbit),
        "left_right_closure": closure,
        "twist_by_OC": twists,
    }
    (outdir / "mutate.json").write_text(_dump_json(payload))
    print(f"mutate: orbit of size {len(orbit)} -> {outdir}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "qde-check": cmd_qde_check,
    "walls": cmd_walls,
    "specfun-validate": cmd_specfun_validate,
    "mutate": cmd_mutate,
}


def run(argv) -> int:
    parser = argparse.ArgumentParser(prog="blowup-paths")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None)
    parser.add_argument("--out", default="out")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        sys.stderr.write(_dump_json({"error": "config", "message": str(exc)}) + "\n")
        return 2
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, outdir, args.jobs, args.seed)
    except ConfigError as exc:
        sys.stderr.write(_dump_json({"error": "config", "message": str(exc)}) + "\n")
        return 2
    except Exception as exc:  # surfaced with context, machine readable
        sys.stderr.write(_dump_json({
            "error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


def main() -> None:  # console entry point
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
