"""Command-line entry point: ``interdim <command> [--config run.json] [flags]``.

Settings resolve as defaults < config file < environment < flags.  The
environment only supplies the output directory (``INTERDIM_OUT_DIR``) and the
worker count (``INTERDIM_WORKERS``).

Every run prints or writes a JSON document holding the resolved config and
the result.  Wall-clock data goes to a separate metadata document
(``<out>.meta.json``, or stderr when writing to stdout), so identical configs
give byte-identical results.  Exit status: 0 on success (including failed
verifications), 1 on computation errors, 2 on config errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .capacity import SolverConfig, equilibrium
from .covering import FLOOR_FACTOR as COVER_FLOOR, cover_sum_1d, cover_sum_grid, dim_from_covering
from .experiments import (exceptional_scan, verify_continuity_corollaries, verify_fbm_theorem,
                          verify_holder_bound, _plain)
from .geometry import (DomainError, gen_cantor_like, gen_sequence_set, load_csv, normalised,
                       save_csv, segment, uniform_grid)
from .kernels import KernelParams
from .profiles import curve_to_csv, default_ladder, dim_profile, profile_curve
from .scaling import dyadic_ladder, geometric_ladder
from .stochastic import FbmParams, HolderMapSpec, Subspace, fbm_sample

ENV_OUT_DIR = "INTERDIM_OUT_DIR"
ENV_WORKERS = "INTERDIM_WORKERS"

NUM = {"type": "number"}
POS = {"type": "number", "exclusiveMinimum": 0}
THETA = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
ALPHA = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
INT1 = {"type": "integer", "minimum": 1}
KIND = {"enum": ["lower", "upper"]}
PATH = {"type": ["string", "null"]}
NUMS = {"type": ["array", "null"], "items": {"type": "number"}}

COMMON = {
    "out": (PATH, None, "output path (relative paths resolve against $%s)" % ENV_OUT_DIR),
    "seed": ({"type": "integer", "minimum": 0}, 0, "root seed"),
    "workers": (INT1, 1, "parallel worker processes (or $%s)" % ENV_WORKERS),
}
SOLVER = {
    "tolerance": (POS, 1e-7, "solver stopping tolerance on the certificate gap"),
    "max_iterations": ({"type": ["integer", "null"], "minimum": 1}, None, "solver iteration cap"),
    "restarts": ({"type": "integer", "minimum": 0}, 5, "random restarts besides the uniform start"),
}
SET = {"set": ({"type": "string"}, None, "input point-set CSV")}
PER_OCTAVE = ({"type": "integer", "minimum": 1}, 1,
              "scales per factor of two; above 1 densifies the default dyadic ladder")

# command -> {key: (json schema, default, help)}; a default of None with a
# non-null schema marks a required key
COMMANDS = {
    "gen": {
        "kind": ({"enum": ["sequence", "cantor", "grid", "segment"]}, "sequence", "generator"),
        "p": (POS, 1.0, "sequence exponent"),
        "count": (INT1, 1000, "sequence terms or grid points"),
        "ratio": ({"type": "number", "exclusiveMinimum": 0, "maximum": 0.5}, 1 / 3,
                  "cantor contraction ratio"),
        "copies": ({"type": "integer", "minimum": 2}, 2, "cantor copies"),
        "depth": (INT1, 6, "cantor depth"),
        "dim": ({"enum": [1, 2]}, 1, "cantor dimension"),
        "lo": (NUM, 0.0, "grid left end"),
        "hi": (NUM, 1.0, "grid right end"),
        "angle": (NUM, math.pi / 4, "segment angle"),
        "length": (POS, 1.0, "segment length"),
    },
    "capacity": {**SET, "r": (THETA, None, "scale r"), "theta": (THETA, 1.0, "theta"),
                 "s": ({"type": "number", "minimum": 0}, None, "exponent s"),
                 "m": (POS, None, "exponent m"), **SOLVER},
    "cover": {**SET, "r": ({"type": ["number", "null"], "exclusiveMinimum": 0}, None,
                           "scale r; omit to estimate the dimension instead"),
              "theta": (THETA, 1.0, "theta"), "s": ({"type": "number", "minimum": 0}, 1.0, "exponent s"),
              "kind": (KIND, "lower", "lower or upper estimate"), "per_octave": PER_OCTAVE},
    "profile": {**SET, "theta": (THETA, 1.0, "theta"), "m": (POS, None, "exponent m"),
                "kind": (KIND, "lower", "lower or upper profile"),
                "s_points": ({"type": "integer", "minimum": 3}, 33, "exponent grid size"),
                "per_octave": PER_OCTAVE},
    "profile-curve": {**SET, "theta": (THETA, 1.0, "theta"), "kind": (KIND, "lower", "kind"),
                      "m_grid": (NUMS, None, "increasing m values (default 10 up to n)")},
    "fbm": {**SET, "alpha": (ALPHA, None, "Hoelder index"), "m": (INT1, 1, "target dimension"),
            "replicate": ({"type": "integer", "minimum": 0}, 0, "replicate index")},
    "verify-holder": {
        **SET, "map": ({"enum": ["identity", "radial_power", "coordinate_projection",
                                 "piecewise_linear", "subspace"]}, "identity", "map name"),
        "alpha": ({"type": "number", "exclusiveMinimum": 0, "maximum": 1}, 1.0,
                  "exponent of radial_power"),
        "coords": ({"type": "array", "items": {"type": "integer", "minimum": 0}}, [0],
                   "kept coordinates"),
        "knots": (NUMS, None, "piecewise-linear knots"),
        "knot_values": (NUMS, None, "piecewise-linear values"),
        "angle": (NUM, 0.0, "line angle for subspace maps of planar sets"),
        "theta": (THETA, 1.0, "theta"), "kind": (KIND, "lower", "kind"),
        "target_alpha": ({"type": ["number", "null"], "exclusiveMinimum": 0}, None,
                         "exponent used on the profile side (negative controls)"),
    },
    "verify-fbm": {**SET, "alpha": (ALPHA, None, "Hoelder index"), "m": (INT1, 1, "target dimension"),
                   "theta": (THETA, 1.0, "theta"), "kind": (KIND, "lower", "kind"),
                   "trials": ({"type": "integer", "minimum": 8}, 16, "fBm samples"),
                   "target_alpha": ({"type": ["number", "null"], "exclusiveMinimum": 0}, None,
                                    "alpha used on the profile side (negative controls)")},
    "verify-continuity": {**SET, "alphas": ({"type": "array", "items": POS, "minItems": 4},
                                            [0.25, 0.5, 0.75, 1.0], "alpha grid"),
                          "thetas": ({"type": "array", "items": THETA, "minItems": 4},
                                     [0.25, 0.5, 0.75, 1.0], "theta grid"),
                          "hausdorff_dim": ({"type": ["number", "null"], "minimum": 0}, None,
                                            "known Hausdorff dimension, enables the strict check"),
                          "m_grid": (NUMS, None, "m grid for the m-continuity check"),
                          "kind": (KIND, "lower", "kind")},
    "scan-projections": {**SET, "theta": (THETA, 1.0, "theta"),
                         "lambdas": ({"type": "array", "items": THETA}, [1.0], "lambda grid"),
                         "directions": ({"type": "integer", "minimum": 64}, 64, "direction count"),
                         "kind": (KIND, "lower", "kind")},
}


class ConfigError(Exception):
    pass


def _fields(command: str) -> dict:
    return {**COMMON, **COMMANDS[command]}


def schema(command: str) -> dict:
    fields = _fields(command)
    required = [k for k, (sch, default, _) in fields.items()
                if default is None and "null" not in str(sch.get("type", ""))]
    return {"type": "object", "properties": {k: v[0] for k, v in fields.items()},
            "required": required, "additionalProperties": False}


def _flag_type(sch: dict):
    types = sch.get("type", "")
    types = types if isinstance(types, list) else [types]
    if "array" in types:
        item = sch.get("items", {}).get("type", "number")
        conv = int if item == "integer" else float
        return lambda text: [conv(v) for v in text.split(",") if v.strip()]
    if "integer" in types:
        return int
    if "number" in types:
        return float
    if "enum" in sch and all(isinstance(v, int) for v in sch["enum"]):
        return int
    return str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interdim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with any of the keys below")
        for key, (sch, default, text) in _fields(name).items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=_flag_type(sch),
                           default=argparse.SUPPRESS, help=f"{text} (default {default!r})")
    return parser


def resolve(command: str, flags: dict, environ=None) -> dict:
    """Merge defaults, config file, environment and flags, then validate."""
    environ = os.environ if environ is None else environ
    fields = _fields(command)
    config = {k: v[1] for k, v in fields.items()}
    path = flags.pop("config", None)
    if path is not None:
        try:
            with open(path) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise ConfigError("config file must hold a JSON object")
        from_file.pop("command", None)
        config.update(from_file)
    if environ.get(ENV_WORKERS):
        try:
            config["workers"] = int(environ[ENV_WORKERS])
        except ValueError as exc:
            raise ConfigError(f"{ENV_WORKERS} must be an integer") from exc
    config.update(flags)
    try:
        jsonschema.validate(config, schema(command))
    except jsonschema.ValidationError as exc:
        where = ".".join(map(str, exc.absolute_path)) or "config"
        raise ConfigError(f"{where}: {exc.message}") from exc
    if config.get("out") and environ.get(ENV_OUT_DIR) and not os.path.isabs(config["out"]):
        config["out"] = os.path.join(environ[ENV_OUT_DIR], config["out"])
    return config


def _load(config):
    try:
        return load_csv(config["set"])
    except OSError as exc:
        raise ConfigError(f"cannot read point set {config['set']}: {exc}") from exc


def _solver(config) -> SolverConfig:
    return SolverConfig(tolerance=config["tolerance"], max_iterations=config["max_iterations"],
                        restarts=config["restarts"], seed=config["seed"])


def _write_text(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def cmd_gen(c):
    kind = c["kind"]
    if kind == "sequence":
        ps = gen_sequence_set(c["p"], c["count"])
    elif kind == "cantor":
        ps = gen_cantor_like(c["ratio"], c["copies"], c["depth"], c["dim"])
    elif kind == "grid":
        ps = uniform_grid(c["count"], c["lo"], c["hi"])
    else:
        ps = segment(c["count"], c["angle"], c["length"])
    if c["out"]:
        Path(c["out"]).parent.mkdir(parents=True, exist_ok=True)
        save_csv(ps, c["out"])
    return {"points": len(ps), "dim": ps.dim, "resolution": ps.resolution,
            "diameter_bound": ps.diameter_bound, "file": c["out"]}


def cmd_capacity(c):
    ps = _load(c)
    kp = KernelParams(c["r"], c["theta"], c["s"], c["m"])
    _, est = equilibrium(ps, kp, _solver(c))
    return {"capacity": est.capacity, "energy": est.energy,
            "certificate_gap": est.certificate_gap, "iterations": est.iterations,
            "converged": est.converged}


def _densify(ladder, per_octave: int):
    """Geometric ladder spanning the same range with ``per_octave`` scales per octave."""
    if per_octave == 1:
        return None
    return geometric_ladder(ladder[0], ladder[-1], per_octave)


def cmd_cover(c):
    ps = _load(c)
    if c["r"] is None:
        unit = normalised(ps)
        ladder = _densify(dyadic_ladder(unit, finest=COVER_FLOOR * unit.resolution), c["per_octave"])
        value = dim_from_covering(unit, c["theta"], c["kind"], scale_ladder=ladder, normalise=False)
        return {"dimension": value, "kind": c["kind"]}
    kp = KernelParams(c["r"], c["theta"], c["s"], max(c["s"], float(ps.dim)))
    sol = cover_sum_1d(ps, kp) if ps.dim == 1 else cover_sum_grid(ps, kp)
    return json.loads(sol.to_json())


def cmd_profile(c):
    ps = _load(c)
    unit = normalised(ps)
    ladder = _densify(default_ladder(unit, c["theta"]), c["per_octave"])
    est = dim_profile(unit, c["theta"], c["m"], c["kind"], scale_ladder=ladder,
                      s_points=c["s_points"], normalise=False)
    return json.loads(est.to_json())


def cmd_profile_curve(c):
    ps = _load(c)
    ests = profile_curve(ps, c["theta"], c["kind"], c["m_grid"])
    text = curve_to_csv(ests)
    if c["out"]:
        _write_text(Path(c["out"]).with_suffix(".csv"), text)
    return {"m": [e.m for e in ests], "value": [e.value for e in ests],
            "residual": [e.fit_residual for e in ests]}


def cmd_fbm(c):
    ps = _load(c)
    sample = fbm_sample(ps, FbmParams(c["alpha"], c["m"], c["seed"]), c["replicate"])
    if c["out"]:
        _write_text(Path(c["out"]).with_suffix(".csv"), sample.to_csv())
    values = sample.values
    return {"points": len(ps), "target_dim": c["m"],
            "image_resolution": sample.image().resolution,
            "image_extent": (values.max(axis=0) - values.min(axis=0)).tolist()}


def _holder_spec(c, n):
    name = c["map"]
    if name == "identity":
        return HolderMapSpec.identity()
    if name == "radial_power":
        return HolderMapSpec.radial_power(c["alpha"])
    if name == "coordinate_projection":
        return HolderMapSpec.coordinate_projection(c["coords"])
    if name == "piecewise_linear":
        if not c["knots"] or not c["knot_values"]:
            raise ConfigError("piecewise_linear needs knots and knot_values")
        return HolderMapSpec.piecewise_linear(c["knots"], c["knot_values"])
    if n != 2:
        raise ConfigError("subspace maps from the CLI act on planar sets")
    return HolderMapSpec.subspace(Subspace.line(c["angle"]))


def cmd_verify_holder(c):
    ps = _load(c)
    spec = _holder_spec(c, ps.dim)
    return verify_holder_bound(ps, spec, c["theta"], c["kind"], c["target_alpha"])


def cmd_verify_fbm(c):
    ps = _load(c)
    return verify_fbm_theorem(ps, c["alpha"], c["m"], c["theta"], c["kind"], c["trials"],
                              c["seed"], c["target_alpha"], workers=c["workers"])


def cmd_verify_continuity(c):
    ps = _load(c)
    return verify_continuity_corollaries(ps, c["alphas"], c["thetas"], c["hausdorff_dim"],
                                         c["m_grid"], c["kind"])


def cmd_scan(c):
    ps = _load(c)
    return exceptional_scan(ps, c["theta"], c["lambdas"], c["directions"], c["kind"],
                            workers=c["workers"])


HANDLERS = {"gen": cmd_gen, "capacity": cmd_capacity, "cover": cmd_cover,
            "profile": cmd_profile, "profile-curve": cmd_profile_curve, "fbm": cmd_fbm,
            "verify-holder": cmd_verify_holder, "verify-fbm": cmd_verify_fbm,
            "verify-continuity": cmd_verify_continuity, "scan-projections": cmd_scan}


def run(command: str, config: dict) -> tuple[str, str]:
    """Execute one resolved command; returns (result document, metadata document)."""
    start = time.perf_counter()
    result = HANDLERS[command](config)
    runtime = time.perf_counter() - start
    if hasattr(result, "payload"):
        result = result.payload()
    doc = {"command": command, "config": config, "result": _plain(result)}
    meta = {"command": command, "version": __version__, "runtime": runtime,
            "finished": datetime.now(timezone.utc).isoformat()}
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n",
            json.dumps(meta, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))  # argparse exits with status 2 on bad flags
    command = args.pop("command")
    try:
        config = resolve(command, args)
    except ConfigError as exc:
        print(f"interdim {command}: config error: {exc}", file=sys.stderr)
        return 2
    json_out = config["out"] if command not in ("gen", "fbm", "profile-curve") else None
    try:
        doc, meta = run(command, config)
    except ConfigError as exc:
        print(f"interdim {command}: config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ArithmeticError, np.linalg.LinAlgError, ValueError, OSError) as exc:
        print(f"interdim {command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if json_out:
        _write_text(json_out, doc)
        _write_text(str(json_out) + ".meta.json", meta)
    else:
        sys.stdout.write(doc)
        sys.stderr.write(meta)
    return 0


if __name__ == "__main__":
    sys.exit(main())
