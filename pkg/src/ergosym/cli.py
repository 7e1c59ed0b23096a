"""Command-line front end: JSON configs in, CSV/JSON reports out.

Subcommands: rearrange, norms, ds-check, average, weighted-average,
wiener-wintner, return-times, counterexample. Configs carry a versioned
"schema": 1 field and a single 64-bit seed; every output header records the
seed, and identical configs produce byte-identical outputs. Exit codes:
0 success, 2 validation error, 3 budget exhausted, 4 internal consistency
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import averaging, divergence, formats
from .errors import (
    BudgetError,
    ConsistencyError,
    InputError,
    NumericError,
    WindowError,
)
from .formats import SCHEMA_VERSION, atomic_write_text
from .operators import ds_certificate
from .return_times import (
    RESONANCE_TOL,
    PointSystem,
    product_average,
    rotation_closed_form,
    rotation_q,
    wiener_wintner_sweep,
)
from .rng import SplitMix64
from .spaces import (
    LorentzWeight,
    OrliczFunction,
    Rearrangement,
    lorentz_norm,
    luxemburg_norm,
    norm,
    rearrangement,
)
from .weights import validate_bound

_CONFIG_COMMANDS = (
    "rearrange",
    "norms",
    "ds-check",
    "average",
    "weighted-average",
    "wiener-wintner",
    "return-times",
)

# window auto-growth for `counterexample` without --window
_AUTO_WINDOW_START = 64
_AUTO_WINDOW_CAP = 1 << 22


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read config {path}: {e}") from e
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(
            f"config parse error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    return cfg


def _checkpoints_from(cfg) -> tuple[int, ...]:
    spec = cfg.get("checkpoints")
    if spec is None:
        raise InputError("missing 'checkpoints'")
    if isinstance(spec, dict):
        if "geometric" not in spec:
            raise InputError("checkpoint objects must carry 'geometric'")
        return averaging.geometric_checkpoints(int(spec["geometric"]))
    return averaging._validated_checkpoints(spec)


def _system_from(obj) -> PointSystem:
    if not isinstance(obj, dict) or "order" not in obj:
        raise InputError("system spec needs an 'order'")
    return PointSystem.cyclic(
        int(obj["order"]), int(obj.get("step", 1)), float(obj.get("weight", 1.0))
    )


def validate(cfg: dict, command: str) -> list[str]:
    """Collect config diagnostics for a subcommand without running it."""
    diags: list[str] = []
    if cfg.get("schema") != SCHEMA_VERSION:
        diags.append(f"schema must be {SCHEMA_VERSION}, got {cfg.get('schema')!r}")
    if not isinstance(cfg.get("seed", 0), int):
        diags.append("seed must be a 64-bit integer")
    rng = SplitMix64(cfg.get("seed", 0) if isinstance(cfg.get("seed", 0), int) else 0)

    def attempt(label, fn):
        try:
            return fn()
        except (InputError, KeyError, TypeError, ValueError) as e:
            diags.append(f"{label}: {e}")
            return None

    space = None
    op_spec = cfg.get("operator")
    op_is_cx = isinstance(op_spec, dict) and op_spec.get("kind") == "counterexample"
    needs_operator = command in ("ds-check", "average", "weighted-average")

    if needs_operator and "operator" not in cfg:
        diags.append("missing 'operator'")

    if command in ("rearrange", "norms", "average", "weighted-average", "ds-check"):
        if "space" in cfg:
            space = attempt("space", lambda: formats.space_from_json(cfg["space"]))
        elif not (needs_operator and op_is_cx) and command != "ds-check":
            diags.append("missing 'space'")
        elif command == "ds-check" and "operator" in cfg and not op_is_cx:
            diags.append("missing 'space'")

    if needs_operator and "operator" in cfg:
        if op_is_cx:
            # the operator carries its own grid-cell space
            T = attempt("operator", lambda: formats.operator_from_json(op_spec, None))
            if T is not None and space is None:
                space = T.space
        elif space is not None:
            attempt("operator", lambda: formats.operator_from_json(op_spec, space))

    if command in ("rearrange", "norms", "average", "weighted-average"):
        if "function" not in cfg:
            diags.append("missing 'function'")
        elif space is not None:
            attempt(
                "function", lambda: formats.function_from_json(cfg["function"], space, rng)
            )

    if command in ("average", "weighted-average"):
        attempt("checkpoints", lambda: _checkpoints_from(cfg))
        if space is not None:
            probes = cfg.get("probes", [0])
            if any(
                not isinstance(p, int) or p < 0 or p >= space.n_atoms for p in probes
            ):
                diags.append("probes: probe atom out of range")

    if command == "weighted-average":
        if "weight" not in cfg:
            diags.append("missing 'weight'")
        else:
            w = attempt("weight", lambda: formats.weight_from_json(cfg["weight"]))
            if w is not None:
                prefix = w.table.size if w.kind == "explicit" else 64
                if not validate_bound(w, prefix):
                    diags.append(
                        "weight: materialized values exceed the declared bound"
                    )

    if command in ("wiener-wintner", "return-times"):
        sysa = attempt("system", lambda: _system_from(cfg.get("system")))
        if sysa is not None and "function" in cfg:
            attempt(
                "function",
                lambda: formats.function_from_json(cfg["function"], sysa.space, rng),
            )
        elif "function" not in cfg:
            diags.append("missing 'function'")
        attempt("checkpoints", lambda: _checkpoints_from(cfg))

    if command == "wiener-wintner":
        if int(cfg.get("lambda_grid", 0)) < 1:
            diags.append("lambda_grid must be a positive integer")
        if "probes" not in cfg or not cfg["probes"]:
            diags.append("missing 'probes'")

    if command == "return-times":
        sysb = attempt("second_system", lambda: _system_from(cfg.get("second_system")))
        if sysb is not None and "second_function" in cfg:
            attempt(
                "second_function",
                lambda: formats.function_from_json(
                    cfg["second_function"], sysb.space, rng
                ),
            )
        elif "second_function" not in cfg:
            diags.append("missing 'second_function'")
        if "probes" not in cfg or not cfg["probes"]:
            diags.append("missing 'probes'")

    return diags


def _outpath(args, cfg: dict, key: str, default: str) -> Path:
    name = default
    outputs = cfg.get("outputs", {})
    if isinstance(outputs, dict) and key in outputs:
        name = str(outputs[key])
    return Path(args.output_dir) / name


def _run_rearrange(args, cfg):
    seed = cfg.get("seed", 0)
    rng = SplitMix64(seed)
    space = formats.space_from_json(cfg["space"])
    f = formats.function_from_json(cfg["function"], space, rng)
    r = rearrangement(f)
    atomic_write_text(
        _outpath(args, cfg, "rearrangement", "rearrangement.csv"),
        formats.rearrangement_csv(r, seed),
    )
    return 0


def _run_norms(args, cfg):
    seed = cfg.get("seed", 0)
    rng = SplitMix64(seed)
    space = formats.space_from_json(cfg["space"])
    f = formats.function_from_json(cfg["function"], space, rng)
    payload = {
        "L1": norm(f, "L1"),
        "Linf": norm(f, "Linf"),
        "L1plusLinf": norm(f, "L1plusLinf"),
        "L1capLinf": norm(f, "L1capLinf"),
    }
    if "orlicz" in cfg:
        spec = cfg["orlicz"]
        if "power" not in spec:
            raise InputError("orlicz spec needs a 'power'")
        phi = OrliczFunction.power(float(spec["power"]))
        payload["luxemburg"] = luxemburg_norm(f, phi, float(spec.get("tol", 1e-10)))
    if "lorentz" in cfg:
        spec = cfg["lorentz"]
        if "capped" in spec:
            w = LorentzWeight.capped(float(spec["capped"]))
        else:
            w = LorentzWeight(
                np.asarray(spec["knots"], dtype=float),
                np.asarray(spec["slopes"], dtype=float),
            )
        payload["lorentz"] = lorentz_norm(f, w)
    atomic_write_text(
        _outpath(args, cfg, "norms", "norms.json"), formats.json_report(payload, seed)
    )
    return 0


def _run_ds_check(args, cfg):
    seed = cfg.get("seed", 0)
    op_spec = cfg["operator"]
    space = None
    if not (isinstance(op_spec, dict) and op_spec.get("kind") == "counterexample"):
        space = formats.space_from_json(cfg["space"])
    T = formats.operator_from_json(op_spec, space)
    rep = ds_certificate(T)
    atomic_write_text(
        _outpath(args, cfg, "ds_report", "ds_report.json"),
        formats.json_report(formats.ds_report_payload(rep), seed),
    )
    return 0


def _run_average(args, cfg, use_weights: bool):
    seed = cfg.get("seed", 0)
    rng = SplitMix64(seed)
    op_spec = cfg["operator"]
    if isinstance(op_spec, dict) and op_spec.get("kind") == "counterexample":
        T = formats.operator_from_json(op_spec, None)
        space = T.space
    else:
        space = formats.space_from_json(cfg["space"])
        T = formats.operator_from_json(op_spec, space)
    f = formats.function_from_json(cfg["function"], space, rng)
    cps = _checkpoints_from(cfg)
    probes = tuple(cfg.get("probes", [0]))
    budget = int(cfg.get("max_iterations", averaging.DEFAULT_BUDGET))
    full = cfg.get("mode", "full") == "full"
    if use_weights:
        beta = formats.weight_from_json(cfg["weight"])
        report = averaging.weighted(
            T, f, beta, cps, probes, store_averages=full, max_iterations=budget
        )
    else:
        report = averaging.cesaro(
            T, f, cps, probes, store_averages=full, max_iterations=budget
        )
    if full:
        averaging.majorization_trace(report, f)
    atomic_write_text(
        _outpath(args, cfg, "averages", "averages.csv"),
        formats.averaging_csv(report, seed),
    )
    return 0


def _run_wiener_wintner(args, cfg):
    seed = cfg.get("seed", 0)
    rng = SplitMix64(seed)
    system = _system_from(cfg["system"])
    f = formats.function_from_json(cfg["function"], system.space, rng)
    probes = tuple(int(p) for p in cfg["probes"])
    grid = int(cfg["lambda_grid"])
    cps = _checkpoints_from(cfg)
    budget = int(cfg.get("max_iterations", averaging.DEFAULT_BUDGET))
    sweep = wiener_wintner_sweep(system, f, probes, grid, cps, budget)

    oracle = None
    resonant = None
    if isinstance(cfg["function"], dict) and "character" in cfg["function"]:
        # rotation model: the closed form applies, emit oracle columns
        order = system.space.n_atoms
        c = int(cfg["function"]["character"])
        step = int(cfg["system"].get("step", 1))
        rho = Fraction(c * step, order)
        oracle = np.empty_like(sweep.averages)
        resonant = []
        for j in range(grid):
            lam_phase = Fraction(j, grid)
            q, _ = rotation_q(rho, lam_phase)
            if abs(1.0 - q) < RESONANCE_TOL:
                resonant.append(j)
            for pi, w in enumerate(probes):
                omega = Fraction(c * w, order)
                for ci, n in enumerate(cps):
                    oracle[j, pi, ci] = rotation_closed_form(
                        rho, lam_phase, float(omega), n
                    )
    atomic_write_text(
        _outpath(args, cfg, "sweep", "sweep.csv"),
        formats.sweep_csv(sweep, seed, oracle, resonant),
    )
    return 0


def _run_return_times(args, cfg):
    seed = cfg.get("seed", 0)
    rng = SplitMix64(seed)
    sys_a = _system_from(cfg["system"])
    f = formats.function_from_json(cfg["function"], sys_a.space, rng)
    sys_b = _system_from(cfg["second_system"])
    g = formats.function_from_json(cfg["second_function"], sys_b.space, rng)
    probes = [(int(a), int(b)) for a, b in cfg["probes"]]
    cps = _checkpoints_from(cfg)
    budget = int(cfg.get("max_iterations", averaging.DEFAULT_BUDGET))
    report = product_average(sys_a, f, sys_b, g, probes, cps, budget)
    atomic_write_text(
        _outpath(args, cfg, "product", "product.csv"),
        formats.product_csv(report, seed),
    )
    return 0


def _run_counterexample(args, cfg):
    seed = (cfg or {}).get("seed", 0)
    if cfg and "space" in cfg and "function" in cfg:
        rng = SplitMix64(seed)
        space = formats.space_from_json(cfg["space"])
        f = formats.function_from_json(cfg["function"], space, rng)
        rearr = rearrangement(f)
        cert = divergence.construct_certificate(
            rearr, args.eps, args.stages, args.margin, args.grid
        )
    elif args.window > 0:
        rearr = Rearrangement(np.array([0.0, float(args.window)]), np.array([1.0]))
        cert = divergence.construct_certificate(
            rearr, args.eps, args.stages, args.margin, args.grid
        )
    else:
        # constant profile: grow the window until the greedy search fits
        window = _AUTO_WINDOW_START
        while True:
            rearr = Rearrangement(np.array([0.0, float(window)]), np.array([1.0]))
            try:
                cert = divergence.construct_certificate(
                    rearr, args.eps, args.stages, args.margin, args.grid
                )
                break
            except WindowError:
                window *= 4
                if window > _AUTO_WINDOW_CAP:
                    raise BudgetError(
                        f"window growth exceeded {_AUTO_WINDOW_CAP} unit cells"
                    ) from None
    result = divergence.verify_certificate(cert, rearr)
    if not result.ok:
        raise ConsistencyError(
            f"fresh certificate failed verification at stage {result.failed_stage}"
        )
    ts = divergence.probe_points(cert.eps, cert.grid)
    traces = divergence.direct_averages(rearr, cert.breakpoints, ts, cert.breakpoints)
    outdir = Path(args.output_dir)
    atomic_write_text(
        outdir / "certificate.json",
        formats.json_report(formats.certificate_payload(cert, result), seed),
    )
    atomic_write_text(outdir / "traces.csv", formats.traces_csv(ts, cert.breakpoints, traces, seed))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ergosym",
        description="Ergodic averaging experiments on atomic measure spaces",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in _CONFIG_COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="path to a JSON experiment config")
        sp.add_argument("--output-dir", default=".")
    cx = sub.add_parser("counterexample")
    cx.add_argument("config", nargs="?", help="optional profile config (space+function)")
    cx.add_argument("--eps", type=float, default=0.1)
    cx.add_argument("--stages", type=int, default=3)
    cx.add_argument("--margin", type=float, default=0.0)
    cx.add_argument("--grid", type=int, default=10)
    cx.add_argument("--window", type=int, default=0, help="0 = grow automatically")
    cx.add_argument("--output-dir", default=".")
    return p


_RUNNERS = {
    "rearrange": _run_rearrange,
    "norms": _run_norms,
    "ds-check": _run_ds_check,
    "wiener-wintner": _run_wiener_wintner,
    "return-times": _run_return_times,
}


def run(args) -> int:
    if args.command == "counterexample":
        cfg = load_config(args.config) if args.config else None
        if cfg is not None:
            diags = validate(cfg, "rearrange")  # profile config: space+function
            if diags:
                for d in diags:
                    print(f"config: {d}", file=sys.stderr)
                return 2
        return _run_counterexample(args, cfg)
    cfg = load_config(args.config)
    diags = validate(cfg, args.command)
    if diags:
        for d in diags:
            print(f"config: {d}", file=sys.stderr)
        return 2
    if args.command == "average":
        return _run_average(args, cfg, use_weights=False)
    if args.command == "weighted-average":
        return _run_average(args, cfg, use_weights=True)
    return _RUNNERS[args.command](args, cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (BudgetError, NumericError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ConsistencyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
