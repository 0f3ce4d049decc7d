"""Command line entry point: ``newtonkernel <command> -i MODEL [options]``.

Commands: newton, bergman, zeta, fiber, verify, localize, sandwich.
Options may also come from a ``key=value`` config file (``--config``);
explicit flags win over the file.

Exit codes: 0 success, 1 verification failed, 2 input error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .asymfit import (
    DELTAS,
    InapplicableError,
    compensated_ratio_fit,
    exponent_scan,
    gap_decay_check,
    pole_order_probe,
    predicted_law,
    sandwich_check,
)
from .expr import ModelFunction, ParseError, parse_model, render
from .newton import check_nondegenerate, newton_data
from .quad import (
    GridSpec,
    QuadConfig,
    QuadratureError,
    bergman_curve,
    c0_tilde,
    fiber_H,
    laplace_L,
    sup_on_support,
    write_csv,
    zeta_Z,
)

SCHEMA_VERSION = "1"
COMMANDS = ("newton", "bergman", "zeta", "fiber", "verify", "localize", "sandwich")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    input: str
    command: str
    quad: QuadConfig
    output: str | None = None
    seed: int = 0
    target: str = "bergman"
    threshold: float | None = None
    M: int | None = None
    tau_given: bool = False
    s_values: tuple[float, ...] | None = None
    u_grid: GridSpec | None = None


# ---------------------------------------------------------------------------
# argument handling

_FLOAT_KEYS = ("R", "tau_min", "tau_max", "rho_min", "rho_max", "rel_tol", "abs_tol", "threshold", "U", "u_min", "u_max")
_INT_KEYS = ("tau_per_decade", "rho_per_decade", "seed", "M", "workers", "u_per_decade", "max_subdivisions")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="newtonkernel", description="Newton data and asymptotic checks for model functions.")
    p.add_argument("cmd", nargs="?", choices=COMMANDS, help="command (alternatively --command)")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("-i", "--input", help="model text or path to a file containing it")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--R", type=float, dest="R")
    p.add_argument("--U", type=float, dest="U", help="box size for the localization gap")
    p.add_argument("--tau-min", type=float, dest="tau_min")
    p.add_argument("--tau-max", type=float, dest="tau_max")
    p.add_argument("--tau-per-decade", type=int, dest="tau_per_decade")
    p.add_argument("--rho-min", type=float, dest="rho_min")
    p.add_argument("--rho-max", type=float, dest="rho_max")
    p.add_argument("--rho-per-decade", type=int, dest="rho_per_decade")
    p.add_argument("--u-min", type=float, dest="u_min")
    p.add_argument("--u-max", type=float, dest="u_max")
    p.add_argument("--u-per-decade", type=int, dest="u_per_decade")
    p.add_argument("--s", type=float, nargs="+", dest="s_values", help="zeta abscissas")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, dest="abs_tol")
    p.add_argument("--max-subdivisions", type=int, dest="max_subdivisions")
    p.add_argument("--workers", type=int)
    p.add_argument("--target", choices=("bergman", "c0", "laplace", "fiber", "zeta_pole"))
    p.add_argument("--threshold", type=float)
    p.add_argument("--M", type=int, dest="M")
    p.add_argument("--out", help="output path prefix")
    p.add_argument("--seed", type=int)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            k = k.replace("-", "_")
            try:
                if k in _FLOAT_KEYS:
                    out[k] = float(v)
                elif k in _INT_KEYS:
                    out[k] = int(v)
                elif k == "s_values":
                    out[k] = [float(x) for x in v.replace(",", " ").split()]
                else:
                    out[k] = v
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: bad value for {k}: {v}") from exc
    return out


def _grid(opts: dict, prefix: str, default: GridSpec | None) -> GridSpec | None:
    lo, hi, per = opts.get(f"{prefix}_min"), opts.get(f"{prefix}_max"), opts.get(f"{prefix}_per_decade")
    if lo is None and hi is None and per is None:
        return default
    base = default or GridSpec(1.0, 10.0, 8)
    return GridSpec(lo if lo is not None else base.lo, hi if hi is not None else base.hi, per if per is not None else base.per_decade)


def resolve(argv: Sequence[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = {}
    if ns.config:
        opts.update(read_config_file(ns.config))
    opts.update({k: v for k, v in vars(ns).items() if v is not None and k not in ("config", "cmd")})
    command = ns.cmd or opts.get("command")
    if command not in COMMANDS:
        raise InputError("a command is required: " + ", ".join(COMMANDS))
    if not opts.get("input"):
        raise InputError("--input is required")
    text = opts["input"]
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read().strip()
    try:
        q = QuadConfig(
            cutoff_R=opts.get("R", 1.0),
            rel_tol=opts.get("rel_tol", 1e-9),
            abs_tol=opts.get("abs_tol", 0.0),
            max_subdivisions=opts.get("max_subdivisions", 200),
            tau_grid=_grid(opts, "tau", None),
            rho_grid=_grid(opts, "rho", GridSpec(1e-5, 1e-2, 8)),
            U_box=opts.get("U", 3.0),
            workers=opts.get("workers", 1),
        )
        u_grid = _grid(opts, "u", None)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return RunConfig(
        input=text,
        command=command,
        quad=q,
        output=opts.get("out"),
        seed=opts.get("seed", 0),
        target=opts.get("target", "bergman"),
        threshold=opts.get("threshold"),
        M=opts.get("M"),
        tau_given=q.tau_grid is not None,
        s_values=tuple(opts["s_values"]) if opts.get("s_values") else None,
        u_grid=u_grid,
    )


# ---------------------------------------------------------------------------
# reports

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False)


def _header(cfg: RunConfig, f: ModelFunction, command: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "input": render(f)}


def _quad_json(q: QuadConfig) -> dict:
    def grid(g):
        return None if g is None else {"min": g.lo, "max": g.hi, "per_decade": g.per_decade}

    return {
        "R": q.cutoff_R,
        "rel_tol": q.rel_tol,
        "abs_tol": q.abs_tol,
        "tau_grid": grid(q.tau_grid),
        "rho_grid": grid(q.rho_grid),
        "U_box": q.U_box,
    }


def _emit(cfg: RunConfig, meta: dict, samples=None, out=None) -> None:
    out = out or sys.stdout
    if cfg.output:
        if samples is not None:
            write_csv(samples, cfg.output + ".csv")
            meta["csv"] = cfg.output + ".csv"
        with open(cfg.output + ".json", "w", encoding="utf-8") as fh:
            fh.write(_dump(meta) + "\n")
        out.write(_dump(meta) + "\n")
    elif samples is not None:
        out.write(write_csv(samples))
    else:
        out.write(_dump(meta) + "\n")


def newton_report(f: ModelFunction, seed: int = 0) -> dict:
    nd = newton_data(f)
    verdict = check_nondegenerate(f, seed=seed)
    body = nd.to_json()
    rep = {
        "newton_data": body,
        "polyhedron": nd.polyhedron.to_json(),
        "nondegeneracy": {"verdict": verdict.kind, "witness": verdict.witness},
        "warnings": [],
    }
    if not nd.principal_compact:
        rep["warnings"].append(
            "principal face is noncompact: the power-log leading law does not apply; curves are raw output only"
        )
    return rep


def _fiber_grid(f: ModelFunction, cfg: RunConfig) -> np.ndarray:
    if cfg.u_grid is not None:
        return cfg.u_grid.points()
    top = sup_on_support(f, cfg.quad.cutoff_R)
    return GridSpec(top * 1e-9, top * 1e-6, 4).points()


def _measure(f: ModelFunction, target: str, cfg: RunConfig):
    q = cfg.quad
    if target == "bergman":
        return bergman_curve(f, q), "rho_to_0"
    if target in ("c0", "laplace"):
        grid = q.tau_grid if cfg.tau_given else GridSpec(1e3, 1e6, 8)
        fn = c0_tilde if target == "c0" else laplace_L
        return [fn(f, float(t), q) for t in grid.points()], "tau_to_inf"
    if target == "fiber":
        return [fiber_H(f, float(u), q) for u in _fiber_grid(f, cfg)], "u_to_0"
    raise ValueError(target)


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        f = parse_model(cfg.input)
    except ParseError as exc:
        raise InputError(str(exc)) from exc
    head = _header(cfg, f, cfg.command)
    q = cfg.quad

    if cfg.command == "newton":
        _emit(cfg, {**head, **newton_report(f, cfg.seed)}, out=out)
        return EXIT_OK

    if cfg.command == "bergman":
        curve = bergman_curve(f, q)
        _emit(cfg, {**head, "quad": _quad_json(q), "variable": "rho", "count": len(curve)}, curve, out)
        return EXIT_OK

    if cfg.command == "zeta":
        d = float(newton_data(f).d)
        s_vals = cfg.s_values or tuple(-2 / d + dl for dl in DELTAS)
        try:
            curve = [zeta_Z(f, s, q) for s in s_vals]
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        _emit(cfg, {**head, "quad": _quad_json(q), "variable": "s", "count": len(curve)}, curve, out)
        return EXIT_OK

    if cfg.command == "fiber":
        curve = [fiber_H(f, float(u), q) for u in _fiber_grid(f, cfg)]
        _emit(cfg, {**head, "quad": _quad_json(q), "variable": "u", "count": len(curve)}, curve, out)
        return EXIT_OK

    if cfg.command == "localize":
        taus = cfg.quad.tau_grid.points() if cfg.tau_given else np.arange(1.0, 51.0)
        rep = gap_decay_check(f, taus, q)
        _emit(cfg, {**head, "quad": _quad_json(q), **rep.to_json()}, list(rep.samples), out)
        return EXIT_OK if rep.bounded else EXIT_FAIL

    nd = newton_data(f)
    if cfg.command == "verify":
        try:
            law = predicted_law(nd, cfg.target)
        except InapplicableError as exc:
            raise InputError(str(exc)) from exc
        meta = {
            **head,
            "newton_data": nd.to_json(),
            "target": cfg.target,
            "predicted": {"a": law.to_json()["a"], "k": law.k},
        }
        if cfg.target == "zeta_pole":
            rep = pole_order_probe(f, nd, q, threshold=cfg.threshold or 0.10)
            meta["fitted"] = {"C": rep.law.C, "drift": rep.drift, "values": list(rep.ratios)}
        else:
            samples, var = _measure(f, cfg.target, cfg)
            rep = compensated_ratio_fit(samples, law, cfg.threshold)
            fitted = {"C": rep.law.C, "a_est": None, "k_est": None, "drift": rep.drift}
            try:
                scan = exponent_scan(samples, var)
                fitted.update(a_est=scan.a_est, a_err=scan.a_err, a_snapped=scan.to_json()["a_snapped"], k_est=scan.k_est)
            except ValueError as exc:
                fitted["scan_error"] = str(exc)
            meta["fitted"] = fitted
            if cfg.output:
                write_csv(samples, cfg.output + ".csv")
        meta["threshold"] = rep.threshold
        meta["passed"] = rep.passed
        _emit(cfg, meta, out=out)
        return EXIT_OK if rep.passed else EXIT_FAIL

    if cfg.command == "sandwich":
        try:
            rep = sandwich_check(f, cfg.M, q)
        except InapplicableError as exc:
            raise InputError(str(exc)) from exc
        _emit(cfg, {**head, "quad": _quad_json(q), **rep.to_json()}, out=out)
        return EXIT_OK if rep.passed else EXIT_FAIL

    raise InputError(f"unknown command {cfg.command}")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = resolve(argv)
        return run(cfg)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if exc.best is not None:
            print(f"best estimate: value={exc.best.value!r} est_error={exc.best.est_error!r}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
