"""Command-line front end: ``twistgpd <command> --model m.json ...``.

Exit status: 0 success, 2 validation or computation failure, 3 inconclusive
analysis, 4 unreadable or malformed input.  Failures print an error record
in the requested output format.
"""
from __future__ import annotations

import argparse
import sys

import mpmath

from .algebra import convolve, i_norm_hp, involve
from .cocycle import Trivial, validate_cocycle
from .engine import analyze
from .errors import MalformedSpec, TwistError
from .formats import (
    FORMAT_VERSION,
    dumps,
    element_to_json,
    load_cocycle_file,
    load_element_file,
    load_model_file,
    model_to_json,
    read_json,
)
from .rep import decompose_finite_cstar, reduced_norm_estimate

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 2, 3, 4

COMMANDS = ("validate", "conv", "involve", "norm", "reduced-norm", "decompose", "principal", "analyze")
DEFAULTS = {"depth": 3, "truncation": 64, "tol": 1e-10, "samples": 0, "seed": 0}
CONFIG_TYPES = {"depth": int, "truncation": int, "tol": float, "samples": int, "seed": int}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors, not validation failures
        self.print_usage(sys.stderr)
        sys.stdout.write(dumps({"error": "UsageError", "message": message}) + "\n")
        sys.exit(EXIT_INPUT)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistgpd", description="Twisted groupoid convolution algebras.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", required=True, help="model spec file")
    p.add_argument("--cocycle", help="cocycle spec file (default: trivial)")
    p.add_argument("--element", action="append", default=[], help="element file; conv takes two")
    p.add_argument("--config", help="analysis config file with depth, truncation, tol, samples, seed")
    p.add_argument("--depth", type=int)
    p.add_argument("--truncation", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", choices=("text", "json"), default="text")
    return p


def _settings(args) -> dict:
    out = dict(DEFAULTS)
    if args.config:
        cfg = read_json(args.config)
        if not isinstance(cfg, dict) or cfg.get("format_version") != FORMAT_VERSION:
            raise MalformedSpec(f"config: format_version must be {FORMAT_VERSION}", path=args.config)
        extra = set(cfg) - set(CONFIG_TYPES) - {"format_version"}
        if extra:
            raise MalformedSpec(f"unknown config fields {sorted(extra)}", path=args.config)
        for k, v in cfg.items():
            if k == "format_version":
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)) or (CONFIG_TYPES[k] is int and isinstance(v, float)):
                raise MalformedSpec(f"config field {k} must be a number", path=args.config, field=k)
            out[k] = CONFIG_TYPES[k](v)
    for k in DEFAULTS:
        v = getattr(args, k)
        if v is not None:
            out[k] = v
    if out["depth"] < 1 or out["truncation"] < 1 or out["samples"] < 0 or not out["tol"] > 0:
        raise MalformedSpec("depth and truncation must be positive, samples nonnegative, tol positive")
    return out


def _elements(args, model, count: int):
    if len(args.element) != count:
        raise MalformedSpec(f"{args.command} needs {count} --element file(s), got {len(args.element)}")
    return [load_element_file(p, model) for p in args.element]


def _hp(value) -> dict:
    return {"value": float(value), "decimal": mpmath.nstr(value, 30)}


def run(args) -> tuple[int, dict]:
    """Execute one command; returns (exit status, report record)."""
    s = _settings(args)
    model = load_model_file(args.model)
    sigma = load_cocycle_file(args.cocycle, model) if args.cocycle else Trivial(model)
    report: dict = {"command": args.command, "model": model_to_json(model), "cocycle": sigma.describe()}
    if sigma.weak_containment not in (None, "derive"):
        report["cocycle"]["weak_containment"] = sigma.weak_containment
    cmd = args.command
    status = EXIT_OK

    if cmd == "validate":
        if model.is_finite:
            model.check_axioms()
            report["groupoid"] = {"valid": True, "arrows": len(model.arrows()), "units": len(model.units())}
        else:
            report["groupoid"] = {"valid": True, "arrows": "infinite", "checked": "on generators"}
        report["validation"] = validate_cocycle(model, sigma, s["depth"]).record()
    elif cmd == "conv":
        f, g = _elements(args, model, 2)
        h = convolve(sigma, f, g)
        report["result"] = element_to_json(h)
        report["i_norm"] = _hp(i_norm_hp(h))
    elif cmd == "involve":
        (f,) = _elements(args, model, 1)
        report["result"] = element_to_json(involve(sigma, f))
    elif cmd == "norm":
        (f,) = _elements(args, model, 1)
        report["i_norm"] = _hp(i_norm_hp(f))
    elif cmd == "reduced-norm":
        (f,) = _elements(args, model, 1)
        est = reduced_norm_estimate(sigma, f, None, s["truncation"], s["tol"], seed=s["seed"], samples=s["samples"])
        report["estimate"] = est.record()
        report["seed"] = s["seed"]
    elif cmd == "decompose":
        report["blocks"] = decompose_finite_cstar(model, sigma, seed=s["seed"]).record()
    elif cmd == "principal":
        report["principal"] = model.is_topologically_principal(s["depth"]).record()
    else:
        verdict = analyze(model, sigma, s["depth"])
        report.update(verdict.record())
        if not verdict.unique:
            status = EXIT_INCONCLUSIVE
    return status, report


def _text(record, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k in sorted(record):
        v = record[k]
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(i, dict) for i in v):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  -")
                lines.append(_text(item, indent + 2))
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(lines)


def render(record: dict, output: str) -> str:
    return dumps(record) if output == "json" else _text(record)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        status, report = run(args)
    except TwistError as exc:
        status, report = exc.code, exc.record()
    sys.stdout.write(render(report, args.output) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
