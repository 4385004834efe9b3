"""``weakpath`` command line.

Exit codes: 0 success, 1 usage or invalid input, 2 undefined quantity
(dark fringe, zero denominator), 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .composite import default_pointers, max_deviation, run_composite, sample_trials
from .errors import (DarkFringe, ParseError, ValidationError, VanishingOverlap, WeakPathError,
                     ZeroDenominator, ZeroReferenceAlpha)
from .pathways import Scenario, path_amplitudes, strong_outcome_probabilities
from .pointers import design_postselection, observable_weak_value, reading_distribution, weak_value
from .profiles import PointerSpec
from .scenarios import BUILTINS, builtin, load_scenario, serialize_scenario

EXIT_OK, EXIT_USAGE, EXIT_UNDEFINED, EXIT_NUMERIC = 0, 1, 2, 3
ORACLE_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def format_complex(z: complex, digits: int = 12) -> str:
    """``1+0i`` style, with round-off below 1e-12 shown as zero."""
    def part(x: float) -> str:
        x = 0.0 if abs(x) < 1e-12 else x
        return f"{x:.{digits}g}".replace("e+", "e")
    re, im = part(z.real), part(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}i"


def parse_complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


# ---------------------------------------------------------------- scenario assembly

def _pointer(args, k: int) -> PointerSpec | None:
    width = args.width if k == 0 else args.width2 if k == 1 else None
    if width is None:
        return None
    return PointerSpec(args.profile, width)


def _scenario(args) -> Scenario:
    s = builtin(args.builtin) if args.builtin else load_scenario(args.file)
    names = [n for n in (args.obs or "").split(",") if n]
    if names:
        pointers = [_pointer(args, k) or PointerSpec.delta() for k in range(len(names))]
        return s.measuring(names, pointers)
    if args.width is not None or args.width2 is not None:
        pointers = [_pointer(args, k) or st.pointer for k, st in enumerate(s.steps)]
        return s.with_pointers(pointers)
    return s


def fingerprint(s: Scenario) -> str:
    return hashlib.sha256(serialize_scenario(s).encode()).hexdigest()


def _parameters(args) -> dict:
    skip = {"func", "corrupt"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _emit(args, s: Scenario, outputs: dict, files: list[str]):
    """Write the run report next to ``--out``; nothing is written without it."""
    if not args.out:
        return
    report = {
        "tool": "weakpath",
        "version": __version__,
        "command": args.command,
        "scenario": fingerprint(s),
        "parameters": _parameters(args),
        "outputs": outputs,
        "files": files,
    }
    Path(str(args.out) + ".report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")


def _write(args, text: str) -> list[str]:
    if args.out:
        Path(args.out).write_text(text)
        return [str(args.out)]
    sys.stdout.write(text)
    return []


# ---------------------------------------------------------------- commands

def cmd_wv(args) -> int:
    s = _scenario(args)
    names = [n for n in (args.obs or "").split(",") if n]
    if names:
        values = {n: observable_weak_value(s, n) for n in names}
    else:
        paths = path_amplitudes(s)
        values = {st.name or f"step{j}": weak_value(paths, [st.observable.eigenvalues[l] for l in paths.labels[:, j]])
                  for j, st in enumerate(s.steps)}
    for v in values.values():
        print(format_complex(v))
    _emit(args, s, {k: format_complex(v) for k, v in values.items()}, [])
    return EXIT_OK


def _distribution(args, s: Scenario):
    return reading_distribution(s, h=args.grid_h, span=args.grid_span)


def distribution_csv(dist, s: Scenario) -> str:
    """One row per grid point and accurate outcome; density is per unit reading volume."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    order = sorted(dist.steps + dist.strong_steps)
    w.writerow([s.steps[j].name or f"step{j}" for j in order] + ["density"])
    grids = np.meshgrid(*dist.axes, indexing="ij") if dist.axes else []
    flat = [g.reshape(-1) for g in grids]
    for key in sorted(dist.branches):
        dens = np.asarray(dist.branches[key]).reshape(-1)
        for i in range(dens.size):
            row = []
            for j in order:
                if j in dist.steps:
                    row.append(repr(float(flat[dist.steps.index(j)][i])))
                else:
                    k = dist.strong_steps.index(j)
                    row.append(repr(float(dist.strong_values[k][key[k]])))
            w.writerow(row + [repr(float(max(dens[i], 0.0)))])
    return buf.getvalue()


def cmd_dist(args) -> int:
    s = _scenario(args)
    dist = _distribution(args, s)
    files = _write(args, distribution_csv(dist, s))
    outputs = {f"mean_{s.steps[j].name or j}": dist.mean(j) for j in sorted(dist.steps + dist.strong_steps)}
    _emit(args, s, outputs, files)
    return EXIT_OK


def cmd_sample(args) -> int:
    s = _scenario(args)
    dist = _distribution(args, s)
    res = sample_trials(dist, args.trials, args.seed)
    names = [s.steps[j].name or f"step{j}" for j in res.steps]
    payload = {
        "trials": args.trials,
        "seed": args.seed,
        "means": dict(zip(names, map(float, res.means))),
        "std_errors": dict(zip(names, map(float, res.std_errors))),
    }
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    files = _write(args, text)
    _emit(args, s, payload, files)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    s = _scenario(args)
    if not any(not st.pointer.is_delta for st in s.steps) and args.width is None:
        s = s.with_pointers([PointerSpec(args.profile, 1.0)] * len(s.steps))
    pointers = default_pointers(s, h=args.grid_h, span=args.grid_span)
    oracle = run_composite(s, pointers)
    analytic = reading_distribution(s, [p.grid for p in pointers if p is not None])
    if args.corrupt:
        key = next(iter(analytic.branches))
        bad = np.array(analytic.branches[key], copy=True)
        bad.reshape(-1)[np.argmax(bad)] *= 1 + args.corrupt
        analytic = type(analytic)(analytic.axes, analytic.steps, analytic.strong_steps,
                                  analytic.strong_values, {**analytic.branches, key: bad}, True)
    dev = max_deviation(oracle, analytic)
    ok = dev <= ORACLE_TOL
    payload = {"max_relative_deviation": dev, "tolerance": ORACLE_TOL, "pass": ok,
               "grid_points": [p.size for p in pointers if p is not None]}
    files = _write(args, json.dumps(payload, indent=1, sort_keys=True) + "\n")
    _emit(args, s, payload, files)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_design(args) -> int:
    s = _scenario(args)
    if args.target is None:
        raise ValidationError("design needs --target")
    target = parse_complex(args.target)
    alpha = None if args.alpha is None else [parse_complex(x) for x in args.alpha.split(",")]
    s = s.replace(postselect=None)
    state = design_postselection(s, target, alpha=alpha)
    check = weak_value(path_amplitudes(s.with_postselect(state)), s.steps[0].observable.eigenvalues)
    payload = {"postselect": [format_complex(z, 17) for z in state], "weak_value": format_complex(check)}
    for z in state:
        print(format_complex(z, 17))
    print(f"weak value: {format_complex(check)}")
    _emit(args, s.with_postselect(state), payload, [])
    return EXIT_OK


def cmd_strong(args) -> int:
    s = _scenario(args)
    probs = strong_outcome_probabilities(s, conditional=True)
    out = {}
    for key, p in probs.items():
        label = ",".join(repr(float(s.steps[j].observable.distinct_values[o])) for j, o in enumerate(key))
        out[label] = p
    text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    files = _write(args, text)
    _emit(args, s, out, files)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=sorted(BUILTINS))
    src.add_argument("--file", help="scenario document (JSON)")
    common.add_argument("--obs", help="comma-separated bundled observable names, measured in order")
    common.add_argument("--width", type=float, help="width of the first pointer (omit for an accurate pointer)")
    common.add_argument("--width2", type=float, help="width of the second pointer")
    common.add_argument("--profile", default="gaussian", choices=["gaussian", "rectangular"])
    common.add_argument("--grid-h", type=float, dest="grid_h")
    common.add_argument("--grid-span", type=float, dest="grid_span", default=6.0)
    common.add_argument("--out", help="output path; a run report is written to OUT.report.json")

    p = _Parser(prog="weakpath", description="Pre/post-selected measurements with von Neumann pointers.")
    p.add_argument("--version", action="version", version=f"weakpath {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("wv", parents=[common], help="weak values").set_defaults(func=cmd_wv)
    sub.add_parser("dist", parents=[common], help="reading density as CSV").set_defaults(func=cmd_dist)
    sp = sub.add_parser("sample", parents=[common], help="Monte Carlo trials")
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sample)
    op = sub.add_parser("oracle-check", parents=[common], help="compare against the composite simulation")
    op.add_argument("--corrupt", type=float, default=0.0, help=argparse.SUPPRESS)
    op.set_defaults(func=cmd_oracle_check)
    dp = sub.add_parser("design", parents=[common], help="post-selection for a target weak value")
    dp.add_argument("--target")
    dp.add_argument("--alpha", help="comma-separated normalized path amplitudes")
    dp.set_defaults(func=cmd_design)
    sub.add_parser("strong", parents=[common], help="accurate outcome probabilities").set_defaults(func=cmd_strong)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DarkFringe, ZeroDenominator, VanishingOverlap, ZeroReferenceAlpha) as exc:
        print(f"weakpath: undefined: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (ParseError, ValidationError, OSError, ValueError) as exc:
        if isinstance(exc, WeakPathError) and not isinstance(exc, (ParseError, ValidationError)):
            print(f"weakpath: numeric failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"weakpath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WeakPathError as exc:
        print(f"weakpath: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
