"""Command-line interface: ``qmeter compute | classify | verify | fixtures``.

Exit codes: 0 success, 1 property failure, 2 usage error (bad flags,
unknown names or suites), 3 schema or validation error in an input document.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import instrument_channel
from .entropy import von_neumann
from .errors import ClassificationError, ConsistencyError, SchemaError, ShapeError
from .fixtures import bundled_document, write_bundled
from .io import encode_matrix, load_document
from .measurement import entropy_reduction_direct, mean_posteriori_entropy, outcome_distribution
from .mutual_info import general_bound_terms, mutual_info_relative, qc_mutual_info
from .sampling import ENSEMBLES, RandomModel
from .structure import classify, is_efficient
from .verify import GROUPS, SUITES, run_suite, suite_names

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SCHEMA = 0, 1, 2, 3
DEFAULT_SEED = 7
BUNDLED = "bundled"


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.12g}"


def _fmt_complex(z) -> str:
    re, im = float(z.real) + 0.0, float(z.imag)
    if abs(im) <= 1e-15:
        return fmt(re)
    return f"{fmt(re)}{'+' if im >= 0 else '-'}{fmt(abs(im))}j"


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def dump_json(obj, indent=None) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=indent, ensure_ascii=False)


def _seed_default() -> int:
    raw = os.environ.get("QMETER_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QMETER_SEED must be an integer, got {raw!r}") from None


def _range(text: str) -> tuple[int, int]:
    parts = text.replace("-", ":").split(":")
    try:
        lo, hi = (int(parts[0]), int(parts[-1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI or N, got {text!r}") from None
    if len(parts) > 2 or lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi


def _load(doc: str):
    if doc == BUNDLED:
        return bundled_document()
    try:
        return load_document(doc)
    except OSError as exc:
        raise UsageError(f"cannot read {doc}: {exc.strerror or exc}") from None


def _resolve(doc, name: str, kinds):
    try:
        return doc.resolve(name, kinds)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _emit(args, text_lines: list[str], machine: dict, full: dict | None = None) -> None:
    """Print the report; write the machine form (or ``full``) to --output if given."""
    if args.format == "machine":
        out = dump_json(full if full is not None else machine, indent=1) + "\n"
    else:
        out = "\n".join(text_lines) + "\n--- machine ---\n" + dump_json(machine) + "\n"
    sys.stdout.write(out)
    if args.output:
        body = out if full is None else dump_json(full, indent=1) + "\n"
        Path(args.output).write_text(body, encoding="utf-8")


# -- commands ----------------------------------------------------------------

def cmd_compute(args) -> int:
    doc = _load(args.doc)
    rho = _resolve(doc, args.state, ("states",))
    m = _resolve(doc, args.measurement, ("measurements", "instruments"))
    if m.d_in != rho.shape[0]:
        raise UsageError(f"state has dimension {rho.shape[0]}, measurement expects {m.d_in}")
    efficient = is_efficient(m)[0]
    if not efficient and not args.general:
        raise UsageError(f"{args.measurement!r} is not efficient; pass --general for the bound report")
    h = von_neumann(rho)
    probs = outcome_distribution(m, rho)
    mean_h = mean_posteriori_entropy(m, rho)
    er = entropy_reduction_direct(m, rho)
    info_pi = qc_mutual_info(rho, m)
    info_lam = mutual_info_relative(rho, instrument_channel(m))
    identity = abs(info_pi + info_lam - 2 * h) if efficient else None
    report = {
        "state": args.state,
        "measurement": args.measurement,
        "efficient": efficient,
        "entropy": h,
        "outcome_distribution": dict(zip(m.labels, probs.tolist())),
        "mean_posteriori_entropy": mean_h,
        "entropy_reduction": er,
        "qc_mutual_information": info_pi,
        "cross_residual": abs(er - info_pi),
        "instrument_mutual_information": info_lam,
        "identity_residual": identity,
    }
    lines = [
        f"state: {args.state}",
        f"measurement: {args.measurement} (efficient: {fmt(efficient)})",
        f"H(rho): {fmt(h)}",
        "outcome distribution: " + ", ".join(f"{lbl}={fmt(p)}" for lbl, p in zip(m.labels, probs)),
        f"mean posteriori entropy: {fmt(mean_h)}",
        f"ER (direct): {fmt(er)}",
        f"I(rho, Pi) (relative entropy): {fmt(info_pi)}",
        f"cross residual |ER - I(rho, Pi)|: {fmt(abs(er - info_pi))}",
        f"I(rho, Lambda): {fmt(info_lam)}",
        f"identity residual |I(Pi) + I(Lambda) - 2H|: {fmt(identity)}",
    ]
    if args.general:
        terms = general_bound_terms(rho, m)
        report["bound"] = terms["bound"]
        report["exact_gap"] = terms["gap"]
        lines += [f"bound sum_x H(rho_hat_x): {fmt(terms['bound'])}",
                  f"exact gap: {fmt(terms['gap'])}"]
    _emit(args, lines, report)
    return EXIT_OK


def cmd_classify(args) -> int:
    doc = _load(args.doc)
    inst = _resolve(doc, args.instrument, ("instruments", "measurements"))
    try:
        rep = classify(inst, trials=args.trials, seed=args.seed)
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    evidence = []
    lines = [f"instrument: {args.instrument}",
             f"irreducible: {fmt(rep.irreducible)}",
             f"efficient: {fmt(rep.efficient)}"]
    for ev in rep.operations:
        item = {"label": ev.label, "kind": ev.kind, "kraus_count": ev.kraus_count,
                "reduced_count": ev.reduced_count,
                "common_range": ([[float(z.real), float(z.imag)] for z in ev.psi]
                                 if ev.psi is not None else None)}
        evidence.append(item)
        line = f"  outcome {ev.label}: {ev.kind}, Kraus {ev.kraus_count} -> {ev.reduced_count}"
        if ev.psi is not None:
            line += " psi=[" + ", ".join(_fmt_complex(z) for z in ev.psi) + "]"
        lines.append(line)
    lines.append(f"Monte Carlo worst posteriori purity: {fmt(rep.monte_carlo_purity)} over {rep.trials} pure inputs")
    witness = encode_matrix(rep.mixed_witness) if rep.mixed_witness is not None else None
    if witness is not None:
        lines.append("mixed-posteriori witness: found (see machine block)")
    report = {"instrument": args.instrument, "irreducible": rep.irreducible, "efficient": rep.efficient,
              "operations": evidence, "monte_carlo_purity": rep.monte_carlo_purity,
              "trials": rep.trials, "mixed_witness": witness}
    _emit(args, lines, report)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        names = suite_names(args.suite)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.fixture is not None and names != ("nonnegativity",):
        raise UsageError("--fixture applies to the nonnegativity suite only")
    try:
        model = RandomModel(seed=args.seed, dims=args.dims, outcomes=args.outcomes,
                            trials=args.trials, ensemble=args.ensemble)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.fixture is not None:
        try:
            bundled_document().resolve(args.fixture, ("instruments", "measurements"))
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    reports = run_suite(args.suite, model, args.tolerance_scale, args.fixture)
    passed = all(r.passed for r in reports)
    model_info = {"seed": model.seed, "dims": list(model.dims), "outcomes": list(model.outcomes),
                  "trials": model.trials, "ensemble": model.ensemble}
    full = {"suite": args.suite, "model": model_info, "tolerance_scale": args.tolerance_scale,
            "fixture": args.fixture, "pass": passed, "reports": [r.to_dict() for r in reports]}
    summary = {"suite": args.suite, "model": model_info, "pass": passed,
               "properties": [{"name": r.name, "pass": r.passed, "max_violation": r.max_violation,
                               "tolerance": r.tolerance, "trials": r.trials} for r in reports]}
    lines = [f"suite {args.suite}: seed {model.seed}, trials {model.trials}, dims {model.dims[0]}..{model.dims[1]}"]
    for r in reports:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: trials={r.trials} "
                     f"max_violation={fmt(r.max_violation)} tolerance={fmt(r.tolerance)}")
    if args.fixture is not None:
        lines.append(f"fixture {args.fixture}: min ER = {fmt(reports[0].details.get('min_er'))}")
    lines.append(f"{sum(r.passed for r in reports)}/{len(reports)} properties passed")
    _emit(args, lines, summary, full)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_fixtures(args) -> int:
    if args.output:
        write_bundled(args.output)
        print(f"wrote {args.output}")
        return EXIT_OK
    doc = bundled_document()
    for kind in ("states", "measurements", "instruments", "channels"):
        for name, obj in getattr(doc, kind).items():
            dim = obj.shape[0] if kind == "states" else obj.d_in
            print(f"{kind[:-1]} {name} (d={dim}, residual {fmt(doc.residuals[f'{kind}.{name}'])})")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmeter", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qmeter {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--format", choices=("text", "machine"), default="text")
        if output:
            sp.add_argument("--output", metavar="PATH", help="also write the report to PATH")

    c = sub.add_parser("compute", help="entropy reduction and mutual information of a state and measurement")
    c.add_argument("doc", help=f"document path, or '{BUNDLED}' for the shipped fixtures")
    c.add_argument("--state", required=True)
    c.add_argument("--measurement", required=True, help="measurement or instrument name")
    c.add_argument("--general", action="store_true",
                   help="allow non-efficient instruments and report the general bound")
    common(c)

    k = sub.add_parser("classify", help="efficiency and irreducibility of an instrument")
    k.add_argument("doc")
    k.add_argument("--instrument", required=True)
    k.add_argument("--trials", type=int, default=64, help="random pure inputs for the purity check")
    k.add_argument("--seed", type=int, default=None)
    common(k)

    v = sub.add_parser("verify", help="run randomized property suites")
    v.add_argument("suite", help=f"one of {sorted(SUITES)} or a group {sorted(GROUPS)}")
    v.add_argument("--seed", type=int, default=None, help="master seed (default: $QMETER_SEED or 7)")
    v.add_argument("--trials", type=int, default=200)
    v.add_argument("--dims", type=_range, default=(2, 6), help="dimension range LO:HI")
    v.add_argument("--outcomes", type=_range, default=(1, 6), help="outcome-count range LO:HI")
    v.add_argument("--ensemble", choices=ENSEMBLES, default="ginibre-mixed")
    v.add_argument("--tolerance-scale", type=float, default=1.0)
    v.add_argument("--fixture", help="bundled instrument for the nonnegativity sensitivity check")
    common(v)

    f = sub.add_parser("fixtures", help="list the bundled fixtures or write them to --output")
    f.add_argument("--output", metavar="PATH")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"compute": cmd_compute, "classify": cmd_classify, "verify": cmd_verify,
                "fixtures": cmd_fixtures}
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _seed_default()
        if getattr(args, "trials", 1) < 1 or getattr(args, "tolerance_scale", 1.0) <= 0:
            raise UsageError("--trials and --tolerance-scale must be positive")
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ClassificationError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
