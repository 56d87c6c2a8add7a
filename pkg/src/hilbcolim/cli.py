"""Command-line front end.

Every subcommand prints a JSON report (or writes it to ``--out``) and exits
with status 0 when the overall verdict is ``pass``, 1 when a check fails and
2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .chain import validate_chain
from .colimit import (
    DEFAULT_PARAMS,
    IndeterminateError,
    MonotonicityError,
    colim_inner,
    colim_norm,
    dichotomy_report,
    inclusion,
    induced_apply,
    is_zero_class,
    push,
    validate_cocone,
)
from .counterexamples import counterexample
from .fileformat import ChainFileError, chain_to_record, dumps, load_chain_file, parse_vector
from .linalg import DEFAULT_TOL, NotAContractionError, OperatorKind, lemma_residuals, random_contraction, random_contractions
from .normalisation import RFunction, check_eta_squares, normalize_chain
from .tensor import check_isometry, check_naturality, check_norms, tensor_chain


def _num(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (float, np.floating)):
        return "inf" if math.isinf(v) else float(v)
    return v


def check(name, value, passed, error=None, status=None):
    return {
        "name": name,
        "value": _num(value),
        "error": None if error is None else float(error),
        "status": status,
        "pass": bool(passed),
    }


def make_report(command, params, checks, seed=None, **extra):
    rep = {
        "command": command,
        "params": params,
        "seed": seed,
        "checks": checks,
        "verdict": "pass" if all(c["pass"] for c in checks) else "fail",
    }
    rep.update(extra)
    return rep


def _limit_params(depth=None, tol=None, window=None):
    p = DEFAULT_PARAMS
    if depth is not None:
        p = replace(p, depth=depth)
    if tol is not None:
        p = replace(p, tol=tol)
    if window is not None:
        p = replace(p, window=window)
    return p


def cmd_verify_lemma(samples, max_dim, seed, tol=DEFAULT_TOL):
    """Lemma inequality on ``samples`` random contractions with dims up to ``max_dim``."""
    if samples < 1 or max_dim < 1:
        raise ValueError("samples and max_dim must be positive")
    rng = np.random.default_rng(seed)
    dims = rng.integers(1, max_dim + 1, size=(samples, 2))
    worst = -math.inf
    held = 0
    for m, n in sorted({(int(a), int(b)) for a, b in dims}):
        count = int(np.sum((dims[:, 0] == m) & (dims[:, 1] == n)))
        sub = np.random.default_rng([seed, m, n])
        G = random_contractions(m, n, count, sub)
        X = (sub.standard_normal((count, n)) + 1j * sub.standard_normal((count, n)))
        Y = (sub.standard_normal((count, n)) + 1j * sub.standard_normal((count, n)))
        lhs, rhs = lemma_residuals(G, X, Y)
        res = lhs - rhs
        worst = max(worst, float(np.max(res)))
        held += int(np.sum(res <= tol))
    eq = np.random.default_rng([seed, 0])
    eq_worst = 0.0
    for d in range(1, max_dim + 1):
        x = eq.standard_normal(d) + 1j * eq.standard_normal(d)
        y = eq.standard_normal(d) + 1j * eq.standard_normal(d)
        c = complex(eq.standard_normal(), eq.standard_normal())
        for G, u, v in ((np.eye(d), x, y), (np.zeros((d, d)), x, c * x)):
            lhs, rhs = lemma_residuals(G[None].astype(complex), u[None], v[None])
            eq_worst = max(eq_worst, abs(float(lhs[0] - rhs[0])) / max(1.0, float(rhs[0])))
    checks = [
        check("all_hold", held, held == samples),
        check("worst_residual", worst, worst <= tol),
        check("equality_cases", eq_worst, eq_worst <= tol),
    ]
    return make_report(
        "verify-lemma",
        {"samples": samples, "max_dim": max_dim, "tol": tol},
        checks,
        seed=seed,
    )


def parse_class_spec(spec, chain):
    """``"INDEX:[v0, v1, ...]"`` with entries numbers or ``[re, im]`` pairs."""
    try:
        idx, vec = spec.split(":", 1)
        return inclusion(chain, int(idx), parse_vector(json.loads(vec)))
    except (ValueError, json.JSONDecodeError) as exc:
        raise ChainFileError(f"bad class spec {spec!r}: {exc}") from None


def cmd_colimit(path, class_specs, depth=None, tol=None, window=None):
    chain, _ = load_chain_file(path)
    params = _limit_params(depth, tol, window)
    classes = [parse_class_spec(s, chain) for s in class_specs]
    checks = []
    for i, c in enumerate(classes):
        est = colim_norm(chain, c, params)
        checks.append(check(f"norm[{i}]", est.value, True, est.error, est.status.value))
        try:
            zero = is_zero_class(chain, c, params)
            checks.append(check(f"is_zero[{i}]", zero, True))
        except IndeterminateError:
            checks.append(check(f"is_zero[{i}]", "indeterminate", False))
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            est = colim_inner(chain, classes[i], classes[j], params)
            checks.append(check(f"inner[{i},{j}]", est.value, True, est.error, est.status.value))
    return make_report(
        "colimit",
        {"file": str(path), "classes": list(class_specs), "depth": params.depth, "tol": params.tol, "window": params.window},
        checks,
    )


def cmd_tensor_check(path, h_dim, samples, seed):
    chain, _ = load_chain_file(path)
    tc = tensor_chain(h_dim, chain)
    iso = check_isometry(tc, samples, rng=np.random.default_rng([seed, 1]))
    norms = check_norms(tc, samples, rng=np.random.default_rng([seed, 2]))
    f = random_contraction(h_dim, h_dim, [seed, 3])
    nat = check_naturality(f, chain, samples, rng=np.random.default_rng([seed, 4]))
    checks = [
        check("isometry", iso.worst_residual, iso.ok),
        check("norms", norms.worst_residual, norms.ok),
        check("naturality", nat.worst_residual, nat.ok),
    ]
    return make_report(
        "tensor-check", {"file": str(path), "h_dim": h_dim, "samples": samples}, checks, seed=seed
    )


def cmd_normalize(path, r_variant, depth):
    chain, _ = load_chain_file(path)
    nc = normalize_chain(chain, RFunction(r_variant))
    squares = check_eta_squares(nc, depth)
    valid = validate_chain(nc.chain)
    checks = [
        check("normalized_is_contraction", valid.max_norm, valid.ok),
        check("eta_squares", squares.worst, squares.ok),
    ]
    eta = [{"n": n, "log2": nc.log2_eta(n), "value": nc.eta(n)} for n in range(depth)]
    return make_report(
        "normalize",
        {"file": str(path), "r": RFunction(r_variant).value, "depth": depth},
        checks,
        chain=chain_to_record(nc.chain),
        eta=eta,
    )


def cmd_counterexample(which, depth):
    rep = counterexample(which, depth)
    checks = [check(c["name"], c["value"], c["pass"]) for c in rep.checks]
    return make_report("counterexample", {"which": which, "depth": depth}, checks)


def cmd_universal_map(path, depth, tol=None):
    chain, cocone = load_chain_file(path)
    if cocone is None:
        raise ChainFileError("universal-map needs a 'cocone' section")
    params = _limit_params(tol=tol)
    rep = validate_cocone(cocone, depth, params.tol)
    checks = [check("cocone_condition", rep.worst_residual, rep.ok)]
    if rep.ok:
        wd_worst, excess = 0.0, -math.inf
        contractive = chain.category is not OperatorKind.BOUNDED and cocone.category is OperatorKind.CONTRACTION
        for n in range(depth):
            for k in range(chain.stage_dim(n)):
                e = np.zeros(chain.stage_dim(n), dtype=complex)
                e[k] = 1.0
                c = inclusion(chain, n, e)
                out = induced_apply(cocone, c, validate_depth=depth + 1)
                later = induced_apply(cocone, push(chain, c, n + 1), validate_depth=depth + 1)
                wd_worst = max(wd_worst, float(np.linalg.norm(out - later)))
                if contractive:
                    est = colim_norm(chain, c, params)
                    excess = max(excess, float(np.linalg.norm(out)) - est.value - est.error)
        checks.append(check("well_defined", wd_worst, wd_worst <= params.tol * max(1.0, rep.max_norm)))
        if contractive:
            checks.append(check("induced_contraction_excess", max(excess, 0.0), excess <= 1e-9))
    extra = {}
    if rep.ok and chain.category is not OperatorKind.BOUNDED:
        extra["dichotomy"] = dichotomy_report(cocone, depth, params).to_record()
    return make_report("universal-map", {"file": str(path), "depth": depth, "tol": params.tol}, checks, **extra)


def build_parser():
    parser = argparse.ArgumentParser(prog="hilbcolim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False, samples=None):
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if samples is not None:
            p.add_argument("--samples", type=int, default=samples)

    p = sub.add_parser("verify-lemma", help="check the contraction inner-product inequality on random samples")
    common(p, seed=True, samples=100_000)
    p.add_argument("--max-dim", type=int, default=16)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("colimit", help="limit norms and inner products of classes")
    common(p)
    p.add_argument("file", type=Path)
    p.add_argument("--class", dest="classes", action="append", default=[], metavar="INDEX:VECTOR")
    p.add_argument("--depth", type=int, default=DEFAULT_PARAMS.depth)
    p.add_argument("--tol", type=float, default=DEFAULT_PARAMS.tol)
    p.add_argument("--window", type=int, default=DEFAULT_PARAMS.window)

    p = sub.add_parser("tensor-check", help="compare colimits after tensoring with C^h")
    common(p, seed=True, samples=100)
    p.add_argument("file", type=Path)
    p.add_argument("--h-dim", type=int, default=2)

    p = sub.add_parser("normalize", help="normalise a chain of bounded maps")
    common(p)
    p.add_argument("file", type=Path)
    p.add_argument("--r", dest="r_variant", choices=[v.value for v in RFunction], default=RFunction.UNIT_AT_ZERO.value)
    p.add_argument("--depth", type=int, default=16)

    p = sub.add_parser("counterexample", help="bounded cocones with unbounded induced maps")
    common(p)
    p.add_argument("which", choices=["scaling", "embedding"])
    p.add_argument("--depth", type=int, default=20)

    p = sub.add_parser("universal-map", help="cocone condition, induced map and boundedness dichotomy")
    common(p)
    p.add_argument("file", type=Path)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    return parser


def run(args):
    if args.command == "verify-lemma":
        return cmd_verify_lemma(args.samples, args.max_dim, args.seed, args.tol)
    if args.command == "colimit":
        return cmd_colimit(args.file, args.classes, args.depth, args.tol, args.window)
    if args.command == "tensor-check":
        return cmd_tensor_check(args.file, args.h_dim, args.samples, args.seed)
    if args.command == "normalize":
        return cmd_normalize(args.file, args.r_variant, args.depth)
    if args.command == "counterexample":
        return cmd_counterexample(args.which, args.depth)
    return cmd_universal_map(args.file, args.depth, args.tol)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except (ChainFileError, NotAContractionError, MonotonicityError, OSError, ValueError) as exc:
        print(f"hilbcolim {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report["verdict"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
