"""Command-line front end.

Subcommands mirror the library surface: zk, local, downset, pseudo,
restrict, vq, jcount, transfer, experiment, report. Global flags
--out/--format/--threads/--seed apply where meaningful; --config
points at a key=value file whose entries act as flag defaults (flags
given on the command line win).

Exit codes: 0 all checks hold, 1 some check failed, 2 bad usage or
configuration (including unreachable precision), 3 internal assertion
or library error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, fields

from . import __version__
from .acceptance import ALL_CRITERIA, run_all
from .circle import (
    all_kth_powers,
    build_f_b,
    build_nu_b,
    decompose_arcs,
    dft_grid,
    pseudorandomness_eta,
    restriction_constant,
    V_q,
    vinogradov_count,
    WeightedSequence,
)
from .downsets import downset_transform, is_downset
from .errors import (
    CapacityError,
    PrecisionError,
    PreconditionError,
    WaringlabError,
)
from .harness import ExperimentConfig, coverage_experiment, emit_report
from .residues import ResidueSet, build_k_context, build_w_context, factorize
from .sumsets import sumset
from .transference import transference_demo
from .waring import minimal_waring_s, waring_pair_exhaustive
from .zk import REFERENCE_VALUES, zk_estimate

import numpy as np


def _coerce_token(val: str):
    for conv in (int, float):
        try:
            return conv(val)
        except ValueError:
            continue
    if val.lower() in ("true", "false"):
        return val.lower() == "true"
    return val


def _read_kv_file(path: str) -> dict:
    pairs = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise PreconditionError(f"{path}: expected key=value, got {line!r}")
                key, val = line.split("=", 1)
                pairs[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise PreconditionError(f"cannot read config {path}: {exc}") from exc
    return pairs


def _read_set_file(path: str) -> set[int]:
    """One decimal residue per line; blanks and # comments ignored."""
    out = set()
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    out.add(int(line, 10))
                except ValueError:
                    raise PreconditionError(
                        f"{path}:{lineno}: not a decimal residue: {line!r}"
                    ) from None
    except OSError as exc:
        raise PreconditionError(f"cannot read set file {path}: {exc}") from exc
    if not out:
        raise PreconditionError(f"{path}: empty residue set")
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise PreconditionError(f"cannot write {out}: {exc}") from exc


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(["key", "value"])
    for key in sorted(payload):
        val = payload[key]
        writer.writerow([key, val if isinstance(val, (int, float, str)) else json.dumps(val)])
    return buf.getvalue()


def _residue_bits(members: set[int], q: int) -> int:
    bits = 0
    for a in members:
        if not (0 <= a < q):
            raise PreconditionError(f"residue {a} outside [0, {q})")
        bits |= 1 << a
    return bits


def cmd_zk(args) -> tuple[dict, bool]:
    est = zk_estimate(args.k, args.precision)
    ref = REFERENCE_VALUES.get(args.k)
    agrees = None if ref is None else bool(est.lower - 0.01 <= ref <= est.upper + 0.01)
    payload = {
        "k": args.k,
        "lower": est.lower,
        "upper": est.upper,
        "truncation_prime": est.truncation_prime,
        "reference_value": ref,
        "agrees": agrees,
    }
    return payload, agrees is False


def cmd_local(args) -> tuple[dict, bool]:
    q = factorize(args.q)
    ctx = build_k_context(args.k)
    if args.action == "check":
        if args.s is None:
            raise PreconditionError("local check needs --s")
        rep = waring_pair_exhaustive(q, args.s, ctx, threads=args.threads, shuffle_seed=args.seed)
        payload = {
            "q": args.q,
            "s": args.s,
            "k": args.k,
            "holds": rep.holds,
            "counterexample": None
            if rep.counterexample is None
            else [list(rep.counterexample[0]), rep.counterexample[1]],
            "sets_checked": rep.sets_checked,
        }
        return payload, not rep.holds
    s_min, rep, prev = minimal_waring_s(q, ctx, s_max=args.s_max)
    payload = {
        "q": args.q,
        "k": args.k,
        "s_min": s_min,
        "sets_checked": rep.sets_checked,
        "failing_witness_below": None
        if prev is None
        else [list(prev.counterexample[0]), prev.counterexample[1]],
    }
    return payload, False


def cmd_downset(args) -> tuple[dict, bool]:
    q = factorize(args.q)
    blocks = [ResidueSet(q, _residue_bits(_read_set_file(p), args.q)) for p in args.sets]
    if len(blocks) < 2:
        raise PreconditionError("downset demo needs at least two set files")
    out = downset_transform(blocks)
    before = blocks[0]
    after = out[0]
    for b_blk, a_blk in zip(blocks[1:], out[1:]):
        before = sumset(before, b_blk)
        after = sumset(after, a_blk)
    ok = all(is_downset(blk) for blk in out) and all(
        len(a) == len(b) for a, b in zip(blocks, out)
    )
    payload = {
        "q": args.q,
        "before": [blk.members() for blk in blocks],
        "after": [blk.members() for blk in out],
        "sumset_size_before": len(before),
        "sumset_size_after": len(after),
        "compressed_are_downsets": ok,
    }
    return payload, not (ok and len(after) <= len(before))


def cmd_pseudo(args) -> tuple[dict, bool]:
    ctx = build_w_context(args.k, args.w)
    M = args.grid_m or 4 * args.n
    eta = pseudorandomness_eta(ctx, args.b, args.n, M)
    nu = dft_grid(build_nu_b(args.n, ctx, args.b), M)
    ind = dft_grid(WeightedSequence.indicator(args.n), M)
    j_star = int(np.argmax(np.abs(nu.values - ind.values)))
    alpha = j_star / M
    arcs = decompose_arcs(args.n, args.rho)
    payload = {
        "eta": eta,
        "argmax_frequency": alpha,
        "arc_class": "major" if arcs.classify(alpha) is not None else "minor",
    }
    return payload, False


def cmd_restrict(args) -> tuple[dict, bool]:
    ctx = build_w_context(args.k, args.w)
    M = args.grid_m or 4 * args.n
    A = all_kth_powers(M + 1, args.k)
    f = build_f_b(A, args.n, ctx, args.b)
    payload = {"K_hat": restriction_constant(f, args.q_exp, M)}
    return payload, False


def cmd_vq(args) -> tuple[dict, bool]:
    ctx = build_w_context(args.k, args.w)
    rows = []
    for q in range(1, args.q_max + 1):
        a_values = [0] if q == 1 else [a for a in range(1, q) if math.gcd(a, q) == 1]
        for a in a_values:
            rows.append((q, a, abs(V_q(a, args.b, q, ctx))))
    payload = {"rows": [[q, a, v] for q, a, v in rows]}
    return payload, False


def cmd_jcount(args) -> tuple[dict, bool]:
    count = vinogradov_count(args.t, args.k, args.x)
    return {"t": args.t, "k": args.k, "X": args.x, "count": count}, False


def cmd_transfer(args) -> tuple[dict, bool]:
    ctx = build_w_context(args.k, args.w)
    M = args.grid_m or 4 * args.n
    A = all_kth_powers(M + 1, args.k)
    f = build_f_b(A, args.n, ctx, args.b)
    report = transference_demo([f] * args.s, args.eps, args.delta, M)
    payload = {
        "eta": max(report.etas),
        "K_hat": report.K_hat,
        "means": list(report.means),
        "bohr_size": report.bohr_sizes[0],
        "window": list(report.window),
        "min_convolution": report.min_convolution,
        "holds": report.holds,
    }
    return payload, not report.holds


def cmd_experiment(args) -> tuple[str, bool]:
    base = asdict(ExperimentConfig())
    if args.config:
        for key, val in _read_kv_file(args.config).items():
            if key not in base:
                raise PreconditionError(f"unknown config key {key!r}")
            base[key] = _coerce_token(val)
    for token in args.overrides:
        if "=" not in token:
            raise PreconditionError(f"override must be key=value, got {token!r}")
        key, val = token.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in base:
            raise PreconditionError(f"unknown config key {key!r}")
        base[key] = _coerce_token(val.strip())
    if args.seed is not None:
        base["seed"] = args.seed
    bool_fields = {f.name for f in fields(ExperimentConfig) if isinstance(f.default, bool)}
    for name in bool_fields:
        if isinstance(base[name], str):
            base[name] = base[name].lower() == "true"
    config = ExperimentConfig(**base)
    report = coverage_experiment(config)
    fmt = args.format or config.output_format
    text = emit_report(report, fmt, None)
    return text, not report.all_hold


def cmd_report(args) -> tuple[str, bool]:
    numbers = None
    if args.only:
        try:
            numbers = sorted({int(tok) for tok in args.only.split(",")})
        except ValueError:
            raise PreconditionError(f"--only wants comma-separated integers, got {args.only!r}")
        unknown = [n for n in numbers if n not in ALL_CRITERIA]
        if unknown:
            raise PreconditionError(f"no such criterion: {unknown}")
    results = run_all(numbers, echo=args.out is None)
    payload = [
        {
            "number": r.number,
            "name": r.name,
            "passed": r.passed,
            "details": r.details,
            "elapsed": r.elapsed,
            "within_budget": r.within_budget,
        }
        for r in results
    ]
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return text, not all(r.passed for r in results)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waringlab",
        description="Desk-scale local and Fourier machinery for sums of k-th powers.",
    )
    parser.add_argument("--version", action="version", version=f"waringlab {__version__}")
    parser.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", metavar="FILE", help="key=value defaults for flags")
    sub = parser.add_subparsers(dest="command", required=True)
    # kept for config-file defaults: subparsers re-apply their own
    # defaults over anything set_defaults put on the namespace
    parser.sub_parsers = sub

    p = sub.add_parser("zk", help="enclosure for the singular constant")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--precision", type=float, default=1e-3)
    p.set_defaults(fn=cmd_zk)

    p = sub.add_parser("local", help="majority-subset congruence checks")
    p.add_argument("action", choices=("check", "minimal-s"))
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--s-max", type=int, default=64)
    p.set_defaults(fn=cmd_local)

    p = sub.add_parser("downset", help="compression demo on residue blocks")
    p.add_argument("action", choices=("demo",))
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--sets", nargs="+", required=True, metavar="FILE",
                   help="one decimal residue per line, one file per block")
    p.set_defaults(fn=cmd_downset)

    p = sub.add_parser("pseudo", help="majorant pseudorandomness on a grid")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid-m", type=int, default=None)
    p.add_argument("--rho", type=float, default=0.25)
    p.set_defaults(fn=cmd_pseudo)

    p = sub.add_parser("restrict", help="moment constant of the weighted transform")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q-exp", type=float, default=6.5)
    p.add_argument("--grid-m", type=int, default=None)
    p.set_defaults(fn=cmd_restrict)

    p = sub.add_parser("vq", help="table of local sum magnitudes")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--q-max", type=int, default=6)
    p.set_defaults(fn=cmd_vq)

    p = sub.add_parser("jcount", help="diagonal solution count")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.set_defaults(fn=cmd_jcount)

    p = sub.add_parser("transfer", help="dense-model pipeline end to end")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--s", type=int, default=8)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--grid-m", type=int, default=None)
    p.set_defaults(fn=cmd_transfer)

    p = sub.add_parser("experiment", help="seeded coverage experiment")
    p.add_argument("overrides", nargs="*", metavar="key=value")
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("report", help="run the acceptance criteria")
    p.add_argument("--only", metavar="N,N,...", default=None)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    # pre-scan for --config so file values become flag defaults
    config_path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    if config_path is not None and "experiment" not in argv:
        try:
            pairs = {k: _coerce_token(v) for k, v in _read_kv_file(config_path).items()}
        except PreconditionError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        parser.set_defaults(**pairs)
        for sp in parser.sub_parsers.choices.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in pairs.items() if k in known})
    try:
        args = parser.parse_args(argv)
        payload, failed = args.fn(args)
        if args.command == "vq" and (args.format or "csv") == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\r\n")
            writer.writerow(["q", "a", "abs_vq"])
            for row in payload["rows"]:
                writer.writerow(row)
            text = buf.getvalue()
        elif args.command == "jcount" and args.format is None:
            text = f"{payload['count']}\n"
        elif isinstance(payload, str):
            text = payload
        else:
            text = _render(payload, args.format or "json")
        _emit(text, args.out)
        return 1 if failed else 0
    except (PreconditionError, CapacityError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (WaringlabError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
