"""Batch command line: gen, build, query, verify, bench, count.

Exit status is 0 on success, 1 when verification finds mismatches and 2 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import hardness
from .codec import CodecError, deserialize, serialize
from .core import Array2D, Policy, RmqError, emit_answers, emit_array, parse_array, parse_queries
from .encodings import ENCODINGS, answer, policy_of, qclass_of, shape_of
from .oracle import DEFAULT_MAX_CELLS, distinct_tables, oracle_rmq
from .spacemeter import emit_report, measure
from .suite import CheckResult, check_exhaustive, check_random, random_array, random_rect
from .treecount import count_trees

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    def __init__(self, flag: str, msg: str):
        super().__init__(f"{flag}: {msg}")


def _read(path: str, flag: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(flag, f"cannot read {path}: {e.strerror}") from None


def _load_array(path: str, flag: str = "--in") -> Array2D:
    try:
        return parse_array(_read(path, flag))
    except RmqError as e:
        raise UsageError(flag, str(e)) from None


def _load_encoding(path: str, flag: str = "--enc-file"):
    try:
        return deserialize(Path(path).read_bytes())
    except OSError as e:
        raise UsageError(flag, f"cannot read {path}: {e.strerror}") from None
    except (CodecError, ValueError) as e:
        raise UsageError(flag, str(e)) from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _policy(args, info) -> Policy:
    try:
        pol = info.native if args.policy is None else Policy.parse(args.policy)
    except RmqError as e:
        raise UsageError("--policy", str(e)) from None
    if pol not in info.policies:
        names = ", ".join(p.value for p in info.policies)
        raise UsageError("--policy", f"{info.name} supports {names}")
    return pol


def _encoding(name: str):
    if name not in ENCODINGS:
        raise UsageError("--enc", f"unknown encoding {name!r}; choose from {', '.join(ENCODINGS)}")
    return ENCODINGS[name]


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args) -> int:
    comments = [f"kind={args.kind} m={args.m} n={args.n} sigma={args.sigma} seed={args.seed}"]
    if args.kind == "random":
        a = random_array(random.Random(args.seed), args.m, args.n, args.sigma)
    else:
        try:
            kind = hardness.Kind.parse(args.kind)
        except ValueError:
            raise UsageError("--kind", f"unknown kind {args.kind!r}") from None
        choice = None
        if args.choice:
            try:
                choice = _as_tuple(json.loads(args.choice))
            except json.JSONDecodeError as e:
                raise UsageError("--choice", f"not JSON: {e}") from None
            comments.append(f"choice={args.choice}")
        opts = tuple(tuple(o.split("=", 1)) for o in args.option)
        params = hardness.FamilyParams(kind, args.m, args.n, args.sigma, choice, args.seed, opts)
        try:
            a = hardness.gen_family(params)
        except hardness.InfeasibleParams as e:
            raise UsageError("--kind", f"infeasible parameters: {e}") from None
        except (ValueError, TypeError) as e:
            raise UsageError("--choice", str(e)) from None
        if isinstance(a, hardness.WideArray):
            comments.append(f"signed values shifted by {-int(a.cells.min())} into a non-negative alphabet")
            a = a.to_alphabet()
    _write(args.out, emit_array(a, comments))
    return EXIT_OK


def _as_tuple(x):
    return tuple(_as_tuple(v) for v in x) if isinstance(x, list) else x


def cmd_build(args) -> int:
    info = _encoding(args.enc)
    a = _load_array(args.inp)
    if args.transpose:
        a = a.transpose()
    pol = _policy(args, info)
    try:
        s = info.build(a, pol)
    except RmqError as e:
        raise UsageError("--enc", str(e)) from None
    data, _ = serialize(s)
    Path(args.out).write_bytes(data)
    if args.report:
        _write(args.report, emit_report(measure(s)))
    return EXIT_OK


def cmd_query(args) -> int:
    s = _load_encoding(args.enc_file)
    m, n = shape_of(s)
    qc = qclass_of(s)
    try:
        rects = [r.check(m, n) for r in parse_queries(_read(args.queries, "--queries"), qc, m)]
    except RmqError as e:
        raise UsageError("--queries", str(e)) from None
    if args.oracle:
        if not args.inp:
            raise UsageError("--oracle", "needs --in with the source array")
        a = _load_array(args.inp)
        if args.transpose:
            a = a.transpose()
        if a.shape != (m, n):
            raise UsageError("--in", f"array is {a.m}x{a.n}, encoding is {m}x{n}")
        answers = [oracle_rmq(a, r, policy_of(s)) for r in rects]
    else:
        answers = [answer(s, r) for r in rects]
    _write(args.out, emit_answers(answers))
    return EXIT_OK


def _verify_shape(job) -> CheckResult:
    name, pol, m, n, sigma, roundtrip = job
    return check_exhaustive(ENCODINGS[name], Policy(pol), m, n, sigma, roundtrip)


def _verify_random(job) -> CheckResult:
    name, pol, seed, m, n, sigma, queries, roundtrip = job
    info = ENCODINGS[name]
    rng = random.Random(seed)
    a = random_array(rng, m, n, sigma)
    if not info.applicable(a):
        return CheckResult(name, pol)
    return check_random(info, Policy(pol), a, queries, rng, roundtrip)


def _run_jobs(fn, jobs: list, nproc: int) -> list:
    if nproc <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(nproc) as ex:
        return list(ex.map(fn, jobs))  # map keeps input order, so aggregation is deterministic


def cmd_verify(args) -> int:
    names = list(ENCODINGS) if args.enc == "all" else [args.enc]
    total_bad = 0
    for name in names:
        info = _encoding(name)
        if args.policy is None:
            policies = info.policies
        elif args.enc == "all":
            policies = tuple(p for p in info.policies if p.value == args.policy)
        else:
            policies = (_policy(args, info),)
        for pol in policies:
            if args.exhaustive:
                rows = range(1, args.max_m + 1) if not info.one_dim else [1]
                jobs = [
                    (name, pol.value, m, n, s, args.roundtrip)
                    for m in rows
                    for n in range(1, args.max_n + 1)
                    for s in range(1, args.max_sigma + 1)
                    if s ** (m * n) <= args.max_arrays
                ]
                results = _run_jobs(_verify_shape, jobs, args.jobs)
            else:
                rng = random.Random(args.seed)
                jobs = []
                for _ in range(args.arrays):
                    m = 1 if info.one_dim else rng.randint(1, args.m)
                    n = rng.randint(1, args.n)
                    s = rng.randint(1, args.sigma)
                    if info.max_sigma is not None:
                        s = min(s, info.max_sigma)
                    jobs.append((name, pol.value, rng.getrandbits(32), m, n, s, args.queries, args.roundtrip))
                results = _run_jobs(_verify_random, jobs, args.jobs)
            agg = CheckResult(name, pol.value)
            for r in results:
                agg.merge(r)
            print(agg.summary())
            for a, rect, got, want in agg.examples:
                print(f"  mismatch: array={a} query={rect} got={got} want={want}", file=sys.stderr)
            total_bad += agg.mismatches
    return EXIT_MISMATCH if total_bad else EXIT_OK


def cmd_bench(args) -> int:
    names = list(ENCODINGS) if args.enc == "all" else args.enc.split(",")
    rng = random.Random(args.seed)
    rows, reports = [], []
    for name in names:
        info = _encoding(name)
        m = 1 if info.one_dim else args.m
        sigma = min(args.sigma, info.max_sigma or args.sigma)
        g = np.random.default_rng(args.seed).integers(0, sigma, size=(m, args.n))
        a = Array2D(g, sigma)
        t0 = time.perf_counter()
        s = info.build(a, info.native)
        build_s = time.perf_counter() - t0
        lat = []
        for _ in range(args.queries):
            rect = random_rect(rng, info.qclass, a.m, a.n)
            t0 = time.perf_counter()
            answer(s, rect)
            lat.append(time.perf_counter() - t0)
        rep = measure(s)
        row = {
            "encoding": name,
            "m": a.m,
            "n": a.n,
            "sigma": sigma,
            "total_bits": rep.total_bits,
            "bits_per_element": round(rep.bits_per_element, 4),
            "build_s": round(build_s, 4),
            "median_query_us": round(statistics.median(lat) * 1e6, 2),
        }
        rows.append(row)
        reports.append(rep.to_dict())
    cols = list(rows[0])
    widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in rows:
        print("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)))
    if args.report:
        _write(args.report, json.dumps({"rows": rows, "reports": reports}, indent=2) + "\n")
    return EXIT_OK


def cmd_count(args) -> int:
    if args.trees:
        _need(args, "n", "k")
        print(count_trees(args.n, args.k))
    elif args.cartesian:
        _need(args, "n", "sigma")
        try:
            print(hardness.count_distinct_cartesian(args.n, args.sigma))
        except RmqError as e:
            raise UsageError("--sigma", str(e)) from None
    elif args.family:
        _need(args, "m", "n")
        if args.sigma is None:
            args.sigma = 2
        try:
            kind = hardness.Kind.parse(args.family)
        except ValueError:
            raise UsageError("--family", f"unknown kind {args.family!r}") from None
        p = hardness.FamilyParams(kind, args.m, args.n, args.sigma, seed=args.seed)
        try:
            members = hardness.sample_family(p, args.sample, args.seed) if args.sample else list(hardness.enumerate_family(p))
        except hardness.InfeasibleParams as e:
            raise UsageError("--family", f"infeasible parameters: {e}") from None
        qc = hardness.QUERY_CLASS[kind]
        pol = hardness.FAMILY_POLICY[kind]
        try:
            distinct = distinct_tables((hardness.gen_family(x) for x in members), qc, pol, args.max_cells)
        except RmqError as e:
            raise UsageError("--max-cells", str(e)) from None
        print(f"family={kind.value} members={len(members)} distinct_tables={distinct}")
    else:
        raise UsageError("count", "choose one of --trees, --cartesian, --family")
    return EXIT_OK


def _need(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name}", "required here")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="brmq", description="Bounded-alphabet RMQ encodings: build, query, verify.")
    sub = p.add_subparsers(dest="verb", required=True)
    enc_names = ", ".join(ENCODINGS)

    g = sub.add_parser("gen", help="write a random or lower-bound family array")
    g.add_argument("--kind", default="random", help="random or a family kind: " + ", ".join(k.value for k in hardness.Kind))
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--choice", help="family free choice as JSON (random from --seed if omitted)")
    g.add_argument("--option", action="append", default=[], metavar="KEY=VALUE", help="family layout switch")
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    b = sub.add_parser("build", help="build an encoding and write it to a file")
    b.add_argument("--enc", required=True, help=enc_names)
    b.add_argument("--in", dest="inp", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--policy", choices=["row_major", "col_major"])
    b.add_argument("--transpose", action="store_true", help="build over the transposed array (for m > n)")
    b.add_argument("--report", help="write the space report here ('-' for stdout)")
    b.set_defaults(fn=cmd_build)

    q = sub.add_parser("query", help="answer queries from an encoding file")
    q.add_argument("--enc-file", required=True)
    q.add_argument("--queries", required=True)
    q.add_argument("--out")
    q.add_argument("--oracle", action="store_true", help="answer by brute force over --in instead")
    q.add_argument("--in", dest="inp")
    q.add_argument("--transpose", action="store_true", help="with --oracle: transpose --in as at build time")
    q.set_defaults(fn=cmd_query)

    v = sub.add_parser("verify", help="differential check against the oracle")
    v.add_argument("--enc", default="all", help="all or one of: " + enc_names)
    v.add_argument("--policy", choices=["row_major", "col_major"])
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", action="store_true")
    v.add_argument("--max-m", type=int, default=2)
    v.add_argument("--max-n", type=int, default=3)
    v.add_argument("--max-sigma", type=int, default=2)
    v.add_argument("--max-arrays", type=int, default=1 << 16, help="skip shapes with more arrays than this")
    v.add_argument("--arrays", type=int, default=50)
    v.add_argument("--queries", type=int, default=200)
    v.add_argument("--m", type=int, default=16)
    v.add_argument("--n", type=int, default=32)
    v.add_argument("--sigma", type=int, default=5)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--roundtrip", action="store_true", help="serialize and reload before querying")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(fn=cmd_verify)

    be = sub.add_parser("bench", help="space and latency table")
    be.add_argument("--enc", default="all")
    be.add_argument("--m", type=int, default=4)
    be.add_argument("--n", type=int, default=1 << 12)
    be.add_argument("--sigma", type=int, default=2)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--queries", type=int, default=500)
    be.add_argument("--report", help="write the machine report here ('-' for stdout)")
    be.set_defaults(fn=cmd_bench)

    c = sub.add_parser("count", help="exact counts: trees, Cartesian shapes, family tables")
    c.add_argument("--trees", action="store_true")
    c.add_argument("--cartesian", action="store_true")
    c.add_argument("--family")
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--sigma", type=int)
    c.add_argument("--sample", type=int, default=0, help="sample this many family members instead of enumerating")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    c.set_defaults(fn=cmd_count)
    return p


def _validate(args) -> None:
    for name in ("m", "n", "sigma", "max_m", "max_n", "max_sigma", "arrays", "queries", "jobs"):
        v = getattr(args, name, None)
        if isinstance(v, int) and v < 1:
            raise UsageError("--" + name.replace("_", "-"), "must be >= 1")
    if args.verb == "verify" and not (args.exhaustive or args.random):
        args.random = True


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _validate(args)
        return args.fn(args)
    except UsageError as e:
        print(f"brmq {args.verb}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RmqError as e:
        print(f"brmq {args.verb}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


run = main

if __name__ == "__main__":
    sys.exit(main())
