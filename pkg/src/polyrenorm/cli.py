"""Command-line front end.

Tables go to stdout (or ``--out DIR``), summaries to stderr. Exit codes:
0 pass, 1 a checked inequality failed, 2 bad engine or flags, 3 parse error,
4 size limit, 5 construction precondition.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

import mpmath
import numpy as np

from .decomp import (
    Modulus,
    gap_table,
    lambda_sequence,
    star_check,
    star_orlicz_certificate,
    star_summable_certificate,
)
from .errors import ConstructionError, EngineError, HypothesisError, ParseError, SupportTooLarge
from .norms import engine_from_name, nakano_from_id, orlicz_from_id, summing_prefix_project
from .seqvec import SparseVec, parse_vector
from .sequences import sequence_from_id
from . import witness as wit

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_SIZE, EXIT_CONSTRUCTION = range(6)
EXAMPLES = ("ex1.7", "ex2.3", "ex2.5", "ex2.5-bound", "ex2.6", "fact1.6", "prop3.6")


@dataclasses.dataclass
class RunRecord:
    command: str
    params: dict
    engine: str | None
    input_hash: str | None
    output: str
    timestamp: float
    summary: str

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


class _Usage(Exception):
    pass


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_vector(path: str) -> tuple[SparseVec, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise _Usage(f"cannot read vector file: {exc}") from None
    return parse_vector(raw.decode("utf-8")), _sha256(raw)


def _pick(args, name):
    """Positional argument or its ``--flag`` twin."""
    flag, pos = getattr(args, name, None), getattr(args, name + "_pos", None)
    if flag is not None and pos is not None and flag != pos:
        raise _Usage(f"conflicting values for {name}: {pos!r} and {flag!r}")
    value = flag if flag is not None else pos
    if value is None:
        raise _Usage(f"missing {name}")
    return value


class _Sink:
    """Writes tables to stdout or to files under ``--out``."""

    def __init__(self, args, stem: str):
        self.out = Path(args.out) if args.out else None
        self.stem = stem
        self.written: list[str] = []
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def table(self, text: str, suffix: str):
        if self.out:
            p = self.out / f"{self.stem}.{suffix}"
            p.write_text(text, encoding="utf-8")
            self.written.append(str(p))
        else:
            sys.stdout.write(text)

    def extra(self, text: str, suffix: str):
        """Side files (gnuplot data, summaries) only exist with ``--out``."""
        if self.out:
            p = self.out / f"{self.stem}.{suffix}"
            p.write_text(text, encoding="utf-8")
            self.written.append(str(p))

    def record(self, rec: RunRecord):
        if self.out:
            rec.output = ",".join(self.written) or "stdout"
            with open(self.out / "runs.jsonl", "a", encoding="utf-8") as fh:
                fh.write(rec.to_json() + "\n")


def _gnuplot(xs, ys, header: str) -> str:
    return f"# {header}\n" + "".join(f"{x} {y!r}\n" for x, y in zip(xs, ys))


def _record(args, engine, input_hash, summary) -> RunRecord:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and v is not None}
    return RunRecord(args.command, params, engine, input_hash, "stdout", time.time(), summary)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_norm(args) -> int:
    engine = engine_from_name(_pick(args, "engine"))
    x, h = _load_vector(_pick(args, "vector"))
    value = engine.eval(x)
    print(f"{value:.12g}")
    sink = _Sink(args, "norm")
    sink.record(_record(args, engine.name, h, f"{value:.12g}"))
    return EXIT_OK


def cmd_gap(args) -> int:
    engine = engine_from_name(_pick(args, "engine"))
    x, h = _load_vector(_pick(args, "vector"))
    a = sequence_from_id(args.a)
    if args.basis == "summing" and args.mode != "prefix":
        raise _Usage("--basis summing needs --mode prefix")
    projector = summing_prefix_project if args.basis == "summing" else None
    table = gap_table(engine, x, a, args.n_max, mode=args.mode, projector=projector)
    sink = _Sink(args, f"gap_{engine.name.replace(':', '_')}_{args.mode}")
    sink.table(table.to_json() + "\n" if args.format == "json" else table.to_csv(), args.format)
    sink.extra(_gnuplot([r.n for r in table.rows], table.ratios, "n ratio"), "dat")
    i = int(np.argmin(table.ratios))
    summary = f"min ratio over n <= {args.n_max}: {table.min_ratio!r} at n = {table.rows[i].n}; final gap {table.rows[-1].gap!r}"
    print(summary, file=sys.stderr)
    sink.record(_record(args, engine.name, h, summary))
    return EXIT_OK


def _certificate(engine, x, source: str):
    if source == "auto":
        if engine.name.startswith("orlicz:"):
            return star_orlicz_certificate(orlicz_from_id(engine.name.split(":", 1)[1]), x)
        if engine.name == "c0":
            # e*_gamma with sign at a coordinate of maximal modulus attains ||x||_inf
            j = int(np.argmax(np.abs(x.values)))
            f = SparseVec({int(x.indices[j]): float(np.sign(x.values[j]))})
            return star_summable_certificate(engine, f, x)
        raise _Usage(f"no automatic certificate for engine {engine.name!r}; use --cert summable:<file> or c,d")
    if source.startswith("summable:"):
        f, _ = _load_vector(source.split(":", 1)[1])
        return star_summable_certificate(engine, f, x)
    try:
        c, d = (float(v) for v in source.split(","))
    except ValueError:
        raise _Usage(f"bad --cert {source!r} (auto, summable:<file> or c,d)") from None
    return c, d, Modulus.identity()


def cmd_star(args) -> int:
    engine = engine_from_name(_pick(args, "engine"))
    x, h = _load_vector(_pick(args, "vector"))
    c, d, omega = _certificate(engine, x, args.cert)
    cert = star_check(engine, x, c * args.c_factor, d, omega)
    sink = _Sink(args, f"star_{engine.name.replace(':', '_')}")
    if args.format == "json":
        body = {"record": cert.to_record(), "rows": list(csv.DictReader(io.StringIO(cert.to_csv())))}
        sink.table(json.dumps(body, indent=1) + "\n", "json")
    else:
        sink.table(cert.to_csv(), "csv")
    sink.extra(cert.to_record(), "txt")
    sys.stderr.write(cert.to_record())
    sink.record(_record(args, engine.name, h, f"valid={cert.valid} min_margin={cert.min_margin!r}"))
    return EXIT_OK if cert.valid else EXIT_FAIL


def cmd_reproduce(args) -> int:
    ex = args.example
    a = sequence_from_id(args.a) if args.a else None
    extra = None
    if ex == "ex1.7":
        rep = wit.ex17_witness(a or sequence_from_id("harmonic"), args.n_max or 10_000)
    elif ex == "ex2.3":
        p = nakano_from_id(args.p)
        if args.vector:
            x, _ = _load_vector(args.vector)
            rep = wit.nakano_witness(p, args.theta, x)
        else:
            rep = wit.nakano_suite(p, args.theta, args.trials or 200, args.max_dim or 12, args.seed)
    elif ex == "ex2.5":
        rep = wit.day_witness(a or sequence_from_id("harmonic"), args.K or 6, args.n_max or 1 << 20)
    elif ex == "ex2.5-bound":
        rep = wit.day_bound_suite(args.trials or 1000, args.max_dim or 50, args.seed)
    elif ex == "ex2.6":
        W, rep = wit.blockweight_witness(a or sequence_from_id("geometric8"), args.K or 10, args.n_max or 1 << 16)
        extra = W.to_text()
    elif ex == "fact1.6":
        rep = wit.fact16_witness(args.m_max, args.n_max or 10_000)
    elif ex == "prop3.6":
        M = orlicz_from_id(args.M)
        rep = wit.prop36_witness(M, args.trials or 50, args.max_dim or 10, args.seed)
    else:  # argparse restricts the choices
        raise _Usage(f"unknown example {ex!r}")
    sink = _Sink(args, ex.replace(".", "_"))
    if args.format == "json":
        body = {
            "construction": rep.construction,
            "params": rep.params,
            "passed": rep.passed,
            "notes": rep.notes,
            "rows": list(csv.DictReader(io.StringIO(rep.to_csv()))),
        }
        sink.table(json.dumps(body, indent=1, default=str) + "\n", "json")
    else:
        sink.table(rep.to_csv(), "csv")
    sink.extra(rep.summary(), "txt")
    if extra:
        sink.extra(extra, "blocks")
    # first checked ratio per n
    seen = {}
    for r in rep.checks:
        if r.ratio is not None and r.n is not None:
            seen.setdefault(r.n, r.ratio)
    if seen:
        sink.extra(_gnuplot(seen.keys(), seen.values(), "n ratio"), "dat")
    sys.stderr.write(rep.summary())
    sink.record(_record(args, None, None, "PASS" if rep.passed else "FAIL"))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_lambda(args) -> int:
    engine = engine_from_name(_pick(args, "engine"))
    dps = args.dps
    if dps is None and engine.eval_mp is not None:
        dps = 80
    if dps is not None and engine.eval_mp is None:
        raise _Usage(f"engine {engine.name!r} has no multiprecision evaluator; drop --dps")
    lam = lambda_sequence(engine, args.n_max, dps=dps)
    if dps is not None:
        fmt = lambda v: mpmath.nstr(v, 20, min_fixed=-math.inf, max_fixed=math.inf)
    else:
        fmt = lambda v: repr(float(v))
    inc = [lam[i] - lam[i - 1] for i in range(1, len(lam))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lambda", "increment"])
    for n, v in enumerate(lam, start=1):
        w.writerow([n, fmt(v), fmt(inc[n - 2]) if n > 1 else ""])
    sink = _Sink(args, f"lambda_{engine.name.replace(':', '_')}")
    if args.format == "json":
        sink.table(json.dumps({"engine": engine.name, "dps": dps, "lambda": [fmt(v) for v in lam]}, indent=1) + "\n", "json")
    else:
        sink.table(buf.getvalue(), "csv")
    sink.extra(_gnuplot(range(1, len(lam) + 1), [float(v) for v in lam], "n lambda"), "dat")
    nondecreasing = all(d >= 0 for d in inc)
    strict = all(d > 0 for d in inc)
    summary = f"last lambda_{args.n_max} = {fmt(lam[-1])}; non-decreasing: {nondecreasing}; strictly increasing: {strict}"
    print(summary, file=sys.stderr)
    sink.record(_record(args, engine.name, None, summary))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(v: str) -> int:
    n = int(v)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyrenorm", description="Gap sequences and decomposition checks for sequence-space norms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, engine=True, vector=True):
        if engine:
            sp.add_argument("engine_pos", nargs="?", metavar="ENGINE",
                            help="c0, summing, day, orlicz:<default|square|pow<p>>, nakano:<linear|ones|log|capped:P>, blockweight:<file>")
            sp.add_argument("--engine")
        if vector:
            sp.add_argument("vector_pos", nargs="?", metavar="VECTOR", help="index:value file")
            sp.add_argument("--vector")
        sp.add_argument("--out", help="write tables, gnuplot data and runs.jsonl into this directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("norm", help="evaluate a norm")
    common(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("gap", help="gap table n, norm, sup_term, gap, a_n, ratio")
    common(sp)
    sp.add_argument("--a", default="harmonic", help="harmonic, geometric8, dyadic or a file with one value per line")
    sp.add_argument("--n-max", type=_positive, default=20)
    sp.add_argument("--mode", choices=("subset", "prefix"), default="subset")
    sp.add_argument("--basis", choices=("unit", "summing"), default="unit", help="prefix projections of this basis")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("star", help="check the decomposition inequality on every subset of supp(x)")
    common(sp)
    sp.add_argument("--cert", default="auto", help="auto, summable:<functional file> or c,d (identity modulus)")
    sp.add_argument("--c-factor", type=float, default=1.0, help="scale c(x), e.g. 0.5 to probe tightness")
    sp.set_defaults(func=cmd_star)

    sp = sub.add_parser("reproduce", help="rebuild and re-verify a witness construction")
    sp.add_argument("example", choices=EXAMPLES)
    common(sp, engine=False, vector=False)
    sp.add_argument("--vector", help="single vector for ex2.3")
    sp.add_argument("--a")
    sp.add_argument("--K", type=_positive)
    sp.add_argument("--n-max", type=_positive)
    sp.add_argument("--m-max", type=_positive, default=20)
    sp.add_argument("--theta", type=float, default=0.5)
    sp.add_argument("--p", default="linear", help="Nakano exponent id")
    sp.add_argument("--M", default="default", help="Orlicz function id")
    sp.add_argument("--trials", type=_positive)
    sp.add_argument("--max-dim", type=_positive)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("lambda", help="lambda_n = ||e_1 + ... + e_n|| for symmetric engines")
    common(sp, vector=False)
    sp.add_argument("--n-max", type=_positive, default=50)
    sp.add_argument("--dps", type=_positive, help="decimal digits (default 80 where supported)")
    sp.set_defaults(func=cmd_lambda)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SupportTooLarge as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ConstructionError as exc:
        print(f"construction: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (EngineError, HypothesisError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
