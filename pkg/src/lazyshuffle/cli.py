"""Command-line front end.

Files:
  *.shuffle.json  {"convention": "execution-order", "n": N,
                   "swaps": [{"a": A, "b": B, "p": SCALAR}, ...]}
                  SCALAR is {"rat": {"num": "1", "den": "2"}} or
                  {"surd": {"a": [num, den], "b": [num, den], "c": [num, den]}}
  *.reach.json    {"n": N, "swaps": [[a, b], ...]}
  table CSV       family,n,length,paper_bound,verdict

Exit codes: 0 pass, 2 check failed, 1 usage or I/O error.
Standard output carries JSON or CSV only; logs go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import bounds, certificates, constructions, numeric, search, verify
from .core import Network, NetworkFormatError, TranspositionSeq, decode, decode_seq, encode, encode_seq, to_transpositions

log = logging.getLogger("lazyshuffle")

EXIT_PASS, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
TABLE_FAMILIES = ("u2", "strong1", "reach2", "division", "strong2")
TABLE_MAX_N = 64


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=1) + "\n")


def _parse_family(name: str, k: int | None) -> tuple[str, int | None]:
    if name.startswith("ktuple:"):
        try:
            return "ktuple", int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad k in {name!r}") from None
    if name not in bounds.FAMILIES:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(bounds.FAMILIES)} or ktuple:K")
    return name, k


def _load(path: str) -> Network | TranspositionSeq:
    try:
        data = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    try:
        if isinstance(doc, dict) and "convention" in doc:
            return decode(data)
        return decode_seq(data)
    except NetworkFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _load_network(path: str) -> Network:
    obj = _load(path)
    if not isinstance(obj, Network):
        raise UsageError(f"{path} is a transposition sequence; this command needs a shuffle network")
    return obj


def _load_seq(path: str) -> TranspositionSeq:
    obj = _load(path)
    return to_transpositions(obj) if isinstance(obj, Network) else obj


# -- commands -------------------------------------------------------------------


def cmd_build(args) -> int:
    family, k = _parse_family(args.family, args.k)
    if family == "ktuple" and k is None:
        raise UsageError("ktuple needs --k or the form ktuple:K")
    try:
        obj = constructions.build(family, args.n, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    is_seq = isinstance(obj, TranspositionSeq)
    tag = f"ktuple{k}" if family == "ktuple" else family
    out = Path(args.out) if args.out else Path(f"{tag}_{args.n}.{'reach' if is_seq else 'shuffle'}.json")
    try:
        out.write_bytes(encode_seq(obj) if is_seq else encode(obj))
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    entry = bounds.ledger(family, args.n, len(obj), k or 0)
    log.info("wrote %s (%d swaps, bound %s = %.4g)", out, len(obj), entry.formula, entry.bound)
    _emit({"family": family, "n": args.n, "k": k, "length": len(obj), "paper_bound": entry.bound,
           "bound_formula": entry.formula, "within_bound": entry.ok, "file": str(out)})
    return EXIT_PASS


def _run_check(check: str, obj, tol: float, jobs: int) -> verify.Verdict:
    if check == "reach":
        seq = to_transpositions(obj) if isinstance(obj, Network) else obj
        return verify.check_reachability(seq)
    if not isinstance(obj, Network):
        raise UsageError(f"check {check!r} needs a shuffle network, got a transposition sequence")
    if check == "strong1":
        return verify.check_strong1(obj, tol)
    if check == "strong2":
        return verify.check_strong2(obj, tol, jobs=jobs)
    if check == "division":
        if obj.n % 2:
            raise UsageError("division check requires even n")
        return verify.check_division(obj, tol)
    if check == "full":
        if obj.n > verify.FULL_DISTRIBUTION_MAX_N:
            raise UsageError(f"full check limited to n <= {verify.FULL_DISTRIBUTION_MAX_N}")
        return verify.check_full_uniform(obj, tol)
    if check.startswith("pair:"):
        try:
            x, y = (int(v) for v in check[5:].split(","))
        except ValueError:
            raise UsageError(f"bad pair spec {check!r}; use pair:x,y") from None
        if x == y or not (1 <= x <= obj.n and 1 <= y <= obj.n):
            raise UsageError(f"pair ({x}, {y}) is not two distinct labels of [{obj.n}]")
        return verify.check_pair_uniform(obj, x, y, tol)
    raise UsageError(f"unknown check {check!r}")


def cmd_verify(args) -> int:
    v = _run_check(args.check, _load(args.file), args.tol, args.jobs)
    sys.stdout.write(v.dumps() + "\n")
    return EXIT_PASS if v.passed else EXIT_FAIL


def cmd_certify(args) -> int:
    if args.invariant == "clique":
        seq = _load_seq(args.file)
        if seq.n > certificates.CLIQUE_MAX_N:
            raise UsageError(f"clique certificate limited to n <= {certificates.CLIQUE_MAX_N}")
        trace = certificates.clique_certificate(seq)
    else:
        net = _load_network(args.file)
        if args.invariant == "rank":
            if not net.is_rational:
                raise UsageError("rank certificate refused: the network has surd probabilities and exact rank needs rationals")
            trace = certificates.rank_certificate(net)
        else:
            trace = certificates.transversal_certificate(net, args.tol)
    sys.stdout.write(trace.dumps() + "\n")
    return EXIT_PASS if trace.verdict else EXIT_FAIL


def cmd_search(args) -> int:
    try:
        if args.length is None:
            report = search.certify_minimality(args.n, max_nodes=args.max_nodes, jobs=args.jobs)
            ok = report.verdict == search.MINIMAL
        else:
            report = search.exhaust_reach2(args.n, args.length, max_nodes=args.max_nodes, jobs=args.jobs)
            ok = report.verdict != search.INCONCLUSIVE
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(report.dumps() + "\n")
    return EXIT_PASS if ok else EXIT_FAIL


def table_rows(max_n: int, tol: float = verify.DEFAULT_TOL, jobs: int = 1):
    """Build and check every table family for ``2 <= n <= max_n``."""
    for family in TABLE_FAMILIES:
        for n in range(2, max_n + 1):
            if family == "division" and n % 2:
                continue
            obj = constructions.build(family, n)
            if family == "u2":
                passed = verify.check_pair_uniform(obj, 1, 2, tol).passed
            elif family == "strong1":
                passed = verify.check_strong1(obj, tol).passed
            elif family == "reach2":
                passed = verify.check_reachability(obj).passed
            elif family == "division":
                passed = verify.check_division(obj, tol).passed and verify.check_strong1(obj, tol).passed
            else:
                passed = verify.check_strong2(obj, tol, jobs=jobs).passed
            entry = bounds.ledger(family, n, len(obj))
            verdict = "pass" if passed and entry.ok else "fail"
            log.info("%s n=%d length=%d %s", family, n, len(obj), verdict)
            yield family, n, len(obj), f"{entry.bound:.6g}", verdict


def cmd_table(args) -> int:
    if not 2 <= args.max_n <= TABLE_MAX_N:
        raise UsageError(f"--max-n must lie in 2..{TABLE_MAX_N}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["family", "n", "length", "paper_bound", "verdict"])
    all_pass = True
    for row in table_rows(args.max_n, args.tol, args.jobs):
        writer.writerow(row)
        all_pass &= row[-1] == "pass"
    if args.out:
        try:
            Path(args.out).write_text(buf.getvalue())
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_PASS if all_pass else EXIT_FAIL


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lazyshuffle",
        description="Build, verify and certify lazy-transposition shuffle networks.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--precision-bits", type=int, default=numeric.DEFAULT_PRECISION_BITS,
                        help="bits used to enclose surd probabilities (default 128)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="synthesise a network and write it to a file")
    p.add_argument("family", help=f"one of {', '.join(bounds.FAMILIES)}, or ktuple:K")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None, help="tuple size for ktuple")
    p.add_argument("--out", help="output path (default FAMILY_N.shuffle.json or .reach.json)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check a network file; prints a verdict")
    p.add_argument("check", help="strong1 | pair:x,y | strong2 | division | full | reach")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", help="compute a lower-bound invariant trace")
    p.add_argument("invariant", choices=("rank", "transversal", "clique"))
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("search", help="exhaustive reachability search (n <= 7)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--length", type=int, default=None,
                   help="length to decide; default proves minimality of ceil(3n/2)-2")
    p.add_argument("--max-nodes", type=int, default=None, help="abort as inconclusive after this many states")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("table", help="CSV of lengths against published bounds, every row verified")
    p.add_argument("--max-n", type=int, default=16)
    p.add_argument("--out", help="CSV path (default standard output)")
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.set_defaults(func=cmd_table)
    return parser


def _configure_logging(verbose: bool) -> None:
    # a handler of our own so messages reach stderr even when the host configured logging
    pkg = logging.getLogger("lazyshuffle")
    for h in [h for h in pkg.handlers if getattr(h, "_lazyshuffle_cli", False)]:
        pkg.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._lazyshuffle_cli = True
    pkg.addHandler(handler)
    pkg.setLevel(logging.INFO if verbose else logging.WARNING)
    pkg.propagate = False


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; our contract reserves 2 for failed checks
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        numeric.set_working_precision(args.precision_bits)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
