"""Command-line front end.

Exit status: 0 success, 1 domain error, 2 inexact search under
``--require-exact``, 64 malformed flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import bounds as B
from . import constructions as K
from . import density as D
from .numtheory import factorize, primes_in_class
from .search import DEFAULT_BUDGET, ResultCache, SearchResult, max_avoiding, scan_table

EXIT_DOMAIN = 1
EXIT_INEXACT = 2
EXIT_USAGE = 64
SCHEMA = 1

TABLE_COLUMNS = ("m", "squarefree", "omega", "omega3", "best_size", "exact", "thm11_bound", "best_analytic_bound")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(s: str) -> int:
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _add_format(p: argparse.ArgumentParser, default: str = "text") -> None:
    p.add_argument("--format", choices=("json", "csv", "text"), default=default)
    p.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")


def _add_cache(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache-dir", default=None,
                   help="directory for the result cache (default: $DIFFSQUARES_CACHE, else in memory)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="diffsquares", description="Sets whose differences avoid the squares mod m.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="maximum avoiding set in Z_m")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--budget-nodes", type=_positive_int, default=DEFAULT_BUDGET)
    p.add_argument("--time-limit", type=float, default=None, help="wall-clock cap in seconds")
    p.add_argument("--require-exact", action="store_true")
    _add_cache(p)
    _add_format(p)

    p = sub.add_parser("scan", help="search every m in a range")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--filter", action="append", choices=("squarefree", "odd", "prime"), default=[])
    p.add_argument("--budget-nodes", type=_positive_int, default=DEFAULT_BUDGET)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--retry-inexact", action="store_true")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    _add_cache(p)
    _add_format(p, "csv")

    p = sub.add_parser("table", help="CSV table of exact values next to the analytic bounds")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--budget-nodes", type=_positive_int, default=DEFAULT_BUDGET)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    _add_cache(p)

    p = sub.add_parser("construct", help="explicit avoiding sets")
    p.add_argument("--method", required=True,
                   choices=("cohen", "two-prime", "p-square", "ruzsa65", "product", "best"))
    p.add_argument("--p", type=int)
    p.add_argument("--q1", type=int)
    p.add_argument("--q2", type=int)
    p.add_argument("--m", type=int)
    _add_format(p)

    p = sub.add_parser("bounds", help="analytic upper bounds for m")
    p.add_argument("--m", type=_positive_int, action="append", required=True)
    _add_format(p)

    p = sub.add_parser("density", help="failure fractions of the density conditions over m <= x")
    p.add_argument("--x", type=_positive_int, required=True)
    p.add_argument("--eps", type=float, action="append", required=True)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--variant", choices=D.VARIANTS, default="section3")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--strict", action="store_true", help="fail on a degenerate parameter grid")
    _add_format(p)

    p = sub.add_parser("tv", help="TV distance of prime-divisor counts from independent Poissons")
    p.add_argument("--x", type=_positive_int, required=True)
    p.add_argument("--interval", action="append", default=[], metavar="LO:HI",
                   help="primes = 3 mod 4 in (LO, HI]; repeatable")
    p.add_argument("--primes", action="append", default=[], metavar="P1,P2,..",
                   help="an explicit prime set; repeatable")
    _add_format(p)
    return ap


def _emit(payload: dict, fmt: str, text: str, csv_text: str | None = None) -> None:
    if fmt == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True))
    elif fmt == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        print(text)


def _results_csv(results: Sequence[SearchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "best_size", "lower_bound", "upper_bound", "exact", "witness", "error"])
    for r in results:
        w.writerow([r.m, r.best_size, r.lower_bound, r.upper_bound, int(r.exact),
                    "-".join(map(str, r.witness)), r.error or ""])
    return buf.getvalue()


def _cmd_search(a) -> int:
    cache = ResultCache(a.cache_dir)
    hit = cache.get(a.m)
    if hit is not None and hit.exact:
        r = hit
    else:
        r = max_avoiding(a.m, a.budget_nodes, a.time_limit)
        cache.put(r)
    text = (f"m={r.m} best_size={r.best_size} exact={r.exact} bounds=[{r.lower_bound}, {r.upper_bound}] "
            f"witness={r.witness}")
    _emit({"result": r.to_json()}, a.format, text, _results_csv([r]))
    if a.require_exact and not r.exact:
        return EXIT_INEXACT
    return 0


def _check_range(lo: int, hi: int) -> None:
    if lo < 1:
        raise ValueError(f"--lo must be at least 1, got {lo}")


def _cmd_scan(a) -> int:
    _check_range(a.lo, a.hi)
    rs = scan_table(a.lo, a.hi, a.budget_nodes, a.filter, ResultCache(a.cache_dir), a.threads,
                    a.time_limit, a.retry_inexact)
    text = "\n".join(f"{r.m}\t{r.best_size}\t{'exact' if r.exact else 'inexact'}\t{r.upper_bound}"
                     + (f"\t{r.error}" if r.error else "") for r in rs)
    _emit({"results": [r.to_json() for r in rs]}, a.format, text, _results_csv(rs))
    return 0


def table_rows(results: Sequence[SearchResult]) -> list[list]:
    rows = []
    for r in results:
        f = factorize(r.m)
        rep = B.bound_report(f)
        t11 = rep.get("theorem11")
        if r.failed:
            best, exact = "", "error"
        else:
            best, exact = r.best_size, int(r.exact)
        rows.append([r.m, int(f.is_squarefree), len(f.factors), sum(1 for p in f.primes if p % 4 == 3),
                     best, exact, repr(t11.value) if t11.applicable else "", repr(rep.best)])
    return rows


def _cmd_table(a) -> int:
    _check_range(a.lo, a.hi)
    rs = scan_table(a.lo, a.hi, a.budget_nodes, (), ResultCache(a.cache_dir), a.threads, a.time_limit)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    w.writerows(table_rows(rs))
    return 0


def _need(a, *names: str) -> None:
    missing = [n for n in names if getattr(a, n) is None]
    if missing:
        raise _UsageError(f"--method {a.method} needs " + ", ".join("--" + n for n in missing))


class _UsageError(Exception):
    pass


def _cmd_construct(a) -> int:
    if a.method == "cohen":
        _need(a, "p")
        c = K.cohen_set(a.p)
    elif a.method == "two-prime":
        _need(a, "q1", "q2")
        c = K.two_prime_set(a.q1, a.q2)
    elif a.method == "p-square":
        _need(a, "p")
        c = K.p_square_set(a.p)
    elif a.method == "ruzsa65":
        c = K.ruzsa65()
    else:
        _need(a, "m")
        if a.m < 1:
            raise ValueError(f"m must be positive, got {a.m}")
        c = K.product_set(a.m) if a.method == "product" else K.best_construction(a.m)
    text = f"m={c.m} method={c.method} size={len(c.set)} guaranteed>={c.guaranteed_size:.4f} set={list(c.set)}"
    _emit({"construction": c.to_json()}, a.format, text)
    return 0


def _cmd_bounds(a) -> int:
    reps = [B.bound_report(m) for m in a.m]
    lines = []
    for r in reps:
        lines.append(f"m={r.m} best={r.best:g} ({r.best_name})")
        for b in r.bounds:
            tag = " [prior work]" if b.prior_work else ""
            val = f"{b.value:g}" if b.applicable else f"n/a ({b.reason})"
            lines.append(f"  {b.name}: {val}{tag}")
    _emit({"reports": [r.to_json() for r in reps]}, a.format, "\n".join(lines), B.reports_to_csv(reps))
    return 0


def _cmd_density(a) -> int:
    reps = D.density_scan_many(a.x, a.eps, a.C, a.variant, a.threads, a.strict)
    lines = []
    for r in reps:
        lines.append(f"x={r.x} eps={r.eps} total={r.total} (i)={r.fraction('fail_i'):.6f} "
                     f"(ii)={r.fraction('fail_ii'):.6f} (iii)={r.fraction('fail_iii'):.6f} "
                     f"(iv)={r.fraction('fail_iv')} E={r.e_hits} c_eps={r.c_eps:.6f}"
                     + (f" [{r.grid_error}]" if r.grid_error else ""))
    _emit({"reports": [r.to_json() for r in reps]}, a.format, "\n".join(lines), D.reports_to_csv(reps))
    return 0


def _parse_sets(a) -> list[list[int]]:
    sets = []
    for iv in a.interval:
        try:
            lo, hi = (float(t) for t in iv.split(":"))
        except ValueError:
            raise _UsageError(f"bad --interval {iv!r}, expected LO:HI")
        sets.append(list(primes_in_class(lo, hi, 3).primes))
    for ps in a.primes:
        try:
            sets.append([int(t) for t in ps.split(",") if t.strip()])
        except ValueError:
            raise _UsageError(f"bad --primes {ps!r}")
    if not sets:
        raise _UsageError("give at least one --interval or --primes")
    return sets


def _cmd_tv(a) -> int:
    sets = _parse_sets(a)
    tv = D.tv_distance_empirical(a.x, sets)
    lams = [sum(1.0 / p for p in t) for t in sets]
    _emit({"x": a.x, "sizes": [len(t) for t in sets], "lambda": lams, "tv": tv}, a.format,
          f"x={a.x} sets={[len(t) for t in sets]} lambda={[round(l, 6) for l in lams]} tv={tv!r}",
          f"x,tv\n{a.x},{tv!r}\n")
    return 0


COMMANDS = {
    "search": _cmd_search,
    "scan": _cmd_scan,
    "table": _cmd_table,
    "construct": _cmd_construct,
    "bounds": _cmd_bounds,
    "density": _cmd_density,
    "tv": _cmd_tv,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return COMMANDS[a.command](a)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"diffsquares: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, AssertionError) as exc:
        print(f"diffsquares: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
