"""Command-line entry point: ``heckelab verify <suite>`` and ``heckelab cache <cmd>``.

Exit codes: 0 pass, 1 check failure, 2 usage, 3 invalid grid, 4 budget.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from . import heckealg, kolyvagin, partitions
from .cache import CacheError, EnumerationCache, default_cache_dir
from .finmod import DomainError, is_prime
from .lagrange import BudgetExceeded, HeckeType
from .report import VerificationReport

log = logging.getLogger("heckelab")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_GRID, EXIT_BUDGET = 0, 1, 2, 3, 4
CLI_DEFAULT_BUDGET = 10**6


class GridError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    p: list[int] | None = None
    g: int | None = None
    i: int | None = None
    M: list[int] | None = None
    out: str | None = None
    csv: str | None = None
    cache: str | None = None
    threads: int = 1
    budget: int = CLI_DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# suites


def _need_odd(ps, suite):
    if any(p == 2 for p in ps):
        raise GridError(f"{suite} needs odd p")


def _prime_power_odd(M):
    try:
        l, _ = heckealg._factor_prime_power(M)
    except DomainError as exc:
        raise GridError(str(exc)) from exc
    if l == 2:
        raise GridError(f"M={M}: l must be odd")


def _per_p(name, fn, ps):
    rep = VerificationReport(name, {"p": ps})
    for p in ps:
        rep.merge(fn(p), f"p={p}")
    return rep


def s_a23(c, cache):
    return _per_p("a23", lambda p: partitions.verify_a23(p, c.threads, c.budget), c.p or [2, 3])


def s_a24(c, cache):
    ps = c.p or [2]

    def one(p):
        r = partitions.verify_a24(p, cache=cache, workers=c.threads, budget=c.budget)
        r.merge(partitions.lemma_a21_sweep(p, None if p == 2 else 120), "Lemma A2.1")
        return r

    return _per_p("a24", one, ps)


def s_t438(c, cache):
    return _per_p("t438", lambda p: partitions.verify_prop438(p, cache=cache, workers=c.threads, budget=c.budget),
                  c.p or [3])


def s_lemma4312(c, cache):
    return _per_p("lemma4312", lambda p: partitions.verify_lemma4312(p, cache=cache, workers=c.threads,
                                                                       budget=c.budget), c.p or [3, 5])


def s_fibers41(c, cache):
    g = c.g or 3
    return _per_p("fibers41", lambda p: partitions.verify_fiber_laws(g, p, cache, c.threads, c.budget,
                                                                       kinds=("ordinary",)), c.p or [2, 3])


def s_fibers42(c, cache):
    g = c.g or 3
    return _per_p("fibers42", lambda p: partitions.verify_fiber_laws(g, p, cache, c.threads, c.budget,
                                                                       kinds=("nonordinary",)), c.p or [3])


def s_coeff618(c, cache):
    rep = _per_p("coeff618", lambda p: partitions.verify_617(p, cache=cache, workers=c.threads, budget=c.budget),
                 c.p or [2])
    rep.merge(heckealg.verify_coefficients(), "symbolic")
    return rep


def s_coeff626(c, cache):
    return _per_p("coeff626", lambda p: partitions.verify_626_and_629(p, cache=cache, workers=c.threads,
                                                                        budget=c.budget), c.p or [2])


def s_discrepancy629(c, cache):
    rep = VerificationReport("discrepancy629", {"p": c.p or [2]})
    for p in c.p or [2]:
        full = partitions.verify_626_and_629(p, cache=cache, workers=c.threads, budget=c.budget)
        sub = VerificationReport("discrepancy629", full.params, [ch for ch in full.checks if "(0,2)" in ch.name],
                                 data=full.data.get("discrepancy", {}))
        rep.merge(sub, f"p={p}")
    return rep


def s_g4failure(c, cache):
    return _per_p("g4failure", lambda p: partitions.verify_g4_failure(p, cache=cache, workers=c.threads,
                                                                        budget=c.budget), c.p or [3])


def s_rcount(c, cache):
    return heckealg.verify_rcount(tuple(c.p or [2, 3, 5]), c.g or 3, c.budget)


def s_satake(c, cache):
    return heckealg.verify_satake_identities(c.g or 4, tuple(c.M or [9, 27]))


def s_appendix1(c, cache):
    return heckealg.verify_appendix1(tuple(c.M or [9, 27]))


def s_ap1(c, cache):
    return heckealg.verify_ap1_residue(tuple(c.M or [9, 27]))


def s_kolyvagin(c, cache):
    rep = VerificationReport("kolyvagin", {"M": c.M or [3, 9]})
    Ms = [heckealg._factor_prime_power(M) for M in (c.M or [3, 9])]
    rep.merge(kolyvagin.verify_lemma210((1, 2), tuple(Ms)), "Lemma 2.10")
    bad = [p for p in range(1, 101) if not kolyvagin.derivative_identity(p).passed]
    rep.check("derivative identity for p <= 100", [], bad, "PAPER", "(2.9) up to the recorded global sign")
    rep.data["derivative_sign_vs_display"] = kolyvagin.DERIVATIVE_SIGN
    rep.merge(kolyvagin.verify_sigma_square(), "(1.35)")
    for l, n in Ms:
        for a, bb in list(heckealg.admissible_pairs(l, n))[:4]:
            spec = heckealg.CongruenceSpec(l, n, a, bb, t=(bb - a) % (l**n))
            rep.merge(kolyvagin.congruence_checks(spec), f"congruences M={l**n} a={a} b={bb}")
    return rep


def s_chow(c, cache):
    return kolyvagin.verify_chow()


SUITES = {
    "a23": (s_a23, "p"),
    "a24": (s_a24, "p"),
    "t438": (s_t438, "podd"),
    "lemma4312": (s_lemma4312, "podd"),
    "fibers41": (s_fibers41, "p"),
    "fibers42": (s_fibers42, "podd"),
    "coeff618": (s_coeff618, "p"),
    "coeff626": (s_coeff626, "p"),
    "discrepancy629": (s_discrepancy629, "p"),
    "g4failure": (s_g4failure, "podd"),
    "rcount": (s_rcount, "p"),
    "satake-identities": (s_satake, "M"),
    "appendix1": (s_appendix1, "M"),
    "ap1-residue": (s_ap1, "M"),
    "kolyvagin": (s_kolyvagin, "M"),
    "chow-prop31": (s_chow, None),
}


def validate(c: SuiteConfig) -> None:
    if c.suite != "all" and c.suite not in SUITES:
        raise KeyError(c.suite)
    for p in c.p or []:
        if not is_prime(p):
            raise GridError(f"p={p} is not prime")
    for M in c.M or []:
        _prime_power_odd(M)
    if c.threads < 1:
        raise GridError("threads >= 1")
    if c.budget < 1:
        raise GridError("budget >= 1")
    if c.suite != "all" and SUITES[c.suite][1] == "podd" and c.p:
        _need_odd(c.p, c.suite)
    if c.suite in ("fibers41", "fibers42") and c.g is not None and not 1 <= c.g <= 4:
        raise GridError("g must be 1..4")
    if c.suite == "rcount" and c.g is not None and not 1 <= c.g <= 4:
        raise GridError("rcount size must be 1..4")
    if c.suite == "satake-identities" and c.g is not None and not 1 <= c.g <= 4:
        raise GridError("g must be 1..4")
    if c.suite in ("t438", "lemma4312", "g4failure") and c.g not in (None, 3 if c.suite != "g4failure" else 4):
        raise GridError(f"{c.suite} has fixed genus")


# suites whose Z/p^2 enumerations are only run at p = 2 inside "all"
_P2_ONLY = ("a24", "coeff618", "coeff626", "discrepancy629")


def _sub_grid(name, kind, ps):
    if not ps:
        return None
    if kind == "podd":
        ps = [p for p in ps if p != 2]
    elif name in _P2_ONLY:
        ps = [p for p in ps if p == 2]
    return ps or None


def run_suite(c: SuiteConfig) -> VerificationReport:
    validate(c)
    cache = EnumerationCache(c.cache) if c.cache else EnumerationCache()
    t0 = time.time()
    if c.suite == "all":
        rep = VerificationReport("all", {"p": c.p, "M": c.M})
        for name, (fn, kind) in SUITES.items():
            sub = SuiteConfig(name, _sub_grid(name, kind, c.p), None, c.i, c.M, threads=c.threads,
                              budget=c.budget, cache=c.cache)
            log.info("running %s", name)
            rep.merge(fn(sub, cache), name)
    else:
        rep = SUITES[c.suite][0](c, cache)
    rep.wall_time = time.time() - t0
    rep.cache_hits = cache.hits
    rep.params.setdefault("threads", c.threads)
    return rep


# ---------------------------------------------------------------------------
# argument handling


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in str(s).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {s!r}") from exc


def read_config(path: str) -> dict:
    """key = value lines; '#' comments; keys mirror the long flags."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


_CONFIG_KEYS = {"p": _int_list, "M": _int_list, "g": int, "i": int, "out": str, "csv": str, "cache": str,
                "threads": int, "budget": int}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="heckelab", description="Finite-model verification suites.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join([*SUITES, "all"]))
    v.add_argument("--config")
    v.add_argument("--p", type=_int_list)
    v.add_argument("--g", type=int)
    v.add_argument("--i", type=int)
    v.add_argument("--M", type=_int_list)
    v.add_argument("--out")
    v.add_argument("--csv")
    v.add_argument("--cache")
    v.add_argument("--threads", type=int)
    v.add_argument("--budget", type=int)
    v.add_argument("--quiet", action="store_true")

    c = sub.add_parser("cache", help="inspect or fill the enumeration cache")
    c.add_argument("action", choices=["status", "purge", "prewarm"])
    c.add_argument("--config")
    c.add_argument("--cache")
    c.add_argument("--g", type=int)
    c.add_argument("--p", type=_int_list)
    c.add_argument("--i", type=int, help="T_{p,i}; omit for T_p")
    c.add_argument("--threads", type=int)
    c.add_argument("--budget", type=int)
    return ap


def _merge_config(args) -> dict:
    vals = {}
    if getattr(args, "config", None):
        for k, raw in read_config(args.config).items():
            if k not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {k!r}")
            vals[k] = _CONFIG_KEYS[k](raw)
    for k in _CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            vals[k] = v
    return vals


def write_csv(rep: VerificationReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "expected", "actual", "passed", "tag", "anchor"])
        for ch in rep.checks:
            w.writerow([ch.name, json.dumps(ch.expected), json.dumps(ch.actual), ch.passed, ch.tag, ch.anchor])


def cmd_verify(args) -> int:
    vals = _merge_config(args)
    cfg = SuiteConfig(args.suite, vals.get("p"), vals.get("g"), vals.get("i"), vals.get("M"), vals.get("out"),
                      vals.get("csv"), vals.get("cache"), vals.get("threads", 1), vals.get("budget", CLI_DEFAULT_BUDGET))
    try:
        rep = run_suite(cfg)
    except KeyError:
        print(f"unknown suite {args.suite!r}; choose from {', '.join([*SUITES, 'all'])}", file=sys.stderr)
        return EXIT_USAGE
    except (GridError, DomainError) as exc:
        print(f"invalid parameter grid: {exc}", file=sys.stderr)
        return EXIT_GRID
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} (raise --budget)", file=sys.stderr)
        return EXIT_BUDGET
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if not args.quiet:
        for line in rep.summary_lines():
            print(line)
    if cfg.out:
        Path(cfg.out).write_text(rep.to_json(indent=2) + "\n")
    if cfg.csv:
        write_csv(rep, cfg.csv)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_cache(args) -> int:
    vals = _merge_config(args)
    cache = EnumerationCache(vals.get("cache") or default_cache_dir())
    try:
        if args.action == "status":
            rows = cache.status()
            print(json.dumps({"directory": str(cache.dir), "files": rows}, indent=2))
            return EXIT_PASS if all(r.get("ok") for r in rows) else EXIT_FAIL
        if args.action == "purge":
            n = cache.purge()
            print(json.dumps({"directory": str(cache.dir), "removed": n}))
            return EXIT_PASS
        g = vals.get("g", 3)
        i = vals.get("i")
        ht = HeckeType("Tp") if i is None else HeckeType("Tpi", i)
        out = []
        for p in vals.get("p") or [2]:
            if not is_prime(p):
                print(f"invalid parameter grid: p={p} is not prime", file=sys.stderr)
                return EXIT_GRID
            subs = cache.load_or_enumerate(g, p, ht, workers=vals.get("threads", 1),
                                           budget=vals.get("budget", CLI_DEFAULT_BUDGET))
            out.append({"g": g, "p": p, "hecke": ht.label(), "records": len(subs)})
        print(json.dumps({"directory": str(cache.dir), "prewarmed": out}, indent=2))
        return EXIT_PASS
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"invalid parameter grid: {exc}", file=sys.stderr)
        return EXIT_GRID


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.cmd == "verify":
            return cmd_verify(args)
        return cmd_cache(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
