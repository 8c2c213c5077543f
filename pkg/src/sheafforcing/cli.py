"""Command-line entry point: ``sheaf-forcing <command> SITE ...``.

``SITE`` is a path to a site document or ``@key`` for a built-in site
(``@1``, ``@2``, ``@2'``, ``@chain3``, ``@parallel``). Output is one JSON
object per line unless ``--human`` is given.

Exit codes: 0 success or forced, 1 invalid input (failed validation,
unknown object, typing), 2 malformed input (unreadable file, syntax),
3 checked and not forced / not passing.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formula as F
from .catalog import CATALOG
from .forcing import UnboundVariable, delta0_suite, engine
from .hf import parse_hf
from .izfa import check_axioms
from .names import BudgetExceeded, NameTypeError, check_name, load_name
from .settopos import check_equivalence
from .sieves import Site, closed_sieves, heyting_impl, heyting_join, heyting_meet, heyting_top
from .sitefile import SiteFormatError, load_site

OK, INVALID, MALFORMED, NOT_FORCED = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, ensure_ascii=False))


def _open_site(ref: str) -> Site:
    if ref.startswith("@"):
        make = CATALOG.get(ref[1:])
        if make is None:
            raise UsageError(MALFORMED, f"unknown built-in site {ref}; try one of "
                             + ", ".join("@" + k for k in CATALOG))
        return make()
    try:
        site, rep = load_site(ref)
    except (OSError, SiteFormatError) as exc:
        raise UsageError(MALFORMED, str(exc)) from exc
    if not rep.ok:
        raise UsageError(INVALID, "; ".join(str(v) for v in rep))
    return site


def _object(site: Site, A: str | None) -> str:
    if A is None:
        return site.objects[-1]
    if A not in site.objects:
        raise UsageError(INVALID, f"unknown object {A!r}")
    return A


def _sieve_text(S) -> str:
    return "{" + ",".join(sorted(S.arrows)) + "}"


# --- commands -------------------------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        site, rep = load_site(args.site)
    except (OSError, SiteFormatError) as exc:
        raise UsageError(MALFORMED, str(exc)) from exc
    if args.human:
        print("valid" if rep.ok else "\n".join(str(v) for v in rep))
    else:
        _emit({"valid": rep.ok, "violations": [{"law": v.law, "detail": v.detail} for v in rep]})
    return OK if rep.ok else INVALID


def cmd_omega(args) -> int:
    site = _open_site(args.site)
    A = _object(site, args.object)
    elems = closed_sieves(site, A)
    labels = [_sieve_text(S) for S in elems]
    index = {S: i for i, S in enumerate(elems)}
    tables = {}
    for op, fn in (("meet", lambda a, b: heyting_meet(site, a, b)),
                   ("join", lambda a, b: heyting_join(site, a, b)),
                   ("impl", lambda a, b: heyting_impl(site, a, b))):
        tables[op] = [[index[fn(a, b)] for b in elems] for a in elems]
    if args.human:
        print(f"Ω({A}) has {len(elems)} elements")
        for i, lab in enumerate(labels):
            print(f"  {i}: {lab}")
        for op, rows in tables.items():
            print(f"{op}:")
            print("      " + " ".join(f"{j:>3}" for j in range(len(elems))))
            for i, row in enumerate(rows):
                print(f"  {i:>3} " + " ".join(f"{x:>3}" for x in row))
    else:
        _emit({"object": A, "elements": labels, **tables})
    return OK


def _parse_env(site: Site, A: str, items: list[str]) -> dict:
    env = {}
    for item in items or []:
        var, sep, src = item.partition("=")
        if not sep or not var:
            raise UsageError(MALFORMED, f"--env expects var=name-file, got {item!r}")
        try:
            if src.startswith("hf:"):
                env[var] = check_name(site.cat, A, parse_hf(src[3:]))
            else:
                env[var] = load_name(site.cat, json.loads(Path(src).read_text()), A)
        except (OSError, ValueError) as exc:
            code = INVALID if isinstance(exc, NameTypeError) else MALFORMED
            raise UsageError(code, f"--env {var}: {exc}") from exc
    return env


def cmd_force(args) -> int:
    site = _open_site(args.site)
    A = _object(site, args.object)
    try:
        phi = F.parse(args.formula)
    except F.FormulaSyntaxError as exc:
        raise UsageError(MALFORMED, str(exc)) from exc
    env = _parse_env(site, A, args.env)
    eng = engine(site, args.rank)
    try:
        verdict = eng.force(A, phi, env)
        tv = eng.truth_value(A, phi, env)
    except UnboundVariable as exc:
        raise UsageError(INVALID, f"unbound variable: {exc.args[0]}") from exc
    except NameTypeError as exc:
        raise UsageError(INVALID, str(exc)) from exc
    top = tv.sieve == heyting_top(site, A)
    if args.human:
        print(f"{A} ⊩ {F.to_text(phi)} : {verdict.value} ({verdict.scope})")
        print(f"‖φ‖_{A} = {_sieve_text(tv.sieve)}{' (top)' if top else ''}")
    else:
        _emit({"object": A, "formula": F.to_text(phi), "forced": verdict.value,
               "scope": verdict.scope, "truth": tv.arrows, "top": top})
    return OK if verdict.value else NOT_FORCED


def cmd_axioms(args) -> int:
    site = _open_site(args.site)
    records = check_axioms(site, args.rank, infinity_bound=args.infinity_bound,
                           bounded_rank=args.bounded_rank)
    passing = {"pass", "rank-relative pass"}
    if args.human:
        width = max(len(r.axiom) for r in records)
        for r in records:
            print(f"{r.axiom:<{width}}  {r.kind:<16}  rank {r.rank}  {r.status}")
    else:
        for r in records:
            _emit(r.to_json())
    return OK if all(r.status in passing for r in records) else NOT_FORCED


def cmd_equiv(args) -> int:
    site = _open_site(args.site)
    rep = check_equivalence(site, args.bound)
    if args.human:
        fails = [r for r in rep.records if r.status != "pass"]
        print(f"{site.name}: {len(rep.records)} checks, {rep.counts()}")
        for r in fails:
            print(f"  {r.status}: {r.instance} {r.check} {r.detail}")
    else:
        for r in rep.records:
            _emit(r.to_json())
        _emit({"site": site.name, "bound": args.bound, "ok": rep.ok, "counts": rep.counts()})
    return OK if rep.ok else NOT_FORCED


def cmd_delta0(args) -> int:
    site = _open_site(args.site)
    cases = delta0_suite(site, args.count, args.seed, args.max_rank, args.max_depth)
    agree = sum(c.agrees for c in cases)
    if args.human:
        for c in cases:
            if not c.agrees:
                print(f"disagreement at {c.obj}: {c.formula}")
        print(f"{site.name}: {agree}/{len(cases)} agree (seed {args.seed})")
    else:
        for c in cases:
            _emit(c.to_json())
        _emit({"site": site.name, "seed": args.seed, "agree": agree, "total": len(cases)})
    return OK if agree == len(cases) else NOT_FORCED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sheaf-forcing", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("site", help="site document path, or @key for a built-in site")
        sp.add_argument("--human", action="store_true", help="tables instead of JSON lines")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check the category and topology laws")
    sp = add("omega", cmd_omega, "list Ω(A) with its meet, join and implication tables")
    sp.add_argument("--object")
    sp = add("force", cmd_force, "decide A ⊩ φ and print the truth sieve")
    sp.add_argument("--object")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--env", action="append", metavar="VAR=FILE",
                    help="bind a variable to a name document, or to a check-name via VAR=hf:{...}")
    sp.add_argument("--rank", type=int, default=1)
    sp = add("axioms", cmd_axioms, "check the IZFA axiom list")
    sp.add_argument("--rank", type=int, default=2)
    sp.add_argument("--bounded-rank", type=int, default=1,
                    help="rank for the bounded-instance axioms (capped by --rank)")
    sp.add_argument("--infinity-bound", type=int, default=1)
    sp = add("equiv", cmd_equiv, "check the sheaf / (C,J)-set equivalence on small sheaves")
    sp.add_argument("--bound", type=int, default=2)
    sp.add_argument("--rank", type=int, default=4,
                    help="accepted for symmetry; every check here is decided exactly")
    sp = add("delta0", cmd_delta0, "random Δ0 absoluteness suite")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-rank", type=int, default=3)
    sp.add_argument("--max-depth", type=int, default=4)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return MALFORMED if exc.code else OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
