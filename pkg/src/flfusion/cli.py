"""Command line: characters, fusion products and claim verification.

    flfusion char A1 --demazure 1 2w1
    flfusion char A2 --weyl w1+w2
    flfusion char A1 --levels 2,1 --coweights w1v --mu 0
    flfusion fusion A1 "V(w1)" "V(w1)"
    flfusion verify A2 cor-fusion-demazure --cap 6

Exit codes: 0 pass, 1 verification failed (including cyclicity failures),
2 usage or domain errors, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from .charring import affine_demazure_character, weyl_character
from .errors import (CyclicityError, DomainError, FusionError, InconsistencyError,
                     TruncationError, UnsupportedError)
from .fusion import chain_character, demazure_module_explicit, fusion_product
from .currentmod import irreducible_evaluation_module
from .rootdata import RootSystem, build_root_system
from .verify import CLAIMS, Caps, run_claim

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

_TERM = re.compile(r"([+-]?)(\d*)w(\d+)(v?)")


class ParseError(DomainError):
    pass


def parse_weight(text: str, rs: RootSystem, coweight: bool = False) -> tuple:
    """'2w1+w2' -> (2, 1); coweights use the suffix 'wv' as in 'w1v+w2v'; '0' is zero."""
    text = text.replace(" ", "")
    if text in ("0", ""):
        return rs.zero
    out = [0] * rs.rank
    pos = 0
    for m in _TERM.finditer(text):
        if m.start() != pos:
            break
        sign, coeff, node, v = m.groups()
        if bool(v) != coweight:
            kind = "coweight" if coweight else "weight"
            raise ParseError(f"'{m.group(0)}' is not a {kind} term (coweights end in 'v')")
        i = int(node)
        if not 1 <= i <= rs.rank:
            raise ParseError(f"node {i} out of range for {rs.label}")
        c = int(coeff) if coeff else 1
        out[i - 1] += -c if sign == "-" else c
        pos = m.end()
    if pos != len(text):
        raise ParseError(f"cannot parse weight '{text}'")
    return tuple(out)


def parse_list(text: str) -> list[str]:
    return [t for t in text.split(",") if t.strip()]


def parse_root_system(text: str) -> RootSystem:
    try:
        return build_root_system(text)
    except (ValueError, KeyError) as err:
        raise ParseError(f"bad root system '{text}': {err}") from None


_FACTOR = re.compile(r"^\s*([VD])\((.*)\)\s*$")


def parse_factor(text: str, rs: RootSystem):
    """V(weight) or D(level, weight) with weight in level * iota(P^vee+)."""
    m = _FACTOR.match(text)
    if not m:
        raise ParseError(f"cannot parse factor '{text}' (use V(...) or D(l,...))")
    kind, body = m.groups()
    if kind == "V":
        return irreducible_evaluation_module(parse_weight(body, rs), rs)
    parts = body.split(",")
    if len(parts) != 2:
        raise ParseError(f"D(...) needs a level and a weight: '{text}'")
    level = int(parts[0])
    mu = parse_weight(parts[1], rs)
    if level <= 0:
        if any(mu):
            raise ParseError("level 0 admits only the zero weight")
        return demazure_module_explicit(0, rs.zero, rs)
    if any(x % level for x in mu):
        raise UnsupportedError(f"explicit D({level}, {mu}) needs a weight divisible by the level")
    return demazure_module_explicit(level, tuple(x // level for x in mu), rs)


def parse_points(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in parse_list(text)]
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad evaluation points '{text}'") from None


# --- output ------------------------------------------------------------------

def _color() -> bool:
    return os.environ.get("FLFUSION_COLOR", "") not in ("", "0")


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _char_tsv(ch: dict) -> list[str]:
    lines = ["q\tweight\tmult"]
    for t in ch["terms"]:
        lines.append(f"{t['q']}\t{','.join(map(str, t['wt']))}\t{t['mult']}")
    return lines


def _char_pretty(ch: dict) -> list[str]:
    by_q: dict = {}
    for t in ch["terms"]:
        by_q.setdefault(t["q"], []).append(t)
    lines = []
    for q in sorted(by_q):
        dim = sum(t["mult"] for t in by_q[q])
        head = f"q^{q}  (dim {dim})"
        if _color():
            head = f"\033[1m{head}\033[0m"
        lines.append(head)
        for t in by_q[q]:
            lines.append(f"    {tuple(t['wt'])}: {t['mult']}")
    return lines


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump(payload)
    if "error" in payload:
        return f"error: {payload['error']}: {payload['message']}"
    lines: list[str] = []
    if "character" in payload:
        if fmt == "tsv":
            lines += _char_tsv(payload["character"])
        else:
            lines.append(f"dim {payload['dim']}")
            lines += _char_pretty(payload["character"])
        if "filtration" in payload:
            lines.append(("stages\t" if fmt == "tsv" else "stages ")
                         + ",".join(map(str, payload["filtration"]["stages"])))
    elif "claim" in payload:
        sep = "\t" if fmt == "tsv" else "  "
        if fmt == "tsv":
            lines.append("input\tequal\tqshift")
        for inst in payload["instances"]:
            lines.append(sep.join([_dump(inst["input"]), str(inst.get("equal")),
                                   str(inst.get("qshift"))]))
        lines.append(f"claim {payload['claim']}: {'pass' if payload['pass'] else 'FAIL'}"
                     f" ({len(payload['instances'])} instances, instance evidence only)")
    return "\n".join(lines)


# --- commands ----------------------------------------------------------------

def cmd_char(args) -> tuple[dict, int]:
    rs = parse_root_system(args.type)
    if args.weyl is not None:
        lam = parse_weight(args.weyl, rs)
        if not rs.is_dominant(lam):
            raise ParseError(f"{lam} is not dominant")
        ch = weyl_character(lam, rs)
        source = {"weyl": list(lam)}
    elif args.demazure is not None:
        level, mu_text = args.demazure
        level = int(level)
        mu = parse_weight(mu_text, rs)
        ch = affine_demazure_character(level, mu, rs, args.dmax)
        source = {"demazure": {"level": level, "mu": list(mu)}}
    elif args.levels is not None:
        levels = [int(x) for x in parse_list(args.levels)]
        coweights = [parse_weight(c, rs, coweight=True) for c in parse_list(args.coweights or "")]
        mu = parse_weight(args.mu or "0", rs)
        ch = chain_character(levels, coweights, mu, rs, args.dmax)
        source = {"chain": {"levels": levels, "coweights": [list(c) for c in coweights],
                            "mu": list(mu)}}
    else:
        raise ParseError("char needs one of --weyl, --demazure or --levels")
    return {"type": rs.label, **source, "dim": ch.dim, "character": ch.to_dict()}, EXIT_PASS


def cmd_fusion(args) -> tuple[dict, int]:
    rs = parse_root_system(args.type)
    mods = [parse_factor(f, rs) for f in args.factors]
    points = None if args.points is None else parse_points(args.points)
    ch, filt = fusion_product(mods, points)
    return {"type": rs.label, "factors": list(args.factors), "dim": ch.dim,
            "character": ch.to_dict(), "filtration": filt.to_dict()}, EXIT_PASS


def cmd_verify(args) -> tuple[dict, int]:
    rs = parse_root_system(args.type)
    if args.claim not in CLAIMS:
        raise ParseError(f"unknown claim '{args.claim}'; choose from {', '.join(CLAIMS)}")
    caps = Caps(height=args.cap, lmax=args.lmax, max_dim=args.max_dim)
    report = run_claim(args.claim, rs, caps, trials=args.trials, seed=args.seed,
                       D_max=args.dmax, budget=args.budget).to_dict()
    return report, EXIT_PASS if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flfusion", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("type", help="root system such as A2 or D4")
        sp.add_argument("--format", choices=("json", "tsv", "pretty"), default="json")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--dmax", type=int, default=None, help="delta-degree truncation bound")

    c = sub.add_parser("char", help="Weyl, Demazure or generalized Demazure characters")
    common(c)
    c.add_argument("--weyl", metavar="WEIGHT")
    c.add_argument("--demazure", nargs=2, metavar=("LEVEL", "WEIGHT"))
    c.add_argument("--levels", metavar="L1,...,LK,L")
    c.add_argument("--coweights", metavar="C1,...,CK")
    c.add_argument("--mu", metavar="WEIGHT")

    f = sub.add_parser("fusion", help="fusion product of explicit modules")
    common(f)
    f.add_argument("factors", nargs="+", help='factors such as "V(w1)" or "D(2,2w1)"')
    g = f.add_mutually_exclusive_group()
    g.add_argument("--points", help="comma separated distinct rationals")
    g.add_argument("--auto-points", action="store_true", help="use 0, 1, 2, ... (default)")

    v = sub.add_parser("verify", help="run an instance matrix")
    common(v)
    v.add_argument("claim", help=", ".join(CLAIMS))
    v.add_argument("--cap", type=int, default=6, help="bound on the sum of <2 rho, coweight>")
    v.add_argument("--lmax", type=int, default=3)
    v.add_argument("--trials", type=int, default=5)
    v.add_argument("--max-dim", type=int, default=None,
                   help="report instances with a larger ambient space as overflow")
    v.add_argument("--budget", type=float, default=None,
                   help="seconds; param-independence families left after it are reported as timeouts")
    return p


COMMANDS = {"char": cmd_char, "fusion": cmd_fusion, "verify": cmd_verify}


def _error(err: Exception) -> dict:
    out = {"error": type(err).__name__, "message": str(err)}
    if isinstance(err, CyclicityError):
        out.update(achieved=err.achieved, ambient=err.ambient)
    if isinstance(err, TruncationError):
        out.update(degree=str(err.degree), bound=err.bound)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = COMMANDS[args.command](args)
    except CyclicityError as err:
        payload, code = _error(err), EXIT_FAIL
    except InconsistencyError as err:
        payload, code = _error(err), EXIT_INTERNAL
    except (FusionError, ValueError) as err:
        payload, code = _error(err), EXIT_USAGE
    text = render(payload, args.format) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
