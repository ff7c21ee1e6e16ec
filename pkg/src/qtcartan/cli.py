"""Command-line front end.

Exit codes: 0 success, 2 unreadable input, 3 failed validation or
precondition, 4 disagreement between methods or a failed invariant.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from .braid import (
    HeightFunctionError,
    InternalConsistencyError,
    PeriodicWord,
    all_methods,
    check_braid_relations,
    check_height,
    coxeter_word,
    default_height,
    extract_longest_monomial,
    invert_bipartite,
    invert_coxeter,
    invert_series,
    invert_word,
    word_from_strings,
)
from .cartan import CartanError, GcmInput, ParseError, deformed_cartan, kp_compare, load_gcm_file
from .ep import TruncationError, ep_E_S, ep_S_S, ext_dim
from .gamma import LaurentPoly, render_monomial, render_poly, specialize
from .weyl import coxeter_data

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_DISAGREE = 4

METHODS = ("series", "coxeter", "bipartite", "word", "all")


class _Precondition(Exception):
    pass


class _Emitter:
    """Writes matrices as text tables or as ``(i, j, monomial, coeff)`` records."""

    def __init__(self, out: TextIO, mode: str, mu_one: bool):
        self.out = out
        self.mode = mode
        self.mu_one = mu_one

    def line(self, text: str = "") -> None:
        self.out.write(text + "\n")

    def _prep(self, p: LaurentPoly) -> LaurentPoly:
        return specialize(p, mu=True) if self.mu_one else p

    def matrix(self, name: str, polys, suffix: str = "") -> None:
        n = len(polys)
        for i in range(n):
            for j in range(n):
                p = self._prep(polys[i][j])
                if self.mode == "records":
                    for m, c in p.items():
                        self.line(f"{name}\t{i + 1}\t{j + 1}\t{render_monomial(m)}\t{c}")
                else:
                    self.line(f"{name}[{i + 1},{j + 1}] = {render_poly(p)}{suffix}")


def _load(path: str) -> GcmInput:
    try:
        return load_gcm_file(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None


def _word(args, g) -> PeriodicWord | None:
    if args.prefix is None and args.period is None:
        return None
    word = word_from_strings(args.prefix or "", args.period or "")
    if any(not 0 <= k < g.n for k in word.prefix + word.period):
        raise _Precondition("word letters must be vertex indices 1..n")
    return word


def _height(inp: GcmInput):
    return inp.height if inp.height is not None else default_height(inp.gcm)


def cmd_validate(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    em.line(f"D = diag({', '.join(map(str, g.d))})")
    em.line(f"type = {'finite' if g.is_finite else 'infinite'}")
    em.line(f"condf = {str(g.satisfies_condf()).lower()}")
    em.line(f"r = {g.r}")
    em.line("orientation = " + " ".join(f"{i + 1}->{j + 1}" for i, j in g.orientation))
    if g.is_finite:
        cd = coxeter_data(g)
        em.line(f"h = {cd.h}")
        em.line(f"h_dual = {cd.h_dual}")
    return EXIT_OK


def cmd_deform(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    cm = deformed_cartan(g)
    em.matrix("C", [[cm[i, j] for j in range(g.n)] for i in range(g.n)])
    return EXIT_OK


def _run_method(name: str, inp: GcmInput, args):
    g, n = inp.gcm, args.trunc
    if name == "series":
        return invert_series(g, n)
    if name == "coxeter":
        return invert_coxeter(g, n)
    if name == "bipartite":
        xi = _height(inp)
        if xi is None:
            raise _Precondition("bipartite method needs a height function in the input file")
        return invert_bipartite(g, xi, n)
    word = _word(args, g)
    if word is None:
        raise _Precondition("word method needs --prefix and/or --period")
    return invert_word(g, word, n)


def cmd_invert(inp: GcmInput, args, em: _Emitter) -> int:
    suffix = f" + O(t^{args.trunc + 1})" if em.mode == "text" else ""
    if args.method != "all":
        res = _run_method(args.method, inp, args)
        for flag in res.flags:
            em.line(f"# flag: {flag}")
        em.matrix("Ct", res.polys(), suffix)
        return EXIT_OK
    g = inp.gcm
    if inp.height is not None:
        check_height(g, inp.height)
    results = all_methods(g, args.trunc, xi=_height(inp), word=_word(args, g) or coxeter_word(g))
    base = results["series"]
    bad = []
    for name, res in results.items():
        if name == "series":
            continue
        for i, j in base.agrees_with(res, args.trunc):
            bad.append((name, i, j))
    em.line("# methods: " + ", ".join(results))
    if bad:
        for name, i, j in bad:
            em.line(f"# disagreement: series vs {name} at entry ({i + 1},{j + 1})")
    else:
        em.line("# methods agree")
    em.matrix("Ct", base.polys(), suffix)
    return EXIT_DISAGREE if bad else EXIT_OK


def cmd_braid_check(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    failed = False
    for i in range(g.n):
        for j in range(i + 1, g.n):
            chk = check_braid_relations(g, i, j)
            status = "holds" if chk.holds else "FAILS"
            note = f" ({chk.note})" if chk.note else ""
            em.line(f"({i + 1},{j + 1}) {chk.relation}: {status}{note}")
            failed |= not chk.holds
    return EXIT_DISAGREE if failed else EXIT_OK


def cmd_longest(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    if not g.is_finite:
        raise _Precondition("root system not finite")
    lm = extract_longest_monomial(g)
    em.line(f"r*h_dual = {lm.rh_dual}")
    em.line(f"h = {lm.h}")
    for i in range(g.n):
        em.line(f"nu(a{i + 1}) = {render_monomial(lm.nu_mu[i])} a{lm.nu_perm[i] + 1}")
    cd = coxeter_data(g)
    if (lm.rh_dual, lm.h) != (g.r * cd.h_dual, cd.h):
        em.line(f"# mismatch with Weyl data: r*h_dual = {g.r * cd.h_dual}, h = {cd.h}")
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_kp(inp: GcmInput, args, em: _Emitter) -> int:
    rep = kp_compare(inp.gcm, inp.quiver_edges)
    em.line(f"condf = {str(rep.condf).lower()}")
    em.line(f"equal = {str(rep.equal).lower()}")
    for i, j in rep.mismatches:
        em.line(f"# differs at ({i + 1},{j + 1})")
    em.matrix("KP", rep.transformed)
    return EXIT_OK


def _index(g, k: int | None, flag: str) -> int:
    if k is None:
        raise _Precondition(f"{flag} is required")
    if not 1 <= k <= g.n:
        raise _Precondition(f"{flag} must be in 1..{g.n}")
    return k - 1


def _closed_form(em: _Emitter, label: str, cf) -> None:
    num = specialize(cf.numerator, mu=True) if em.mu_one else cf.numerator
    if em.mode == "records":
        for m, c in num.items():
            em.line(f"{label}\tnumerator\t{render_monomial(m)}\t{c}")
        for gam, d in zip(cf.denom_factors, cf.directions):
            em.line(f"{label}\tdenominator\t{render_monomial(gam)}\t{d}")
        return
    em.line(f"{label} numerator = {render_poly(num)}")
    dens = " ".join(f"(1 - {render_monomial(gam)})" for gam in cf.denom_factors)
    em.line(f"{label} denominator = {dens or '1'}")
    em.line(f"{label} directions = {' '.join(cf.directions) or '-'}")


def cmd_ep(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    i, j = _index(g, args.i, "--i"), _index(g, args.j, "--j")
    _closed_form(em, "<E,S>", ep_E_S(g, i, j))
    if args.ell is not None:
        if args.ell < 1:
            raise _Precondition("--ell must be a positive integer")
        _closed_form(em, "<S,S>", ep_S_S(g, i, j, args.ell))
    return EXIT_OK


def cmd_ext_dim(inp: GcmInput, args, em: _Emitter) -> int:
    g = inp.gcm
    i, j = _index(g, args.i, "--i"), _index(g, args.j, "--j")
    if args.k is None or args.l is None:
        raise _Precondition("--k and --l are required")
    xi = _height(inp)
    if xi is None:
        raise _Precondition("ext-dim needs a height function in the input file")
    em.line(str(ext_dim(g, xi, i, args.k, j, args.l, args.trunc)))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "deform": cmd_deform,
    "invert": cmd_invert,
    "braid-check": cmd_braid_check,
    "longest": cmd_longest,
    "kp": cmd_kp,
    "ep": cmd_ep,
    "ext-dim": cmd_ext_dim,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="YAML or JSON file with a 'cartan' field")
    common.add_argument("--output", choices=("text", "records"), default="text")
    common.add_argument("--mu", choices=("keep", "one"), default="keep",
                        help="'one' sets every mass parameter to 1 before printing")
    common.add_argument("--trunc", type=int, default=20, help="t-adic truncation order")

    parser = argparse.ArgumentParser(prog="qtcartan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "invert":
            p.add_argument("--method", choices=METHODS, default="series")
            p.add_argument("--prefix", help="word prefix, space separated 1-based indices")
            p.add_argument("--period", help="word period, space separated 1-based indices")
        if name in ("ep", "ext-dim"):
            p.add_argument("--i", type=int)
            p.add_argument("--j", type=int)
        if name == "ep":
            p.add_argument("--ell", type=int)
        if name == "ext-dim":
            p.add_argument("--k", type=int)
            p.add_argument("--l", type=int)
    return parser


def run(argv: Sequence[str], out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    if args.trunc < 0:
        err.write("error: --trunc must be nonnegative\n")
        return EXIT_PRECONDITION
    em = _Emitter(out, args.output, args.mu == "one")
    try:
        inp = _load(args.input)
        return COMMANDS[args.command](inp, args, em)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (CartanError, HeightFunctionError, TruncationError, _Precondition, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PRECONDITION
    except (InternalConsistencyError, AssertionError) as exc:
        err.write(f"invariant failure: {exc}\n")
        return EXIT_DISAGREE


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
