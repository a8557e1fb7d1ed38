"""Command-line front end.

Every command prints one JSON object ``{"command", "inputs", "result"}``.
Exit codes: 0 success, 2 parse or usage error, 3 point not integrable,
4 inconclusive oracle, 5 internal assertion (degree ledger).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import jsonschema

from . import bounds
from .algebra import BoundExpr, Poly
from .algebra.scalar import scalar_to_str
from .chain import Chain
from .deflicity import (DeflicityProblem, deflicity_family_symbolic, deflicity_numeric,
                        deflicity_numeric_set, deflicity_report)
from .errors import (DegreeLedgerError, DimensionError, InconclusiveError, NoethkitError,
                     ParseError, PrecisionInsufficientError)
from .local_mult import mult_isolated
from .ni_perturb import (NiSystem, build_Eprime, ni_generators, ni_member_numeric, perturb,
                         random_Q, sard_sample, verify_preservation)

EXIT_OK, EXIT_USAGE, EXIT_NOT_INTEGRABLE, EXIT_INCONCLUSIVE, EXIT_INTERNAL = 0, 2, 3, 4, 5


class NotIntegrable(NoethkitError):
    pass


class UsageError(NoethkitError):
    pass


def _schema(name: str) -> dict:
    return json.loads(resources.files("noethkit.schema").joinpath(name).read_text())


# -- chain files -------------------------------------------------------------------

class ChainFile:
    """A chain read from JSON: ``{"n", "m", "g", "delta_expected"?, "points"?}``."""

    def __init__(self, doc: dict):
        try:
            jsonschema.validate(doc, _schema("chainfile.schema.json"))
        except jsonschema.ValidationError as exc:
            raise UsageError(f"invalid chain file: {exc.message}") from exc
        n, m = doc["n"], doc["m"]
        g = doc.get("g") or [[] for _ in range(n)]
        if len(g) != n or any(len(row) != m for row in g):
            raise UsageError(f"g must be an {n}x{m} array")
        self.chain = Chain.from_strings(n, m, g)
        expected = doc.get("delta_expected")
        if expected is not None and expected != self.chain.delta:
            raise UsageError(f"chain degree {self.chain.delta} differs from delta_expected {expected}")
        self.points = {k: tuple(_number(v) for v in pt) for k, pt in doc.get("points", {}).items()}

    @classmethod
    def load(cls, path: str | Path) -> "ChainFile":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read chain file {path}: {exc}") from exc
        return cls(doc)


def _number(v) -> Fraction:
    if isinstance(v, int):
        return Fraction(v)
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {v!r}") from exc


def _load_chain(args) -> tuple[Chain, dict]:
    if getattr(args, "chain", None):
        cf = ChainFile.load(args.chain)
        return cf.chain, cf.points
    if getattr(args, "trivial", None):
        return Chain.trivial(args.trivial), {}
    raise UsageError("a chain is required (--chain FILE or --trivial N)")


def _point(args, chain: Chain, points: dict) -> tuple:
    text = args.point
    if text is None:
        raise UsageError("--point is required")
    if text in points:
        pt = points[text]
    else:
        pt = tuple(_number(v) for v in text.split(","))
    if len(pt) != chain.arena.size:
        raise UsageError(f"point needs {chain.arena.size} coordinates ({', '.join(chain.arena.names)})")
    return pt


def _polys(chain: Chain, texts: Sequence[str] | None) -> list[Poly]:
    out = []
    for t in texts or []:
        out.extend(chain.parse(part) for part in t.split(";") if part.strip())
    return out


def _require_integrable(chain: Chain, pt: tuple):
    if chain.n > 1 and chain.m > 0 and not chain.il_test(pt):
        raise NotIntegrable(f"point {_pt(pt)} fails the integrability test at depth {chain.default_depth()}")


def _pt(pt) -> list[str]:
    return [scalar_to_str(v) if not isinstance(v, float) else repr(v) for v in pt]


def _bound(b: BoundExpr, args) -> dict:
    return b.to_json(expand=getattr(args, "expand", False))


def _params(args) -> bounds.BoundParams:
    return bounds.BoundParams(args.m, args.n, args.delta, args.d)


def _chain_inputs(args, chain: Chain) -> dict:
    return {"chain": {"n": chain.n, "m": chain.m,
                      "g": [[str(e) for e in row] for row in chain.g], "delta": chain.delta}}


# -- commands ---------------------------------------------------------------------

def cmd_bounds(args) -> tuple[dict, dict]:
    p = _params(args)
    gk = bounds.gk_mult_bound(p, args.precision)
    q = gk.q
    result = {
        "d_IL": bounds.il_degree(p.m, p.n, p.delta),
        "d_IL_integral": bounds.il_degree_is_integral(p.m, p.n, p.delta),
        "rough_k": _bound(bounds.rough_mult0(p), args),
        "gk_mult": {"value": _bound(gk.value, args), "exact": gk.exact,
                    "Q": str(q) if gk.exact else [str(v) for v in q],
                    "Q_rounded": gk.q_rounded},
        "main_bound": _bound(bounds.main_bound(p), args),
        "loja_exponent": _bound(bounds.loja_exponent_bound(p), args),
    }
    if args.order is not None:
        result["d_M"] = bounds.deg_after_mo(p.n, p.delta, p.d, args.order)
    return {"m": p.m, "n": p.n, "delta": p.delta, "d": p.d, "precision": args.precision}, result


def cmd_loja(args) -> tuple[dict, dict]:
    p = _params(args)
    return ({"m": p.m, "n": p.n, "delta": p.delta, "d": p.d},
            {"loja_exponent": _bound(bounds.loja_exponent_bound(p), args)})


def cmd_verify_grid(args) -> tuple[dict, dict]:
    rows = bounds.verify_grid(args.max_mn, args.max_d, args.jobs)
    out = []
    for row in rows:
        p = row["params"]
        out.append({"m": p.m, "n": p.n, "delta": p.delta, "d": p.d,
                    "verdicts": {name: ok for name, ok in row["verdicts"]},
                    "ladder_final_le_main": row["ladder_final_le_main"],
                    "ladder_degree_le_target": row["ladder_degree_le_target"]})
    all_true = all(all(r["verdicts"].values()) and r["ladder_final_le_main"]
                   and r["ladder_degree_le_target"] for r in out)
    return {"max_mn": args.max_mn, "max_d": args.max_d}, {"all_true": all_true, "grid": out}


def cmd_derive(args) -> tuple[dict, dict]:
    chain, _ = _load_chain(args)
    (p,) = _polys(chain, [args.poly])
    word = [int(w) for w in args.word.split(",")]
    result = chain.iterated_derive(p, word)
    return ({**_chain_inputs(args, chain), "poly": str(p), "word": word},
            {"derivative": str(result), "degree": result.degree})


def cmd_jet(args) -> tuple[dict, dict]:
    chain, pts = _load_chain(args)
    (p,) = _polys(chain, [args.poly])
    pt = _point(args, chain, pts)
    _require_integrable(chain, pt)
    order = args.order if args.order is not None else 4
    jet = chain.jet(pt, p, order)
    coeffs = {"*".join(str(a) for a in alpha): scalar_to_str(c) for alpha, c in sorted(jet.coeffs.items())}
    return ({**_chain_inputs(args, chain), "poly": str(p), "point": _pt(pt), "order": order},
            {"coefficients": coeffs, "polynomial": str(jet.to_poly())})


def cmd_il(args) -> tuple[dict, dict]:
    chain, pts = _load_chain(args)
    depth = args.depth if args.depth is not None else chain.default_depth()
    gens = chain.il_generators(depth)
    result = {"depth": depth, "generators": [str(g) for g in gens]}
    inputs = {**_chain_inputs(args, chain), "depth": depth}
    if args.point is not None:
        pt = _point(args, chain, pts)
        inputs["point"] = _pt(pt)
        result["integrable"] = chain.il_test(pt, depth)
    return inputs, result


def cmd_mult(args) -> tuple[dict, dict]:
    chain, pts = _load_chain(args)
    system = _polys(chain, args.system)
    pt = _point(args, chain, pts)
    _require_integrable(chain, pt)
    order = args.order if args.order is not None else 64
    res = mult_isolated(chain, pt, system, order)
    inputs = {**_chain_inputs(args, chain), "system": [str(p) for p in system],
              "point": _pt(pt), "order": order}
    if res.value is None:
        raise InconclusiveError(f"multiplicity undecided through order {res.order}", res.order)
    return inputs, {"multiplicity": res.value, "order": res.order}


def cmd_deflicity(args) -> tuple[dict, dict]:
    if args.family:
        return _deflicity_family(args)
    chain, pts = _load_chain(args)
    system = _polys(chain, args.system)
    (R,) = _polys(chain, [args.rho])
    pt = _point(args, chain, pts)
    _require_integrable(chain, pt)
    prob = DeflicityProblem(chain, pt, tuple(system), R, args.order or 8)
    inputs = {**_chain_inputs(args, chain), "system": [str(p) for p in system], "rho": str(R),
              "point": _pt(pt), "method": args.method, "seed": args.seed}
    result: dict = {}
    if args.method in ("symbolic", "both"):
        rep = deflicity_report(prob)
        result["symbolic"] = rep.value
        result["branches"] = [{"branch": b.describe(), "multiplicity": b.multiplicity,
                               "classification": b.classification,
                               "ord": None if b.ord is None else str(b.ord)} for b in rep.branches]
    if args.method in ("numeric", "both"):
        result["numeric"] = deflicity_numeric_set(prob, seed=args.seed)
    values = {v for k, v in result.items() if k in ("symbolic", "numeric")}
    if len(values) != 1:
        raise InconclusiveError(f"symbolic and numeric deflicity disagree: {result}")
    result["deflicity"] = values.pop()
    return inputs, result


def _deflicity_family(args) -> tuple[dict, dict]:
    n = args.trivial
    if n is None:
        raise UsageError("--family needs --trivial N (number of x-variables)")
    from .algebra import Arena, poly_parse
    arena = Arena.chain(n, 0, eps=True)
    family = [poly_parse(part, arena) for t in args.family for part in t.split(";") if part.strip()]
    pt = tuple(_number(v) for v in args.point.split(",")) if args.point else (Fraction(0),) * n
    inputs = {"family": [str(p) for p in family], "point": _pt(pt), "method": args.method,
              "seed": args.seed}
    result: dict = {}
    if args.method in ("numeric", "both"):
        result["numeric"] = deflicity_numeric(family, pt, seed=args.seed)
    if args.method in ("symbolic", "both"):
        try:
            result["symbolic"] = deflicity_family_symbolic(family, pt)
        except DimensionError:
            if args.method == "symbolic":
                raise
            result["symbolic"] = None
    values = {v for k, v in result.items() if k in ("symbolic", "numeric") and v is not None}
    if len(values) != 1:
        raise InconclusiveError(f"deflicity routes disagree: {result}")
    result["deflicity"] = values.pop()
    return inputs, result


def _ni_system(args) -> tuple[NiSystem, dict, dict]:
    chain, pts = _load_chain(args)
    system = _polys(chain, args.system)
    (R,) = _polys(chain, [args.rho])
    k_hat = args.order if args.order is not None else 4
    sys_ = NiSystem(chain, tuple(system), R, k_hat)
    inputs = {**_chain_inputs(args, chain), "system": [str(p) for p in system], "rho": str(R),
              "k_hat": k_hat}
    return sys_, inputs, pts


def cmd_ni(args) -> tuple[dict, dict]:
    sys_, inputs, pts = _ni_system(args)
    result = {"generators": [str(g) for g in ni_generators(sys_)]}
    if args.point is not None:
        pt = _point(args, sys_.chain, pts)
        _require_integrable(sys_.chain, pt)
        inputs["point"] = _pt(pt)
        result["member"] = ni_member_numeric(sys_, pt)
    return inputs, result


def cmd_perturb_verify(args) -> tuple[dict, dict]:
    sys_, inputs, pts = _ni_system(args)
    chain = sys_.chain
    pt = _point(args, chain, pts)
    (Ep,) = _polys(chain, [args.eprime])
    if args.ell:
        (E,) = _polys(chain, [args.e]) if args.e else (Ep,)
        (ell,) = _polys(chain, [args.ell])
        Ep = build_Eprime(E, ell, args.A, args.B)
    Q = random_Q(chain.arena, len(sys_.P), chain.n + chain.m, args.seed)
    Pp = perturb(sys_.P, Q, Ep, sys_.k_hat)
    report = verify_preservation(sys_, Pp, pt, Ep, args.seed)
    inputs.update({"point": _pt(pt), "eprime": str(Ep), "seed": args.seed})
    return inputs, {**report.to_json(), "Q": [str(q) for q in Q], "perturbed_system": [str(p) for p in Pp]}


def cmd_sard(args) -> tuple[dict, dict]:
    sys_, inputs, pts = _ni_system(args)
    pt = _point(args, sys_.chain, pts)
    (E,) = _polys(sys_.chain, [args.e])
    rep = sard_sample(sys_, E, pt, args.trials, args.seed, args.adversarial)
    inputs.update({"point": _pt(pt), "E": str(E), "trials": args.trials, "seed": args.seed,
                   "adversarial": args.adversarial})
    return inputs, rep.to_json()


# -- parser --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chain", help="chain file (JSON)")
    common.add_argument("--trivial", type=int, metavar="N", help="use the trivial chain with N axes")
    common.add_argument("--point", help="comma-separated rational coordinates, or a named point")
    common.add_argument("--order", type=int, help="truncation or working order")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=128, help="interval precision in bits")
    common.add_argument("--json", action="store_true", help="compact single-line output")
    common.add_argument("--expand", action="store_true", help="expand big numbers below the digit cap")
    common.add_argument("--jobs", type=int, default=1)

    parser = _Parser(prog="noethkit", description="Multiplicity and deflicity toolkit for Noetherian functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    for name, fn, help_ in (("bounds", cmd_bounds, "effective bound formulas"),
                            ("loja", cmd_loja, "Lojasiewicz exponent bound")):
        p = add(name, fn, help_)
        for flag in ("--m", "--n", "--delta", "--d"):
            p.add_argument(flag, type=int, required=True)
    p = add("verify-bounds-grid", cmd_verify_grid, "verify the proof-chain inequalities on a grid")
    p.add_argument("--max-mn", type=int, default=2)
    p.add_argument("--max-d", type=int, default=3)
    p = add("derive", cmd_derive, "apply chain derivations")
    p.add_argument("--poly", required=True)
    p.add_argument("--word", required=True, help="comma-separated axes, applied left to right")
    p = add("jet", cmd_jet, "Taylor jet on the leaf")
    p.add_argument("--poly", required=True)
    p = add("il", cmd_il, "integrability locus generators")
    p.add_argument("--depth", type=int)
    p = add("mult", cmd_mult, "multiplicity of an isolated zero")
    p.add_argument("--system", action="append", required=True)
    p = add("deflicity", cmd_deflicity, "deflicity of a set or a family")
    p.add_argument("--system", action="append")
    p.add_argument("--rho")
    p.add_argument("--family", action="append", help="family polynomials in x and eps")
    p.add_argument("--method", choices=("symbolic", "numeric", "both"), default="symbolic")
    for name, fn, help_ in (("ni", cmd_ni, "non-isolated intersection locus"),
                            ("perturb-verify", cmd_perturb_verify, "check deflicity preservation"),
                            ("sard", cmd_sard, "sample random perturbations")):
        p = add(name, fn, help_)
        p.add_argument("--system", action="append", default=[])
        p.add_argument("--rho", required=True)
        if name == "perturb-verify":
            p.add_argument("--eprime", required=True)
            p.add_argument("--e")
            p.add_argument("--ell")
            p.add_argument("--A", type=int, default=2)
            p.add_argument("--B", type=int, default=2)
        if name == "sard":
            p.add_argument("--e", required=True)
            p.add_argument("--trials", type=int, default=20)
            p.add_argument("--adversarial", action="store_true")
    return parser


def _emit(doc: dict, compact: bool) -> None:
    if compact:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        print(json.dumps(doc, sort_keys=True, indent=2))


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    compact = "--json" in argv
    command = next((a for a in argv if not a.startswith("-")), None)
    try:
        args = parser.parse_args(argv)
        inputs, result = args.fn(args)
        code = EXIT_OK
        doc = {"command": args.command, "inputs": inputs, "result": result}
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (ParseError, UsageError, DimensionError, ValueError) as exc:
        code, doc = EXIT_USAGE, _error(command, exc)
    except NotIntegrable as exc:
        code, doc = EXIT_NOT_INTEGRABLE, _error(command, exc)
    except (InconclusiveError, PrecisionInsufficientError) as exc:
        code, doc = EXIT_INCONCLUSIVE, _error(command, exc)
    except (DegreeLedgerError, AssertionError) as exc:
        code, doc = EXIT_INTERNAL, _error(command, exc)
    except NoethkitError as exc:
        code, doc = EXIT_USAGE, _error(command, exc)
    _emit(doc, compact)
    return code


def _error(command, exc: Exception) -> dict:
    return {"command": command, "error": {"type": type(exc).__name__, "message": str(exc)}}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
