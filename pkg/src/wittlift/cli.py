"""Command-line interface: every command prints one JSON document on stdout.

Exit codes: 0 on success, 1 on a computation error (the JSON is then an
``{"error": {...}}`` object), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import canlift, crysfrob, frobord, qfsplit
from .errors import InconsistentInputError, WittliftError
from .exactring import Modulus, PolyParseError, is_prime, parse_poly
from .fsplit import build_splitting, fedder_fsplit_test
from .hassewitt import hasse_scalar, is_smooth


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    slack: int | None = None
    D: int | None = None
    output: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.p is not None and (self.p < 3 or not is_prime(self.p)):
            raise UsageError(f"-p must be an odd prime, got {self.p}")
        if self.slack is not None and self.slack < 2:
            raise UsageError("--slack must be at least 2")
        if self.D is not None and self.D < 1:
            raise UsageError("-D must be at least 1")


def _pair(text: str):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'a,b', got {text!r}") from None
    return a, b


def _id_list(text: str):
    try:
        ids = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of criteria, got {text!r}") from None
    if not ids or any(i not in range(1, 11) for i in ids):
        raise argparse.ArgumentTypeError("criteria are numbered 1 to 10")
    return ids


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wittlift", description="Canonical lifts, Frobenius and Witt vectors mod p^2.")
    parser.add_argument("-o", "--output", help="also write the JSON report to this file")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def prime(sp):
        sp.add_argument("-p", type=int, required=True, help="odd prime")

    sp = sub.add_parser("hasse", help="Hasse scalar of a Weierstrass curve or CY hypersurface")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", type=_pair, metavar="a,b")
    src.add_argument("--poly", metavar="SRC")
    prime(sp)

    sp = sub.add_parser("fsplit", help="Fedder test for a hypersurface")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", metavar="SRC")
    src.add_argument("--curve", type=_pair, metavar="a,b")
    prime(sp)

    sp = sub.add_parser("canlift", help="canonical lift mod p^2")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", type=_pair, metavar="a,b")
    src.add_argument("--poly", metavar="SRC")
    src.add_argument("--legendre", action="store_true")
    prime(sp)
    sp.add_argument("-D", type=int, help="series degree for --legendre (default p^2)")

    sp = sub.add_parser("frobmat", help="crystalline Frobenius matrix mod p^2")
    sp.add_argument("--curve", type=_pair, metavar="a,b", required=True)
    sp.add_argument("--lift", type=_pair, metavar="at,bt", help="lift to use (default: canonical if ordinary)")
    sp.add_argument("--slack", type=int, help="precision slack (default 2 or $WITTLIFT_SLACK)")
    prime(sp)

    sp = sub.add_parser("uniq-test", help="enumerate the F^1-preserving lifts of a curve")
    sp.add_argument("--curve", type=_pair, metavar="a,b", required=True)
    sp.add_argument("--workers", type=int, default=None)
    prime(sp)

    sp = sub.add_parser("coords", help="multiplicative coordinates of a Frobenius lift")
    sp.add_argument("--lift", required=True, metavar="f1;...;fr", help="the f_i in t_i -> t_i^p + p f_i")
    sp.add_argument("--vars", help="comma-separated variable order (default: sorted letters)")
    sp.add_argument("-D", type=int, help="truncation degree (default max(p^2, 12))")
    prime(sp)

    sp = sub.add_parser("qfsplit", help="quasi-F-split height of an elliptic curve")
    sp.add_argument("--curve", type=_pair, metavar="a,b", required=True)
    prime(sp)

    sp = sub.add_parser("suite", help="run the acceptance battery")
    sp.add_argument("--only", type=_id_list, metavar="1,2,...", help="run a subset of criteria")
    return parser


def _config(ns) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "p", "slack", "D", "output")}
    cfg = RunConfig(ns.command, getattr(ns, "p", None), getattr(ns, "slack", None), getattr(ns, "D", None), ns.output, params)
    if cfg.slack is None and cfg.command == "frobmat":
        try:
            cfg.slack = crysfrob.default_slack()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


def _poly(src: str, p: int):
    try:
        return parse_poly(src, Modulus(p))
    except PolyParseError as exc:
        raise UsageError(f"cannot parse polynomial: {exc}") from None


def cmd_hasse(cfg: RunConfig):
    p = cfg.p
    if cfg.params["curve"] is not None:
        a, b = cfg.params["curve"]
        c = hasse_scalar(a, b, p)
        return {"hasse_scalar": c, "ordinary": c != 0, "smooth": is_smooth(a, b, p)}
    res = fedder_fsplit_test(_poly(cfg.params["poly"], p))
    return {"hasse_scalar": res.hasse_scalar, "ordinary": res.split}


def cmd_fsplit(cfg: RunConfig):
    p = cfg.p
    if cfg.params["curve"] is not None:
        f = canlift.weierstrass_form(*cfg.params["curve"], p)
    else:
        f = _poly(cfg.params["poly"], p)
    res = fedder_fsplit_test(f)
    return {"split": res.split, "hasse_scalar": res.hasse_scalar}


def cmd_canlift(cfg: RunConfig):
    p = cfg.p
    if cfg.params["legendre"]:
        return canlift.legendre_modular_frobenius(p, cfg.D).to_json()
    if cfg.params["curve"] is not None:
        return canlift.weierstrass_canonical_lift(*cfg.params["curve"], p).to_json()
    f = _poly(cfg.params["poly"], p)
    split = build_splitting(f)
    lifted = canlift.lifted_equation(f, split)
    return {"p": p, "form": str(f), "lifted": str(lifted), "lifted_json": lifted.to_json()}


def cmd_frobmat(cfg: RunConfig):
    p = cfg.p
    a, b = cfg.params["curve"]
    lift = cfg.params["lift"]
    if lift is not None:
        kind = "given"
        if (lift[0] - a) % p or (lift[1] - b) % p:
            raise InconsistentInputError("lift does not reduce to the curve", curve=[a % p, b % p], lift=list(lift))
        at, bt = lift
    elif hasse_scalar(a, b, p) and is_smooth(a, b, p):
        kind = "canonical"
        cl = canlift.weierstrass_canonical_lift(a, b, p)
        at, bt = cl.a_tilde, cl.b_tilde
    else:
        kind = "naive"
        at, bt = a, b
    out = crysfrob.frobenius_matrix(at, bt, p, slack=cfg.slack).to_json()
    out["lift"] = kind
    out["slack"] = cfg.slack
    return out


def cmd_uniq(cfg: RunConfig):
    a, b = cfg.params["curve"]
    return crysfrob.uniqueness_report(a, b, cfg.p, workers=cfg.params["workers"])


def cmd_coords(cfg: RunConfig):
    p = cfg.p
    srcs = [s for s in cfg.params["lift"].split(";")]
    vars = tuple(v.strip() for v in cfg.params["vars"].split(",")) if cfg.params["vars"] else None
    try:
        F = frobord.FrobeniusLift.from_strings(srcs, p, vars)
    except PolyParseError as exc:
        raise UsageError(f"cannot parse lift: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    D = frobord.default_degree(p) if cfg.D is None else cfg.D
    if not frobord.is_ordinary_lift(F):
        return {
            "p": p,
            "D": D,
            "vars": list(F.vars),
            "ordinary": False,
            "teichmuller_point": list(frobord.teichmuller_point(F)),
            "fixed_forms": None,
            "q_tilde": None,
        }
    return frobord.multiplicative_coordinates(F, D).to_json()


def cmd_qfsplit(cfg: RunConfig):
    a, b = cfg.params["curve"]
    return qfsplit.qf_height_elliptic(a, b, cfg.p).to_json()


def cmd_suite(cfg: RunConfig):
    from .suite import report_lines, run_suite

    report = run_suite(cfg.params["only"])
    for line in report_lines(report):
        print(line, file=sys.stderr)
    return report


COMMANDS = {
    "hasse": cmd_hasse,
    "fsplit": cmd_fsplit,
    "canlift": cmd_canlift,
    "frobmat": cmd_frobmat,
    "uniq-test": cmd_uniq,
    "coords": cmd_coords,
    "qfsplit": cmd_qfsplit,
    "suite": cmd_suite,
}


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True) + "\n"


def run(argv) -> tuple[int, str]:
    """Execute one command; returns (exit code, stdout text)."""
    try:
        ns = build_parser().parse_args(list(argv))
        cfg = _config(ns)
        payload = COMMANDS[cfg.command](cfg)
        code = 0
    except UsageError as exc:
        return 2, str(exc)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0), ""
    except WittliftError as exc:
        payload = exc.to_json()
        code = 1
        cfg = None
    except (ValueError, ArithmeticError) as exc:
        payload = {"error": {"code": "invalid_input", "message": str(exc), "context": {}}}
        code = 1
        cfg = None
    text = dumps(payload)
    if cfg is not None and cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code, text


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, text = run(argv)
    if code == 2:
        build_parser().print_usage(sys.stderr)
        print(text, file=sys.stderr)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
