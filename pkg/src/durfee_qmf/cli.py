"""Command-line front end.  Every subcommand prints one JSON document on stdout.

Top-level keys: ``command, inputs, outputs, residuals, errors, timing_ms``.  The
exit code is 0 exactly when every asserted tolerance is met and no error was
raised.  Complex numbers are written as ``[re, im]``; floats carry 17
significant digits.
"""

from __future__ import annotations

import argparse
import functools
import logging
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any

log = logging.getLogger("durfee_qmf")


# ---------------------------------------------------------------------------
# JSON with 17 significant digits


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    import json

    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return f"[{_num(obj.real)}, {_num(obj.imag)}]"
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "as_dict"):
        return to_json(obj.as_dict(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    try:  # numpy scalars
        return to_json(obj.item(), indent, _level)
    except AttributeError:
        return json.dumps(str(obj))


# ---------------------------------------------------------------------------
# config files and threads


def read_config(path: str) -> list[str]:
    """``key = value`` lines become ``--key value`` flags; ``#`` starts a comment."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("_", "-")
            if not sep:
                out.append(f"--{key}")
                continue
            out.extend([f"--{key}", value.strip()])
    return out


def thread_count(flag: int | None) -> int:
    env = os.environ.get("QMF_THREADS")
    if env:
        return max(1, int(env))
    return max(1, flag or 1)


# ---------------------------------------------------------------------------
# subcommands


class Result:
    def __init__(self, command: str, inputs: dict):
        self.doc = {"command": command, "inputs": inputs, "outputs": {}, "residuals": {}, "errors": []}
        self.ok = True

    def residual(self, name: str, value: float, tol: float) -> None:
        passed = bool(value < tol)
        self.doc["residuals"][name] = {"value": value, "tol": tol, "ok": passed}
        self.ok &= passed

    def error(self, message: str) -> None:
        self.doc["errors"].append(message)
        self.ok = False


def _zeta(text: str, res: Result):
    from .quantumset import RootVector

    return RootVector.parse(text)


def cmd_validate(args, res: Result) -> None:
    from .quantumset import RootVector, ell_of, unchecked_root_vector

    try:
        pairs = [tuple(int(p) for p in tok.split("/")) for tok in args.zeta.replace(" ", "").split(",") if tok]
    except ValueError:
        res.error(f"cannot parse {args.zeta!r}; expected a/b,c/d,...")
        return
    problems = unchecked_root_vector(pairs).problems()
    res.doc["outputs"]["valid"] = not problems
    res.doc["outputs"]["problems"] = problems
    if problems:
        for p in problems:
            res.error(p)
        return
    res.doc["outputs"]["ell"] = ell_of(RootVector(tuple(pairs)))


def cmd_qset_check(args, res: Result) -> None:
    from .quantumset import quantum_set_violation

    zeta = _zeta(args.zeta, res)
    why = quantum_set_violation(zeta, Fraction(args.x))
    res.doc["outputs"]["member"] = why is None
    if why is not None:
        res.doc["outputs"]["violated"] = why


def cmd_qset_pool(args, res: Result) -> None:
    from .quantumset import is_in_quantum_set

    zeta = _zeta(args.zeta, res)
    pts = [Fraction(h, k) for k in range(1, args.kmax + 1) for h in range(k)
           if math.gcd(h, k) == 1 and is_in_quantum_set(zeta, Fraction(h, k))]
    res.doc["outputs"]["points_mod_1"] = [str(p) for p in pts]
    res.doc["outputs"]["denominators"] = sorted({p.denominator for p in pts})


def cmd_eval_rn(args, res: Result) -> None:
    from .ranksum import radial_limit_probe, rn_finite_sum

    zeta = _zeta(args.zeta, res)
    x = Fraction(args.x)
    fin = rn_finite_sum(zeta, x)
    res.doc["outputs"]["finite_sum"] = fin.as_dict()
    if args.mode == "radial":
        heights = [float(h) for h in args.heights.split(",")] if args.heights else [1 - 2.0**-m for m in range(3, 11)]
        seq = radial_limit_probe(zeta, x, heights)
        gaps = [abs(v - fin.value) for v in seq]
        res.doc["outputs"]["radial"] = [{"t": t, "value": v, "gap": g} for t, v, g in zip(heights, seq, gaps)]
        res.residual("final_gap", gaps[-1], args.tol)


def cmd_verify(args, res: Result) -> None:
    from . import checks

    if args.what == "qmf":
        return cmd_verify_qmf(args, res)
    battery = {"eta": checks.eta_battery, "zwegers": checks.zwegers_battery,
               "appell": checks.appell_battery}[args.what]
    records = battery(seed=args.grid_seed)
    res.doc["outputs"]["table"] = records
    res.doc["outputs"]["summary"] = checks.summarize(records)
    worst = max(r["residual"] / r["tol"] for r in records)
    res.residual("worst_residual_over_tol", worst, 1.0)


def cmd_verify_qmf(args, res: Result) -> None:
    from .qmf import cocycle_report
    from .ranksum import solve_pi_dagger

    if not args.zeta or not args.x:
        res.error("verify qmf needs --zeta and --x")
        return
    zeta = _zeta(args.zeta, res)
    pi = solve_pi_dagger(zeta)
    rep = cocycle_report(zeta, Fraction(args.x), pi, args.word)
    res.doc["outputs"]["report"] = rep.as_dict()
    res.doc["outputs"]["pi_dagger"] = pi.as_dict()
    res.residual("two_way", rep.residual, args.tol)


def cmd_pi_dagger(args, res: Result) -> None:
    from .ranksum import default_taus, solve_pi_dagger

    zeta = _zeta(args.zeta, res)
    taus = default_taus(args.samples, seed=args.seed)
    sol = solve_pi_dagger(zeta, taus)
    res.doc["outputs"]["solution"] = sol.as_dict()
    res.residual("held_out", sol.residual, sol.threshold)
    res.residual("stability", sol.stability, 1e-7)


# ---------------------------------------------------------------------------


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--threads", type=int, help="worker threads (QMF_THREADS overrides)",
                   **(kw or {"default": None}))
    p.add_argument("--seed", type=int, help="random seed", **(kw or {"default": 42}))
    p.add_argument("-v", "--verbose", action="store_true", **kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="durfee-qmf", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="file of 'key = value' lines, one flag per line")
    _global_options(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser = functools.partial(sub.add_parser, parents=[common])

    s = sub.add_parser("validate-zeta")
    s.add_argument("--zeta", required=True)
    s.set_defaults(func=cmd_validate)

    q = sub.add_parser("qset").add_subparsers(dest="qset_cmd", required=True)
    q.add_parser = functools.partial(q.add_parser, parents=[common])
    s = q.add_parser("check")
    s.add_argument("--zeta", required=True)
    s.add_argument("--x", required=True)
    s.set_defaults(func=cmd_qset_check)
    s = q.add_parser("pool")
    s.add_argument("--zeta", required=True)
    s.add_argument("--kmax", type=int, default=12)
    s.set_defaults(func=cmd_qset_pool)

    ev = sub.add_parser("eval").add_subparsers(dest="eval_cmd", required=True)
    ev.add_parser = functools.partial(ev.add_parser, parents=[common])
    s = ev.add_parser("rn")
    s.add_argument("--zeta", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--mode", choices=["finite", "radial"], default="finite")
    s.add_argument("--heights", help="comma-separated radii in (0, 1)")
    s.add_argument("--tol", type=float, default=1e-3, help="final radial gap tolerance")
    s.set_defaults(func=cmd_eval_rn)

    s = sub.add_parser("verify")
    s.add_argument("what", choices=["eta", "zwegers", "appell", "qmf"])
    s.add_argument("--grid-seed", type=int, default=2024)
    s.add_argument("--zeta")
    s.add_argument("--x")
    s.add_argument("--word", default="S", choices=["S", "T"])
    s.add_argument("--tol", type=float, default=1e-5)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("pi-dagger")
    s.add_argument("--zeta", required=True)
    s.add_argument("--samples", type=int, default=12)
    s.set_defaults(func=cmd_pi_dagger)
    return p


def _expand_config(argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    extra = read_config(argv[i + 1])
    rest = argv[:i] + argv[i + 2:]
    # options from the file go after the subcommand words so subparsers see them
    return rest + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _expand_config(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    threads = thread_count(args.threads)
    name = " ".join(w for w in [args.command, getattr(args, "qset_cmd", None),
                                getattr(args, "eval_cmd", None), getattr(args, "what", None)] if w)
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("func", "command", "qset_cmd", "eval_cmd", "what", "verbose") and v is not None}
    inputs["threads"] = threads
    res = Result(name, inputs)
    t0 = time.perf_counter()
    try:
        args.func(args, res)
    except Exception as exc:  # reported in the JSON document, and on stderr
        log.error("%s: %s", type(exc).__name__, exc)
        res.error(f"{type(exc).__name__}: {exc}")
    res.doc["timing_ms"] = (time.perf_counter() - t0) * 1000
    print(to_json(res.doc))
    return 0 if res.ok else 1


if __name__ == "__main__":
    sys.exit(main())
