"""Command-line interface: ``modsat <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .boolfn import Base, parse_base
from .circuit import ModalCircuit
from .classify import Instance, classify, parse_ops
from .errors import ModsatError, ParseError
from .kripke import FRAMES, KripkeModel, brute_force_sat, brute_force_valid, frame_in_class, holds, oracle_equivalent
from .parsing import parse_circuit
from .tableau import ALL_ENGINES, solve
from .verdict import INVALID, SAT, UNKNOWN, UNSAT, VALID
from .xorsat import is_xor_circuit, xor_equivalent, xor_normalize

log = logging.getLogger("modsat")

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(ModsatError):
    pass


# ---------------------------------------------------------------------------
# input helpers


def load_base(arg: str | None) -> Base | None:
    """A base file path, or a comma-separated list of builtin names."""
    if arg is None:
        return None
    path = Path(arg)
    if path.is_file():
        try:
            return parse_base(path.read_text())
        except ParseError as e:
            raise ParseError(f"{path}: {e}") from None
    try:
        return Base.from_names(*[t for t in arg.replace(" ", ",").split(",") if t])
    except KeyError:
        raise UsageError(f"--base {arg!r} is neither a file nor a list of builtin functions") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such input file: {path}")
    return p.read_text()


def load_circuit(path: str, base: Base | None, k: int | None) -> ModalCircuit:
    text = _read(path)
    try:
        return parse_circuit(text, base, k)
    except ModsatError as e:
        e.args = (f"{path}: {e}",)
        raise


def _emit(obj, fmt: str, text: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


def _witness_text(w: dict | None) -> str:
    if w is None:
        return ""
    rels = "; ".join(f"R{i}={[tuple(e) for e in es]}" for i, es in w["relations"].items())
    vals = "; ".join(f"{x}={ws}" for x, ws in w["valuation"].items())
    return f"\n  worlds={len(w['worlds'])} root={w['root']}\n  {rels}\n  {vals}"


_EXIT_OF = {SAT: EXIT_TRUE, VALID: EXIT_TRUE, UNSAT: EXIT_FALSE, INVALID: EXIT_FALSE, UNKNOWN: EXIT_UNKNOWN}


def _combine(codes: list[int]) -> int:
    if EXIT_UNKNOWN in codes:
        return EXIT_UNKNOWN
    if EXIT_FALSE in codes:
        return EXIT_FALSE
    return EXIT_TRUE


# ---------------------------------------------------------------------------
# subcommands


def _solve_one(job) -> tuple[dict, str, int]:
    path, base_arg, k, frame, task, engine, bound = job
    base = load_base(base_arg)
    c = load_circuit(path, base, k)
    v = solve(c, frame, task, base=base, engine=engine, max_worlds=bound)
    d = v.to_dict()
    d["input"] = path
    d["frame"] = frame
    text = f"{path}: {v.answer} (engine {v.engine}, frame {frame}){_witness_text(d['witness'])}"
    return d, text, _EXIT_OF[v.answer]


def cmd_solve(args, task: str) -> int:
    jobs = [(p, args.base, args.k, args.frame, task, args.engine, args.bound_worlds) for p in args.inputs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_solve_one, jobs))
    else:
        results = [_solve_one(j) for j in jobs]
    for d, text, _ in results:
        _emit(d, args.format, text)
    return _combine([code for _, _, code in results])


def cmd_classify(args) -> int:
    base = load_base(args.base)
    if base is None:
        raise UsageError("classify needs --base")
    inst = Instance(base, args.frame, parse_ops(args.ops), args.k or 1, args.repr, args.task)
    v = classify(inst)
    _emit(v.to_dict(), args.format, f"{v.cls} ({v.citation}; engine {v.engine_hint})")
    return EXIT_TRUE


def cmd_normalize(args) -> int:
    base = load_base(args.base)
    c = load_circuit(args.input, base, args.k)
    share = None if args.share == "auto" else args.share == "on"
    out = xor_normalize(c, args.frame, share)
    netlist = out.to_netlist()
    _emit({"netlist": netlist, "gates": out.size, "input_gates": c.pruned().size}, args.format, netlist.rstrip("\n"))
    return EXIT_TRUE


def cmd_equiv(args) -> int:
    base = load_base(args.base)
    a = load_circuit(args.a, base, args.k)
    b = load_circuit(args.b, base, args.k)
    if is_xor_circuit(a) and is_xor_circuit(b) and args.frame in ("K", "KD"):
        answer, method = ("true" if xor_equivalent(a, b, args.frame) else "false"), "xor-normal-form"
    else:
        res = oracle_equivalent(a, b, args.frame, max_worlds=args.bound_worlds)
        answer = {"EQUIVALENT": "true", "DIFFERENT": "false"}.get(res, "unknown")
        method = "oracle"
    _emit({"equivalent": answer, "method": method}, args.format, answer)
    return {"true": EXIT_TRUE, "false": EXIT_FALSE}.get(answer, EXIT_UNKNOWN)


def cmd_dual(args) -> int:
    base = load_base(args.base)
    c = load_circuit(args.input, base, args.k)
    d = c.pruned().dualize()
    netlist = d.to_netlist()
    extra = ""
    if base is not None:
        extra = base.dual().to_text()
    _emit({"netlist": netlist, "base": extra}, args.format, netlist.rstrip("\n"))
    return EXIT_TRUE


def cmd_oracle(args) -> int:
    base = load_base(args.base)
    c = load_circuit(args.input, base, args.k)
    if args.check_witness:
        try:
            data = json.loads(_read(args.check_witness))
            if isinstance(data, dict) and "witness" in data:
                data = data["witness"]  # a full verdict from `modsat sat`
            model = KripkeModel.from_dict(data)
        except (ValueError, KeyError, TypeError) as e:
            raise ParseError(f"{args.check_witness}: bad witness: {e}") from None
        in_frame = frame_in_class(model, args.frame)
        value = holds(model, model.root, c)
        ok = in_frame and (value if args.task == "sat" else not value)
        _emit(
            {"frame_ok": in_frame, "holds": value, "ok": ok},
            args.format,
            f"witness {'verified' if ok else 'REJECTED'} (frame {args.frame}: {in_frame}, holds at root: {value})",
        )
        return EXIT_TRUE if ok else EXIT_FALSE
    if args.task == "sat":
        res = brute_force_sat(c, args.frame, max_worlds=args.bound_worlds)
        code = _EXIT_OF[res.answer]
    else:
        res = brute_force_valid(c, args.frame, max_worlds=args.bound_worlds)
        code = {"VALID": EXIT_TRUE, "FALSIFIABLE": EXIT_FALSE}.get(res.answer, EXIT_UNKNOWN)
    w = None if res.witness is None else res.witness.to_dict()
    _emit(
        {"answer": res.answer, "method": res.method, "witness": w},
        args.format,
        f"{res.answer} ({res.method}){_witness_text(w)}",
    )
    return code


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all(seed=args.seed, quick=not args.full)
    ok = True
    for r in results:
        ok &= r.passed
        _emit(r.to_dict(), args.format, r.line())
    return EXIT_TRUE if ok else EXIT_FALSE


# ---------------------------------------------------------------------------
# argument parsing


def _frame(value: str) -> str:
    v = value.upper()
    if v not in FRAMES:
        raise argparse.ArgumentTypeError(f"frame must be one of {', '.join(FRAMES)}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--frame", type=_frame, default="K", help="frame class: " + ", ".join(FRAMES))
    common.add_argument("--base", help="base file (NAME ARITY BITS per line) or comma-separated builtins")
    common.add_argument("--k", type=int, default=None, help="number of modalities")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--bound-worlds", type=int, default=None, help="world bound for the exhaustive oracle")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="modsat", description="Satisfiability of modal circuits over restricted Boolean bases.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="complexity class of a problem")
    c.add_argument("--ops", default="box,dia", help="modal operators: box, dia, both or none")
    c.add_argument("--task", choices=("sat", "valid"), default="sat")
    c.add_argument("--repr", choices=("formula", "circuit"), default="circuit")
    c.set_defaults(func=cmd_classify)

    for name, task in (("sat", "sat"), ("valid", "valid")):
        s = sub.add_parser(name, parents=[common], help=f"decide {'satisfiability' if task == 'sat' else 'validity'}")
        s.add_argument("inputs", nargs="+", help="circuit files (netlist or formula); - for stdin")
        s.add_argument("--engine", choices=ALL_ENGINES, default=None)
        s.add_argument("--jobs", type=int, default=1, help="parallel workers for several input files")
        s.set_defaults(func=lambda a, t=task: cmd_solve(a, t))

    for name, share, what in (("normalize", "auto", "canonical"), ("minimize", "on", "smallest canonical")):
        n = sub.add_parser(name, parents=[common], help=f"{what} xor circuit (K or KD)")
        n.add_argument("input")
        n.add_argument("--share", choices=("auto", "on", "off"), default=share)
        n.set_defaults(func=cmd_normalize)

    e = sub.add_parser("equiv", parents=[common], help="equivalence of two circuits")
    e.add_argument("a")
    e.add_argument("b")
    e.set_defaults(func=cmd_equiv)

    d = sub.add_parser("dual", parents=[common], help="dual circuit")
    d.add_argument("input")
    d.set_defaults(func=cmd_dual)

    o = sub.add_parser("oracle", parents=[common], help="bounded brute-force check")
    o.add_argument("input")
    o.add_argument("--task", choices=("sat", "valid"), default="sat")
    o.add_argument("--check-witness", metavar="JSON", help="verify a witness model instead of searching")
    o.set_defaults(func=cmd_oracle)

    t = sub.add_parser("selftest", parents=[common], help="exhaustive checks on tiny instances")
    t.add_argument("--full", action="store_true", help="larger enumeration bounds")
    t.set_defaults(func=cmd_selftest)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_TRUE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.bound_worlds is not None:
        if args.bound_worlds < 1:
            print("error: --bound-worlds must be positive", file=sys.stderr)
            return EXIT_USAGE
        os.environ["MODSAT_BOUND_WORLDS"] = str(args.bound_worlds)
    try:
        return args.func(args)
    except (ModsatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())

