"""Command-line entry point ``simpcert``.

Exit codes: 0 success/accept, 1 reject/failure, 2 usage, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import certificate as certmod
from .bip import CommutatorWord
from .cantor import TreeShape, format_word, parse_word
from .errors import ParseError, PreconditionError, SimpcertError, VerificationError
from .fragment import CantorInstance, cantor_decompose
from .instances import random_instance
from .order import OrderInstance, order_decompose, order_six_factor, strictify
from .ordprox import non2trans_witness, proximality_witness, random_point, render, less
from .textio import (
    Carrier,
    generator_document,
    parse_element,
    parse_generator_document,
    parse_word_document,
    serialize_element,
    word_document,
)
from .treelab import (
    ColoredGraph,
    free_group_boundary_gens,
    halftree_shrink_search,
    measure_feasibility,
    minimality_search,
    thompson_v_gens,
    tits_ball_build,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _emit(text: str, out) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load_word(path, carrier: Carrier) -> CommutatorWord:
    word, found = parse_word_document(_read(path))
    if found != carrier:
        raise UsageError(f"{path}: carrier {found.header()} does not match {carrier.header()}")
    return word


def _load_element(path, carrier: Carrier):
    x = parse_element(_read(path))
    if Carrier.of(x) != carrier:
        raise UsageError(f"{path}: carrier {Carrier.of(x).header()} does not match {carrier.header()}")
    return x


def _parse_shape(text: str) -> TreeShape:
    try:
        m, d = (int(t) for t in text.split(","))
        return TreeShape(m, d)
    except (ValueError, SimpcertError):
        raise UsageError(f"--shape expects M,D with M, D >= 2, got {text!r}") from None


def _meta(args, pipeline: str):
    meta = [("pipeline", pipeline)]
    if getattr(args, "strict", False):
        meta.append(("mode", "strict"))
    return meta


# -- commands ---------------------------------------------------------------

def _order_inputs(args) -> OrderInstance:
    carrier = Carrier.pl(args.q)
    return OrderInstance(args.q, _load_word(args.target, carrier), _load_element(args.g, carrier))


def _cantor_inputs(args) -> CantorInstance:
    shape = _parse_shape(args.shape)
    carrier = Carrier.v(shape)
    gw = _load_word(args.g_witness, carrier)
    return CantorInstance(shape, _load_word(args.target, carrier), _load_element(args.g, carrier), gw)


def cmd_order_decompose(args) -> int:
    inst = _order_inputs(args)
    cf = order_six_factor(inst, strict=args.strict)
    cert = certmod.from_factorization(cf, inst.target.evaluate(), 6, _meta(args, "order-six"))
    _emit(cert.to_text(), args.out)
    return EXIT_OK


def cmd_cantor_decompose(args) -> int:
    inst = _cantor_inputs(args)
    res = cantor_decompose(inst, strict=args.strict)
    cert = certmod.from_factorization(
        res.factorization, inst.target.evaluate(), 9, _meta(args, "cantor-nine"), g_witness=inst.g_witness
    )
    _emit(cert.to_text(), args.out)
    return EXIT_OK


def cmd_width(args) -> int:
    if args.mode == "order":
        if args.q is None:
            raise UsageError("width --mode order needs --q")
        inst = _order_inputs(args)
        _, word = order_decompose(inst)
        bound, name = 2, "order-width"
    else:
        if args.shape is None or args.g_witness is None:
            raise UsageError("width --mode cantor needs --shape and --g-witness")
        inst = _cantor_inputs(args)
        word = cantor_decompose(inst).width
        bound, name = 3, "cantor-width"
    cert = certmod.from_word(word, inst.target.evaluate(), bound, _meta(args, name))
    _emit(cert.to_text(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    verdict = certmod.verify_certificate(_read(args.cert))
    print(verdict)
    return EXIT_OK if verdict.accepted else EXIT_FAIL


def cmd_random(args) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get("SIMPCERT_SEED")
        if env is None:
            raise UsageError("no --seed given and SIMPCERT_SEED is unset")
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"SIMPCERT_SEED must be an integer, got {env!r}") from None
    inst = random_instance(args.kind, seed, args.size)
    out = Path(args.out)
    if args.kind == "order":
        carrier = Carrier.pl(inst.q)
        info = f"kind order\nq {inst.q}\nseed {seed}\n"
    else:
        carrier = Carrier.v(inst.shape)
        info = f"kind cantor\nshape {inst.shape.m},{inst.shape.d}\nseed {seed}\n"
        write_atomic(out / "g-witness.txt", word_document(inst.g_witness, carrier).to_text())
    write_atomic(out / "target.txt", word_document(inst.target, carrier).to_text())
    write_atomic(out / "g.txt", serialize_element(inst.g))
    write_atomic(out / "instance.txt", info)
    print(f"wrote {args.kind} instance (seed {seed}) to {out}")
    return EXIT_OK


def _load_gens(args):
    if args.builtin:
        if args.builtin == "thompson-v":
            return thompson_v_gens()
        if args.builtin.startswith("free-"):
            try:
                n = int(args.builtin[5:])
            except ValueError:
                raise UsageError(f"bad builtin {args.builtin!r}") from None
            return free_group_boundary_gens(n)
        raise UsageError(f"unknown builtin generator set {args.builtin!r}")
    if not args.gens:
        raise UsageError("give --gens FILE or --builtin NAME")
    gens = parse_generator_document(_read(args.gens))
    if len({g.shape for g in gens}) != 1:
        raise UsageError("generators must share one shape")
    return gens


def cmd_tree_measure(args) -> int:
    gens = _load_gens(args)
    rep = measure_feasibility(gens, args.depth)
    print(f"depth {rep.depth}")
    print(f"constraints {len(rep.matrix)}")
    if rep.feasible:
        print("result feasible (no conclusion beyond this depth)")
        for w, x in zip(rep.cylinders, rep.weights):
            print(f"weight {format_word(w)} {x}")
    else:
        print("result infeasible (no invariant probability measure exists)")
        print("farkas " + " ".join(str(y) for y in rep.farkas))
    print(f"recheck {'ok' if rep.recheck() else 'FAILED'}")
    return EXIT_OK if rep.recheck() else EXIT_INTERNAL


def cmd_tree_minimal(args) -> int:
    gens = _load_gens(args)
    rep = minimality_search(gens, args.depth, args.length)
    print(f"witnessed {len(rep.witnesses)}")
    for u, v in rep.missing:
        print(f"missing {format_word(u)} {format_word(v)}")
    if args.shrink:
        word = halftree_shrink_search(gens, parse_word(args.shrink), args.length)
        print("shrink " + ("none" if word is None else " ".join(f"{i}{'+' if e == 1 else '-'}" for i, e in word)))
    return EXIT_OK if rep.complete else EXIT_FAIL


def cmd_tree_tits(args) -> int:
    G = ColoredGraph.parse(_read(args.graph))
    root = args.root or G.vertices[0]
    ball = tits_ball_build(G, root, args.radius)
    sys.stdout.write(ball.report())
    return EXIT_OK


def cmd_tree_free(args) -> int:
    gens = free_group_boundary_gens(args.n)
    sys.stdout.write(generator_document(gens).to_text())
    return EXIT_OK


def cmd_ordprox_demo(args) -> int:
    import random

    k = args.level
    w = non2trans_witness(k)
    print(f"level {k}")
    print(f"pair1 {render(w.pair1[0])} < {render(w.pair1[1])} f={w.f1}")
    print(f"pair2 {render(w.pair2[0])} < {render(w.pair2[1])} f={w.f2}")
    rng = random.Random(args.seed)
    pts = []
    while len(pts) < 4:
        p = random_point(rng, k)
        if p not in pts:
            pts.append(p)
    a, b, c, d = pts
    if less(b, a):
        a, b = b, a
    if less(d, c):
        c, d = d, c
    g = proximality_witness(a, b, c, d)
    print(f"proximal ({render(a)}, {render(b)}) over ({render(c)}, {render(d)}) by {g}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simpcert", description="Uniform simplicity certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("order-decompose", help="six-factor certificate for a bounded PL group")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--strict", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_order_decompose)

    s = sub.add_parser("cantor-decompose", help="nine-factor certificate for a prefix-exchange group")
    s.add_argument("--shape", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--g-witness", required=True)
    s.add_argument("--strict", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_cantor_decompose)

    s = sub.add_parser("width", help="commutator-word certificate (bound 2 or 3)")
    s.add_argument("--mode", choices=["order", "cantor"], required=True)
    s.add_argument("--q", type=int)
    s.add_argument("--shape")
    s.add_argument("--target", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--g-witness")
    s.add_argument("--out")
    s.set_defaults(func=cmd_width)

    s = sub.add_parser("verify", help="check a certificate")
    s.add_argument("cert")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("random", help="write a random instance")
    s.add_argument("--kind", choices=["order", "cantor"], required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--size", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_random)

    tree = sub.add_parser("tree", help="tree-boundary experiments")
    tsub = tree.add_subparsers(dest="tree_command", required=True)
    for name, fn in (("measure-check", cmd_tree_measure), ("minimal-check", cmd_tree_minimal)):
        t = tsub.add_parser(name)
        t.add_argument("--gens")
        t.add_argument("--builtin", help="thompson-v or free-N")
        t.add_argument("--depth", type=int, required=True)
        if name == "minimal-check":
            t.add_argument("--length", type=int, default=6)
            t.add_argument("--shrink", help="also search a word shrinking this cylinder")
        t.set_defaults(func=fn)
    t = tsub.add_parser("tits")
    t.add_argument("--graph", required=True)
    t.add_argument("--radius", type=int, required=True)
    t.add_argument("--root")
    t.set_defaults(func=cmd_tree_tits)
    t = tsub.add_parser("free")
    t.add_argument("--n", type=int, required=True)
    t.set_defaults(func=cmd_tree_free)

    op = sub.add_parser("ordprox", help="nested ordered-set model")
    osub = op.add_subparsers(dest="ordprox_command", required=True)
    o = osub.add_parser("demo")
    o.add_argument("--level", type=int, required=True)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_ordprox_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"simpcert: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, PreconditionError) as e:
        print(f"simpcert: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (VerificationError, AssertionError) as e:
        print(f"simpcert: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except SimpcertError as e:
        print(f"simpcert: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
