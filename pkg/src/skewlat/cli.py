"""The ``skl`` command line tool."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .algebra import direct_product, load, save, serialize_algebra, validate
from .classify import classify_report, find_forbidden
from .constructions import (
    PrimitiveSpec,
    gen_chain,
    gen_corpus,
    gen_partial_functions,
    gen_primitive,
    gen_rectangular,
    gen_xn,
    gen_yn,
)
from .cosets import ac_decomposition, coset_bijections, coset_partitions, comparable_pairs, three_chains
from .crosscheck import crosscheck
from .errors import InternalError, ParseError, SkewLatticeError
from .order import structure

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
GENERATORS = ("xn", "yn", "chain", "rectangular", "partialfn", "primitive", "product", "corpus")


class UsageError(SkewLatticeError):
    pass


def _load_valid(path):
    """Load and validate; returns the algebra or None after printing failures."""
    alg = load(path)
    report = validate(alg)
    if not report.ok:
        _print_failures(report)
        return None
    return alg


def _print_failures(report):
    for law, witness in report.failures:
        print(f"FAIL {law}: {' '.join(witness)}")


def _names(alg, idx):
    return "{" + ", ".join(alg.labels(idx)) + "}"


# -- commands ----------------------------------------------------------------


def cmd_validate(args):
    report = validate(load(args.file))
    if report.ok:
        print("ok")
        return EXIT_OK
    _print_failures(report)
    return EXIT_FAIL


def _decomposition(alg):
    st = structure(alg)
    classes = st.classes
    g = st.class_geq
    k = len(classes)
    covers = [
        (i, j)
        for i, j in st.class_pairs()
        if not any(l not in (i, j) and g[i, l] and g[l, j] for l in range(k))
    ]
    pairs = []
    for chain in comparable_pairs(alg):
        cosets = coset_partitions(chain)
        pairs.append(
            {
                "upper": list(alg.labels(chain.classes[0])),
                "lower": list(alg.labels(chain.classes[1])),
                "upper_cosets": [list(alg.labels(c)) for c in cosets.upper_cosets],
                "lower_cosets": [list(alg.labels(c)) for c in cosets.lower_cosets],
                "bijections": [b.labelled(alg) for b in coset_bijections(chain, cosets)],
            }
        )
    chains = []
    for chain in three_chains(alg):
        ac = ac_decomposition(chain)
        chains.append(
            {
                "classes": [list(alg.labels(c)) for c in chain.classes],
                "components": [list(alg.labels(c)) for c in ac.components],
                "ac_cosets": [list(alg.labels(c)) for c in ac.ac_cosets],
            }
        )
    return {
        "d_classes": [list(alg.labels(c)) for c in classes],
        "hasse": [[i, j] for i, j in covers],
        "pairs": pairs,
        "chains": chains,
    }


def cmd_decompose(args):
    alg = _load_valid(args.file)
    if alg is None:
        return EXIT_FAIL
    d = _decomposition(alg)
    if args.json:
        print(json.dumps(d, indent=2, ensure_ascii=False))
        return EXIT_OK
    print("D-classes:")
    for i, c in enumerate(d["d_classes"]):
        print(f"  D{i} = {{{', '.join(c)}}}")
    print("S/D covers: " + (", ".join(f"D{i} > D{j}" for i, j in d["hasse"]) or "none"))
    for p in d["pairs"]:
        print(f"pair {{{', '.join(p['upper'])}}} > {{{', '.join(p['lower'])}}}")
        print("  upper cosets: " + " | ".join(" ".join(c) for c in p["upper_cosets"]))
        print("  lower cosets: " + " | ".join(" ".join(c) for c in p["lower_cosets"]))
        for b in p["bijections"]:
            print("  bijection " + ", ".join(f"{u}->{v}" for u, v in b.items()))
    for ch in d["chains"]:
        print("chain " + " > ".join("{" + ", ".join(c) + "}" for c in ch["classes"]))
        print("  AC-components: " + " | ".join(" ".join(c) for c in ch["components"]))
        print("  AC-cosets: " + " | ".join(" ".join(c) for c in ch["ac_cosets"]))
    return EXIT_OK


def cmd_classify(args):
    alg = _load_valid(args.file)
    if alg is None:
        return EXIT_FAIL
    report = classify_report(alg)
    data = report.to_json(alg)
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        width = max(len(p) for p in data["properties"])
        for prop, holds in data["properties"].items():
            line = f"{prop.ljust(width)}  {str(holds).lower()}"
            if not data["agreement"][prop]:
                line += f"  MODES DISAGREE {data['modes'][prop]}"
            if prop in data["witnesses"]:
                line += f"  witness {' '.join(data['witnesses'][prop])}"
            print(line)
        fw = data["forbidden"]
        print("forbidden: " + (f"{fw['kind']}_{fw['n']}" if fw else "none"))
    return EXIT_OK if all(report.agreement.values()) else EXIT_FAIL


def cmd_forbidden(args):
    alg = _load_valid(args.file)
    if alg is None:
        return EXIT_FAIL
    witness = find_forbidden(alg)
    if args.json:
        print(json.dumps(witness.to_json() if witness else None, ensure_ascii=False))
    elif witness is None:
        print("none")
    else:
        print(f"{witness.kind}_{witness.n}")
        for src, dst in witness.embedding.as_labels().items():
            print(f"  {src} -> {dst}")
    return EXIT_OK


def _need(args, *flags):
    missing = [f"--{f}" for f in flags if getattr(args, f) is None]
    if missing:
        raise UsageError(f"generate {args.kind} needs {' '.join(missing)}")


def cmd_generate(args):
    kind = args.kind
    if kind == "corpus":
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        corpus = gen_corpus(seed=args.seed)
        for i, (name, alg) in enumerate(corpus):
            save(alg, out / f"{i:03d}.skl")
        (out / "index.txt").write_text(
            "".join(f"{i:03d}.skl {name}\n" for i, (name, _) in enumerate(corpus))
        )
        print(f"wrote {len(corpus)} algebras to {out}")
        return EXIT_OK
    if kind in ("xn", "yn", "chain"):
        _need(args, "n")
        alg = {"xn": gen_xn, "yn": gen_yn, "chain": gen_chain}[kind](args.n)
    elif kind == "rectangular":
        _need(args, "p", "q")
        alg = gen_rectangular(args.p, args.q)
    elif kind == "partialfn":
        _need(args, "m", "k")
        alg = gen_partial_functions(args.m, args.k)
    elif kind == "primitive":
        _need(args, "spec")
        try:
            spec = PrimitiveSpec.from_json(Path(args.spec).read_text())
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad primitive spec: {exc}") from None
        alg = gen_primitive(spec)
    else:
        if len(args.inputs) != 2:
            raise UsageError("generate product needs exactly two input files")
        alg = direct_product(load(args.inputs[0]), load(args.inputs[1]))
    if args.output == "-":
        sys.stdout.write(serialize_algebra(alg))
    else:
        save(alg, args.output)
    return EXIT_OK


def _collect(paths, seed):
    if not paths:
        return gen_corpus(seed=seed)
    items = []
    for p in map(Path, paths):
        files = sorted(p.glob("*.skl")) if p.is_dir() else [p]
        for f in files:
            items.append((str(f), load(f)))
    return items


def cmd_crosscheck(args):
    start = time.perf_counter()
    items = _collect(args.paths, args.seed)
    invalid = False
    valid = []
    for name, alg in items:
        report = validate(alg)
        if report.ok:
            valid.append((name, alg))
        else:
            invalid = True
            print(f"{name}: not a skew lattice ({report.failures[0][0]})")
    summary = crosscheck(valid, seed=args.seed)
    print(summary.table())
    print(f"time: {time.perf_counter() - start:.2f} s", file=sys.stderr)
    if summary.internal:
        return EXIT_INTERNAL
    return EXIT_OK if summary.ok and not invalid else EXIT_FAIL


# -- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skl", description="Analyse finite skew lattices given as Cayley tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the skew lattice axioms")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    for name, func, text in (
        ("decompose", cmd_decompose, "D-classes, cosets, coset bijections, AC-components"),
        ("classify", cmd_classify, "property verdicts with per-mode agreement"),
        ("forbidden", cmd_forbidden, "find an embedded X_n or Y_n"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("generate", help="write a generated algebra as .skl")
    p.add_argument("kind", choices=GENERATORS)
    p.add_argument("inputs", nargs="*", help="factor files for 'product'")
    for flag in ("n", "p", "q", "m", "k"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--spec", help="JSON primitive spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output file, '-' for stdout, or a directory for 'corpus'")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("crosscheck", help="check every invariant over a corpus")
    p.add_argument("paths", nargs="*", help=".skl files or directories; default is the seeded corpus")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crosscheck)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"skl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalError as exc:
        print(f"skl: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"skl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SkewLatticeError as exc:
        print(f"skl: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())
