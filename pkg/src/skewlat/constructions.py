"""Generators for example skew lattices and the seeded test corpus."""
from __future__ import annotations

import itertools
import json
import string
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteSkewLattice,
    direct_product,
    max_carrier,
    subalgebra,
    subalgebra_closure,
    validate,
)
from .errors import SkewLatticeError


class SpecInconsistent(SkewLatticeError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


def gen_chain(k: int) -> FiniteSkewLattice:
    """Total order of ``k`` elements; the first name is the top."""
    if k < 1:
        raise ValueError("chain length must be positive")
    names = list(string.ascii_lowercase[:k]) if k <= 26 else [f"e{i}" for i in range(k)]
    idx = np.arange(k)
    # index 0 is the top, so meet = larger index
    meet = np.maximum(idx[:, None], idx[None, :])
    join = np.minimum(idx[:, None], idx[None, :])
    return FiniteSkewLattice(tuple(names), meet, join)


def gen_rectangular(p: int, q: int) -> FiniteSkewLattice:
    """Rectangular skew lattice on p×q with (a,b)∧(c,d) = (a,d), (a,b)∨(c,d) = (c,b)."""
    if p < 1 or q < 1:
        raise ValueError("rectangle sides must be positive")
    cells = [(a, b) for a in range(p) for b in range(q)]
    names = tuple(f"r{a}_{b}" for a, b in cells)
    meet = [[a * q + d for (c, d) in cells] for (a, b) in cells]
    join = [[c * q + b for (c, d) in cells] for (a, b) in cells]
    return FiniteSkewLattice(names, meet, join)


@dataclass
class PrimitiveSpec:
    """Coset data for a primitive skew lattice A > B.

    ``bijections[(i, j)]`` lists (position in upper coset i, position in
    lower coset j) pairs; every coset pair needs one.
    """

    upper_cosets: list[list[str]]
    lower_cosets: list[list[str]]
    bijections: dict[tuple[int, int], list[tuple[int, int]]]
    handedness: str = "left"

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        bij = {}
        for entry in data["bijections"]:
            bij[(int(entry["upper"]), int(entry["lower"]))] = [tuple(p) for p in entry["pairs"]]
        return cls(
            [list(c) for c in data["upper_cosets"]],
            [list(c) for c in data["lower_cosets"]],
            bij,
            data.get("handedness", "left"),
        )

    def to_json(self):
        return {
            "upper_cosets": self.upper_cosets,
            "lower_cosets": self.lower_cosets,
            "bijections": [
                {"upper": i, "lower": j, "pairs": [list(p) for p in pairs]}
                for (i, j), pairs in sorted(self.bijections.items())
            ],
            "handedness": self.handedness,
        }


@dataclass
class _Layer:
    """Coset data between two classes of a skew chain."""

    upper_cosets: list[list[int]]
    lower_cosets: list[list[int]]
    above: set[tuple[int, int]] = field(default_factory=set)  # (u, l) with u > l


def _build_chain(classes: list[list[str]], layers: dict, handedness: str) -> FiniteSkewLattice:
    """Tables of a skew chain from its cosets and coset bijections.

    ``classes`` descend; ``layers[(i, j)]`` (i < j) holds index-level coset
    data for classes i > j. Cross-class products follow the coset recipe:
    a∨b = a∨a′, b∨a = a′∨a with a′ −_B a, a′ ≥ b; a∧b = b′∧b, b∧a = b∧b′
    with b′ −_A b, a ≥ b′. Each class is a left- or right-zero band.
    """
    if handedness not in ("left", "right"):
        raise ValueError("handedness must be 'left' or 'right'")
    names = [name for cls in classes for name in cls]
    n = len(names)
    cls_of = [k for k, cls in enumerate(classes) for _ in cls]
    meet = np.zeros((n, n), dtype=np.int64)
    join = np.zeros((n, n), dtype=np.int64)

    def rmeet(x, y):
        return x if handedness == "left" else y

    def rjoin(x, y):
        return y if handedness == "left" else x

    for x in range(n):
        for y in range(n):
            if cls_of[x] == cls_of[y]:
                meet[x, y], join[x, y] = rmeet(x, y), rjoin(x, y)

    for (i, j), layer in layers.items():
        up_coset = {u: c for c in layer.upper_cosets for u in c}
        low_coset = {l: c for c in layer.lower_cosets for l in c}
        for a in up_coset:
            for b in low_coset:
                ups = [u for u in up_coset[a] if (u, b) in layer.above]
                lows = [l for l in low_coset[b] if (a, l) in layer.above]
                if len(ups) != 1 or len(lows) != 1:
                    raise SpecInconsistent(
                        f"{names[a]} and {names[b]} do not determine a unique coset partner"
                    )
                a2, b2 = ups[0], lows[0]
                join[a, b], join[b, a] = rjoin(a, a2), rjoin(a2, a)
                meet[a, b], meet[b, a] = rmeet(b2, b), rmeet(b, b2)
    return FiniteSkewLattice(tuple(names), meet, join)


def _checked(alg):
    report = validate(alg)
    if not report.ok:
        law, witness = report.failures[0]
        raise SpecInconsistent(f"tables fail {law} at {witness}", report)
    return alg


def gen_primitive(spec: PrimitiveSpec) -> FiniteSkewLattice:
    up, low = spec.upper_cosets, spec.lower_cosets
    sizes = {len(c) for c in up + low}
    if len(sizes) != 1:
        raise SpecInconsistent("all cosets must have the same size")
    upper = [name for c in up for name in c]
    lower = [name for c in low for name in c]
    if len(set(upper + lower)) != len(upper) + len(lower):
        raise SpecInconsistent("element names repeat")
    pos = {name: k for k, name in enumerate(upper + lower)}
    layer = _Layer([[pos[x] for x in c] for c in up], [[pos[x] for x in c] for c in low])
    for i, j in itertools.product(range(len(up)), range(len(low))):
        pairs = spec.bijections.get((i, j))
        if pairs is None:
            raise SpecInconsistent(f"missing bijection for coset pair ({i}, {j})")
        if sorted(p for p, _ in pairs) != list(range(len(up[i]))) or sorted(
            q for _, q in pairs
        ) != list(range(len(low[j]))):
            raise SpecInconsistent(f"pairs for ({i}, {j}) are not a bijection")
        layer.above.update((pos[up[i][p]], pos[low[j][q]]) for p, q in pairs)
    return _checked(_build_chain([upper, lower], {(0, 1): layer}, spec.handedness))


def twisted_primitive_spec(handedness="left") -> PrimitiveSpec:
    """Two cosets each way with one twisted bijection; not order-closed."""
    return PrimitiveSpec(
        [["a1", "a2"], ["a3", "a4"]],
        [["b1", "b2"], ["b3", "b4"]],
        {
            (0, 0): [(0, 0), (1, 1)],
            (0, 1): [(0, 0), (1, 1)],
            (1, 0): [(0, 0), (1, 1)],
            (1, 1): [(0, 1), (1, 0)],
        },
        handedness,
    )


def _xy_chain(n: int, handedness: str) -> FiniteSkewLattice:
    if n < 1 or 2 * n + 4 > max_carrier():
        raise ValueError(f"n={n} out of bounds")
    A = ["a1", "a2"]
    B = [f"b{i}" for i in range(1, 2 * n + 1)]
    C = ["c1", "c2"]
    a = {1: 0, 2: 1}
    b = {i: 1 + i for i in range(1, 2 * n + 1)}  # b_i -> index
    c = {1: 2 * n + 2, 2: 2 * n + 3}
    odd = [b[i] for i in range(1, 2 * n + 1, 2)]
    even = [b[i] for i in range(2, 2 * n + 1, 2)]

    ab = _Layer([[a[1], a[2]]], [[b[2 * k - 1], b[2 * k]] for k in range(1, n + 1)])
    ab.above = {(a[1], x) for x in odd} | {(a[2], x) for x in even}
    # C-cosets in B: {b_2n, b_1 | b_2, b_3 | ...}
    c_cosets = [[b[2 * n], b[1]]] + [[b[2 * k], b[2 * k + 1]] for k in range(1, n)]
    bc = _Layer(c_cosets, [[c[1], c[2]]])
    bc.above = {(x, c[1]) for x in odd} | {(x, c[2]) for x in even}
    ac = _Layer([[a[1], a[2]]], [[c[1], c[2]]])
    ac.above = {(a[1], c[1]), (a[2], c[2])}
    return _checked(_build_chain([A, B, C], {(0, 1): ab, (1, 2): bc, (0, 2): ac}, handedness))


def gen_xn(n: int) -> FiniteSkewLattice:
    """The left-handed skew chain X_n on 2n+4 elements."""
    return _xy_chain(n, "left")


def gen_yn(n: int) -> FiniteSkewLattice:
    """The right-handed dual Y_n of X_n."""
    return _xy_chain(n, "right")


def gen_partial_functions(m: int, k: int) -> FiniteSkewLattice:
    """All partial maps {1..m} -> {1..k}.

    f∧g = g restricted to dom f ∩ dom g, f∨g = f ∪ g restricted to dom g ∖ dom f.
    """
    if m < 1 or k < 1:
        raise ValueError("m and k must be positive")
    if (k + 1) ** m > max_carrier():
        raise ValueError(f"{(k + 1) ** m} partial functions exceed the carrier limit")
    funcs = list(itertools.product([None, *range(1, k + 1)], repeat=m))
    index = {f: i for i, f in enumerate(funcs)}
    names = tuple("f[" + ",".join("-" if v is None else str(v) for v in f) + "]" for f in funcs)

    def meet(f, g):
        return tuple(gv if fv is not None and gv is not None else None for fv, gv in zip(f, g))

    def join(f, g):
        return tuple(fv if fv is not None else gv for fv, gv in zip(f, g))

    mt = [[index[meet(f, g)] for g in funcs] for f in funcs]
    jt = [[index[join(f, g)] for g in funcs] for f in funcs]
    return FiniteSkewLattice(names, mt, jt)


class Lcg:
    """64-bit linear congruential stream (Knuth's MMIX constants)."""

    def __init__(self, seed: int):
        self.state = seed & (2**64 - 1)

    def next(self) -> int:
        self.state = (6364136223846793005 * self.state + 1442695040888963407) % 2**64
        return self.state >> 33

    def below(self, n: int) -> int:
        return self.next() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffled(self, seq):
        out = list(seq)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out


def random_primitive_spec(rng: Lcg, max_size=12) -> PrimitiveSpec:
    while True:
        size = 1 + rng.below(2)
        nu, nl = 1 + rng.below(3), 1 + rng.below(3)
        if size * (nu + nl) <= max_size:
            break
    up = [[f"a{i}{s}" for s in "xy"[:size]] for i in range(nu)]
    low = [[f"b{j}{s}" for s in "xy"[:size]] for j in range(nl)]
    bij = {}
    for i in range(nu):
        for j in range(nl):
            perm = rng.shuffled(range(size))
            bij[(i, j)] = [(p, perm[p]) for p in range(size)]
    return PrimitiveSpec(up, low, bij, rng.choice(["left", "right"]))


def base_algebras() -> list[tuple[str, FiniteSkewLattice]]:
    out = [(f"chain{k}", gen_chain(k)) for k in range(1, 5)]
    out += [(f"rect{p}x{q}", gen_rectangular(p, q)) for p in range(1, 4) for q in range(1, 4)]
    out += [(f"x{n}", gen_xn(n)) for n in range(1, 5)]
    out += [(f"y{n}", gen_yn(n)) for n in range(1, 5)]
    out += [(f"pf{m}{k}", gen_partial_functions(m, k)) for m in (1, 2) for k in (1, 2)]
    out += [(f"twisted-{h}", gen_primitive(twisted_primitive_spec(h))) for h in ("left", "right")]
    out += [("M3", gen_diamond()), ("N5", gen_pentagon())]
    out += [(f"four-{side}", gen_forbidden_four(side)) for side in "LR"]
    return out


def gen_corpus(
    seed: int = 0, max_size: int = 24, products: int = 150, closures: int = 40, chains: int = 20
):
    """Deterministic corpus of validated skew lattices, each at most ``max_size``.

    Returns ``(name, algebra)`` pairs; names record how each was built.
    """
    rng = Lcg(seed)
    corpus = [(name, alg) for name, alg in base_algebras() if alg.n <= max_size]
    for k in range(10):
        corpus.append((f"prim{k}", gen_primitive(random_primitive_spec(rng, min(12, max_size)))))
    for k in range(chains):
        alg = random_skew_chain(rng, max_class=min(4, max_size // 3))
        if alg is not None:
            corpus.append((f"chain3-{k}", alg))

    factors = [(name, alg) for name, alg in corpus if alg.n > 1]
    pairs = [
        (p, q)
        for i, p in enumerate(factors)
        for q in factors[i:]
        if p[1].n * q[1].n <= max_size
    ]
    chosen = rng.shuffled(pairs)[:products]
    prods = [(f"{p[0]}*{q[0]}", direct_product(p[1], q[1])) for p, q in chosen]
    corpus += prods

    seen = {alg for _, alg in corpus}
    attempts = 0
    added = 0
    while added < closures and attempts < 20 * closures and prods:
        attempts += 1
        name, alg = rng.choice(prods)
        seed_set = {rng.below(alg.n) for _ in range(2 + rng.below(2))}
        closed = subalgebra_closure(alg, seed_set)
        if len(closed) in (1, alg.n):
            continue
        sub = subalgebra(alg, closed)
        if sub in seen:
            continue
        seen.add(sub)
        corpus.append((f"sub({name};{','.join(alg.labels(sorted(seed_set)))})", sub))
        added += 1

    for name, alg in corpus:
        report = validate(alg)
        if not report.ok:
            raise SkewLatticeError(f"corpus algebra {name} fails {report.failures[0]}")
    return corpus


def gen_lattice(covers: dict[str, list[str]]) -> FiniteSkewLattice:
    """Lattice from its Hasse diagram: ``covers[x]`` lists the elements just below x."""
    names = list(covers)
    index = {x: i for i, x in enumerate(names)}
    n = len(names)
    leq = np.eye(n, dtype=bool)
    for x, below in covers.items():
        for y in below:
            leq[index[y], index[x]] = True
    for k in range(n):
        leq |= leq[:, [k]] & leq[[k], :]

    def bound(x, y, upper):
        cands = [z for z in range(n) if (leq[x, z] and leq[y, z] if upper else leq[z, x] and leq[z, y])]
        best = [z for z in cands if all((leq[z, w] if upper else leq[w, z]) for w in cands)]
        if len(best) != 1:
            raise ValueError(f"{names[x]} and {names[y]} have no {'join' if upper else 'meet'}")
        return best[0]

    meet = [[bound(x, y, False) for y in range(n)] for x in range(n)]
    join = [[bound(x, y, True) for y in range(n)] for x in range(n)]
    return FiniteSkewLattice(tuple(names), meet, join)


def gen_diamond() -> FiniteSkewLattice:
    """M3."""
    return gen_lattice({"1": ["p", "q", "r"], "p": ["0"], "q": ["0"], "r": ["0"], "0": []})


def gen_pentagon() -> FiniteSkewLattice:
    """N5."""
    return gen_lattice({"1": ["p", "r"], "p": ["q"], "q": ["0"], "r": ["0"], "0": []})


def _random_layer(rng, upper, lower, max_coset=None):
    """Random cosets and bijections between two classes (index lists)."""
    sizes = [s for s in range(1, min(len(upper), len(lower)) + 1)
             if len(upper) % s == 0 and len(lower) % s == 0 and (max_coset is None or s <= max_coset)]
    s = rng.choice(sizes)
    up = rng.shuffled(upper)
    low = rng.shuffled(lower)
    layer = _Layer([up[i:i + s] for i in range(0, len(up), s)],
                   [low[i:i + s] for i in range(0, len(low), s)])
    for X in layer.upper_cosets:
        for Y in layer.lower_cosets:
            perm = rng.shuffled(range(s))
            layer.above.update((X[p], Y[perm[p]]) for p in range(s))
    return layer


def random_skew_chain(rng: Lcg, max_class=4, tries=200) -> FiniteSkewLattice | None:
    """A random valid 3-class skew chain A > B > C, by rejection sampling.

    The A > C layer is forced to be the transitive image of the other two
    whenever that is a union of coset bijections; otherwise it is random.
    """
    for _ in range(tries):
        na, nb, nc = (1 + rng.below(max_class) for _ in range(3))
        A = list(range(na))
        B = list(range(na, na + nb))
        C = list(range(na + nb, na + nb + nc))
        ab = _random_layer(rng, A, B)
        bc = _random_layer(rng, B, C)
        ac = _random_layer(rng, A, C)
        implied = {(a, c) for a, b in ab.above for b2, c in bc.above if b == b2}
        if not implied <= ac.above:
            continue
        names = [[f"a{i}" for i in A], [f"b{i - na}" for i in B], [f"c{i - na - nb}" for i in C]]
        try:
            alg = _build_chain(names, {(0, 1): ab, (1, 2): bc, (0, 2): ac}, rng.choice(["left", "right"]))
        except SpecInconsistent:
            continue
        if validate(alg).ok:
            return alg
    return None


def gen_forbidden_four(side: str = "L") -> FiniteSkewLattice:
    """The 4-element chain a > b, b′ > c with b, b′ in one L-class (or R-class)."""
    A, B, C = [0], [1, 2], [3]
    ab = _Layer([A], [[1], [2]], {(0, 1), (0, 2)})
    bc = _Layer([[1], [2]], [C], {(1, 3), (2, 3)})
    ac = _Layer([A], [C], {(0, 3)})
    handed = "left" if side == "L" else "right"
    return _checked(_build_chain([["a"], ["b", "b'"], ["c"]], {(0, 1): ab, (1, 2): bc, (0, 2): ac}, handed))
