"""Cosets, coset bijections, parallelism and AC-structure of skew chains."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ElementMap,
    FiniteSkewLattice,
    check_embedding,
    direct_product,
    find_embedding,
    subalgebra,
)
from .constructions import gen_chain
from .errors import InternalError
from .order import structure


@dataclass(frozen=True)
class SkewChain:
    """Comparable D-classes of ``alg`` listed top-down (two or three of them)."""

    alg: FiniteSkewLattice
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        pre = structure(self.alg).orders.preorder_geq
        for upper, lower in zip(self.classes, self.classes[1:]):
            block = pre[np.ix_(upper, lower)]
            if not block.all() or pre[np.ix_(lower, upper)].any():
                raise ValueError("classes do not descend strictly")

    def pair(self, i, j) -> SkewChain:
        return SkewChain(self.alg, (self.classes[i], self.classes[j]))


def comparable_pairs(alg: FiniteSkewLattice) -> list[SkewChain]:
    st = structure(alg)
    return [SkewChain(alg, (st.classes[i], st.classes[j])) for i, j in st.class_pairs()]


def three_chains(alg: FiniteSkewLattice) -> list[SkewChain]:
    st = structure(alg)
    return [SkewChain(alg, tuple(st.classes[k] for k in t)) for t in st.class_triples()]


@dataclass(frozen=True)
class CosetPartition:
    upper_cosets: tuple[tuple[int, ...], ...]  # B-cosets in A
    lower_cosets: tuple[tuple[int, ...], ...]  # A-cosets in B

    def upper_of(self, a):
        return next(c for c in self.upper_cosets if a in c)

    def lower_of(self, b):
        return next(c for c in self.lower_cosets if b in c)


def _partition(cosets_by_elem, cls, what):
    blocks = {}
    for x in cls:
        coset = cosets_by_elem[x]
        if x not in coset:
            raise InternalError(f"{x} is not in its own {what}")
        for y in coset:
            if cosets_by_elem[y] != coset:
                raise InternalError(f"{what}s of {x} and {y} overlap without being equal")
        blocks[coset] = None
    return tuple(sorted(blocks, key=lambda c: c[0]))


def coset_partitions(chain: SkewChain, verify: bool = False) -> CosetPartition:
    """A-cosets A∧b∧A in B and B-cosets B∨a∨B in A for a pair A > B.

    Uses the one-variable forms; ``verify`` also recomputes the two-variable
    forms {a∧b∧a′} and {b∨a∨b′} and compares.
    """
    alg = chain.alg
    A, B = (np.array(c) for c in chain.classes[:2])
    M, J = alg.meet, alg.join
    lower = {int(b): tuple(sorted(set(M[M[A, b], A].tolist()))) for b in B}
    upper = {int(a): tuple(sorted(set(J[J[B, a], B].tolist()))) for a in A}
    if verify:
        for b in B:
            two = set(M[M[A[:, None], b], A[None, :]].ravel().tolist())
            if two != set(lower[int(b)]):
                raise InternalError("two-variable A-coset differs from one-variable form")
        for a in A:
            two = set(J[J[B[:, None], a], B[None, :]].ravel().tolist())
            if two != set(upper[int(a)]):
                raise InternalError("two-variable B-coset differs from one-variable form")
    part = CosetPartition(
        _partition(upper, chain.classes[0], "B-coset"),
        _partition(lower, chain.classes[1], "A-coset"),
    )
    sizes = {len(c) for c in part.upper_cosets + part.lower_cosets}
    if len(sizes) != 1:
        raise InternalError(f"cosets of unequal size {sorted(sizes)}")
    return part


@dataclass(frozen=True)
class PartialBijection:
    source_class: tuple[int, ...]
    target_class: tuple[int, ...]
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        srcs = [u for u, _ in self.pairs]
        dsts = [v for _, v in self.pairs]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise ValueError("pairs are not injective")

    def __len__(self):
        return len(self.pairs)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(u for u, _ in self.pairs)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(v for _, v in self.pairs)

    def labelled(self, alg) -> dict[str, str]:
        return {alg.names[u]: alg.names[v] for u, v in sorted(self.pairs)}


def coset_bijections(chain: SkewChain, cosets: CosetPartition | None = None) -> list[PartialBijection]:
    """One bijection X → Y, a ↦ a∧y∧a, for each B-coset X in A and A-coset Y in B."""
    alg = chain.alg
    M, J = alg.meet, alg.join
    order = structure(alg).orders.strict
    cosets = cosets or coset_partitions(chain)
    out = []
    for X in cosets.upper_cosets:
        Xa = np.array(X)
        for Y in cosets.lower_cosets:
            images = M[M[Xa[:, None], np.array(Y)[None, :]], Xa[:, None]]
            if not (images == images[:, :1]).all():
                raise InternalError("a∧y∧a depends on the choice of y")
            phi = {int(a): int(b) for a, b in zip(X, images[:, 0])}
            if sorted(phi.values()) != sorted(Y):
                raise InternalError(f"coset map {alg.labels(X)} → {alg.labels(Y)} is not onto")
            for a, b in phi.items():
                if not order[a, b]:
                    raise InternalError("coset bijection pair is not strictly ordered")
                if any(J[J[b, x], b] != a for x in X):
                    raise InternalError("b∨x∨b does not invert the coset bijection")
            for a in X:
                for a2 in X:
                    if phi[int(M[a, a2])] != M[phi[a], phi[a2]] or phi[int(J[a, a2])] != J[phi[a], phi[a2]]:
                        raise InternalError("coset bijection is not an isomorphism")
            out.append(PartialBijection(chain.classes[0], chain.classes[1], frozenset(phi.items())))
    return out


def compose_bijections(psi: PartialBijection, phi: PartialBijection) -> PartialBijection:
    """ψ∘φ as partial bijections (first φ, then ψ)."""
    if phi.target_class != psi.source_class:
        raise ValueError("target class of phi is not the source class of psi")
    second = psi.mapping
    pairs = frozenset((a, second[b]) for a, b in phi.pairs if b in second)
    return PartialBijection(phi.source_class, psi.target_class, pairs)


def _parallel(alg, D, p1, p2):
    (a, b), (a2, b2) = p1, p2
    return bool(
        D[a, a2]
        and D[b, b2]
        and alg.j(b2, a, b2) == a2
        and alg.m(a2, b, a2) == b2
    )


def are_parallel(alg: FiniteSkewLattice, p1, p2) -> bool:
    """a > b ∥ a′ > b′."""
    st = structure(alg)
    strict = st.orders.strict
    for a, b in (p1, p2):
        if not strict[a, b]:
            raise ValueError(f"{alg.names[a]} > {alg.names[b]} does not hold")
    D = st.green.D.matrix()
    forward = _parallel(alg, D, p1, p2)
    if forward != _parallel(alg, D, p2, p1):
        raise InternalError("parallelism is not symmetric")
    return forward


def strict_pairs(alg: FiniteSkewLattice) -> list[tuple[int, int]]:
    return [(int(a), int(b)) for a, b in np.argwhere(structure(alg).orders.strict)]


def parallel_matrix(alg: FiniteSkewLattice):
    """All strict pairs and the P×P parallelism matrix over them."""
    pairs = strict_pairs(alg)
    if not pairs:
        return pairs, np.zeros((0, 0), dtype=bool)
    D = structure(alg).green.D.matrix()
    a, b = (np.array(v) for v in zip(*pairs))
    A1, B1, A2, B2 = a[:, None], b[:, None], a[None, :], b[None, :]
    rel = (
        D[A1, A2]
        & D[B1, B2]
        & (alg.j(B2, A1, B2) == A2)
        & (alg.m(A2, B1, A2) == B2)
    )
    return pairs, rel


def parallel_classes(alg: FiniteSkewLattice) -> list[frozenset[tuple[int, int]]]:
    """Classes of ∥ over all strict pairs, checked against the coset bijections.

    Also checks that ∥ is an equivalence and the three listed consequences:
    a = a′ iff b = b′ inside a class; stacked parallel pairs compose; and
    a > a∧b∧a ∥ b∨a∨b > b whenever a ≻ b.
    """
    pairs, rel = parallel_matrix(alg)
    if not np.array_equal(rel, rel.T) or not rel.diagonal().all():
        raise InternalError("parallelism is not reflexive and symmetric")
    classes, seen = [], set()
    for p in range(len(pairs)):
        if p in seen:
            continue
        members = np.flatnonzero(rel[p])
        if not rel[np.ix_(members, members)].all():
            raise InternalError("parallelism is not transitive")
        seen.update(members.tolist())
        classes.append(frozenset(pairs[k] for k in members))

    for cls in classes:
        ups = [a for a, _ in cls]
        downs = [b for _, b in cls]
        if len(set(ups)) != len(cls) or len(set(downs)) != len(cls):
            raise InternalError("a parallel class pairs one element with two partners")

    index = {p: k for k, p in enumerate(pairs)}
    by_upper = {}
    for p, (a, b) in enumerate(pairs):
        by_upper.setdefault(a, []).append(p)
    for p, (a, b) in enumerate(pairs):
        for q in by_upper.get(b, ()):
            c = pairs[q][1]
            for p2 in np.flatnonzero(rel[p]):
                a2, b2 = pairs[p2]
                for q2 in np.flatnonzero(rel[q]):
                    if pairs[q2][0] != b2:
                        continue
                    c2 = pairs[q2][1]
                    if not rel[index[(a, c)], index[(a2, c2)]]:
                        raise InternalError("stacked parallel pairs do not compose")

    pre = structure(alg).orders.strict_preorder
    for a, b in np.argwhere(pre):
        a, b = int(a), int(b)
        lo, hi = alg.m(a, b, a), alg.j(b, a, b)
        if (a, lo) not in index or (hi, b) not in index or not rel[index[(a, lo)], index[(hi, b)]]:
            raise InternalError("a > a∧b∧a ∥ b∨a∨b > b fails")

    expected = {bij.pairs for chain in comparable_pairs(alg) for bij in coset_bijections(chain)}
    if set(classes) != expected:
        raise InternalError("parallel classes differ from the coset bijections")
    return classes


def determination_violation(chain: SkewChain, cosets: CosetPartition | None = None):
    """First (a, b) where the coset recipe disagrees with the tables, else None.

    a∨b = a∨a′ and b∨a = a′∨a with a′ −_B a, a′ ≥ b;
    a∧b = b′∧b and b∧a = b∧b′ with b′ −_A b, a ≥ b′.
    """
    alg = chain.alg
    M, J = alg.meet, alg.join
    geq = structure(alg).orders.order_geq
    cosets = cosets or coset_partitions(chain)
    for a in chain.classes[0]:
        X = cosets.upper_of(a)
        for b in chain.classes[1]:
            Y = cosets.lower_of(b)
            ups = [u for u in X if geq[u, b]]
            lows = [v for v in Y if geq[a, v]]
            if len(ups) != 1 or len(lows) != 1:
                return (a, b)
            a2, b2 = ups[0], lows[0]
            if (J[a, b], J[b, a], M[a, b], M[b, a]) != (J[a, a2], J[a2, a], M[b2, b], M[b, b2]):
                return (a, b)
    return None


@dataclass(frozen=True)
class ACDecomposition:
    components: tuple[tuple[int, ...], ...]
    ac_cosets: tuple[tuple[int, ...], ...]


def _union_find_blocks(elements, groups):
    parent = {x: x for x in elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in groups:
        for x in g[1:]:
            rx, ry = find(g[0]), find(x)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    blocks = {}
    for x in elements:
        blocks.setdefault(find(x), []).append(x)
    return tuple(sorted((tuple(sorted(b)) for b in blocks.values()), key=lambda b: b[0]))


def ac_decomposition(chain: SkewChain) -> ACDecomposition:
    """AC-components and AC-cosets of the middle class of A > B > C."""
    if len(chain.classes) != 3:
        raise ValueError("need a 3-term chain")
    a_cosets = coset_partitions(chain.pair(0, 1)).lower_cosets
    c_cosets = coset_partitions(chain.pair(1, 2)).upper_cosets
    components = _union_find_blocks(chain.classes[1], a_cosets + c_cosets)
    meets = []
    for X in a_cosets:
        for Y in c_cosets:
            both = tuple(sorted(set(X) & set(Y)))
            if both:
                meets.append(both)
    return ACDecomposition(components, tuple(sorted(meets, key=lambda b: b[0])))


@dataclass(frozen=True)
class Reflection:
    """Outcome of the reflective-chain test; ``factor`` maps gen_chain(3) × R onto the chain."""

    reflective: bool
    factor: ElementMap | None = None

    @property
    def factors(self) -> bool:
        return self.factor is not None


def reflective_factorization(chain: SkewChain) -> Reflection:
    """Decide whether A > B > A′ is reflective and, if so, whether it factors.

    Reflective: A and A′ are full cosets of each other and B is a single
    AA′-component. The factorization is searched only among coset-respecting
    maps: (top, a) ↦ a, (mid, a) ↦ φ(a), (bottom, a) ↦ ψφ(a) for full coset
    bijections φ: A → B, ψ: B → A′.
    """
    if len(chain.classes) != 3:
        raise ValueError("need a 3-term chain")
    alg = chain.alg
    A, B, C = chain.classes
    outer = coset_partitions(chain.pair(0, 2))
    if len(outer.upper_cosets) != 1 or len(outer.lower_cosets) != 1:
        return Reflection(False)
    if len(ac_decomposition(chain).components) != 1:
        return Reflection(False)
    ab = coset_bijections(chain.pair(0, 1))
    bc = coset_bijections(chain.pair(1, 2))
    if len(ab) != 1 or len(bc) != 1 or len(ab[0]) != len(A) or len(bc[0]) != len(B):
        return Reflection(True)
    phi, psi = ab[0].mapping, bc[0].mapping
    rect = subalgebra(alg, A)
    product = direct_product(gen_chain(3), rect)
    k = len(A)
    f = [0] * product.n
    for r, a in enumerate(A):
        f[r] = a
        f[k + r] = phi[a]
        f[2 * k + r] = psi[phi[a]]
    m = ElementMap(product, alg, tuple(f))
    return Reflection(True, m if check_embedding(m) else None)


def primitive_factorization(alg: FiniteSkewLattice) -> ElementMap | None:
    """For an order-closed primitive A > B, an isomorphism D × T → S with D
    rectangular and T simply order-closed; None when no such split is found.
    """
    st = structure(alg)
    if len(st.classes) != 2:
        raise ValueError("not a primitive skew lattice")
    (i, j), = st.class_pairs()
    A, B = st.classes[i], st.classes[j]
    strict = st.orders.strict
    b0 = B[0]
    top = [a for a in A if strict[a, b0]]
    bottom = [b for b in B if strict[top[0], b]]
    if not all(strict[a, b] for a in top for b in bottom):
        return None
    cosets = coset_partitions(SkewChain(alg, (A, B)))
    try:
        simple = subalgebra(alg, top + bottom)
        rect = subalgebra(alg, cosets.upper_of(top[0]))
    except ValueError:
        return None
    product = direct_product(rect, simple)
    if product.n != alg.n:
        return None
    return find_embedding(product, alg)
