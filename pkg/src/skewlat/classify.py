"""Membership tests for categorical, strictly categorical, distributive,
normal/conormal and order-closed skew lattices.

Every property with more than one known characterization is decided by each
of them independently; :func:`classify_report` runs them all side by side.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ElementMap,
    FiniteSkewLattice,
    check_embedding,
    first_violation,
    mirror,
    subalgebra_closure,
)
from .constructions import gen_xn, gen_yn
from .cosets import (
    ac_decomposition,
    coset_bijections,
    coset_partitions,
    compose_bijections,
    parallel_matrix,
    reflective_factorization,
    three_chains,
)
from .errors import InternalError
from .order import handedness, maximal_images, structure

CATEGORICAL_MODES = ("structural", "catshort", "catsymm", "conditional", "midpoint")
STRICT_MODES = (
    "intersection",
    "midpoint-order",
    "midpoint-weak",
    "forbidden-four",
    "interval",
    "updown",
    "identity",
    "unique-factorization",
)
ORDER_CLOSED_MODES = ("direct", "identity")


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.holds


def _from_violation(witness):
    return Verdict(witness is None, witness)


def _identity(alg, arity, holds, when=None):
    return _from_violation(first_violation(alg.n, arity, holds, when))


# -- categorical ------------------------------------------------------------


def _categorical_structural(alg):
    for chain in three_chains(alg):
        ab = coset_bijections(chain.pair(0, 1))
        bc = coset_bijections(chain.pair(1, 2))
        ac = coset_bijections(chain.pair(0, 2))
        full = {chi.pairs for chi in ac}
        for phi in ab:
            for psi in bc:
                comp = compose_bijections(psi, phi)
                if comp.pairs and comp.pairs not in full:
                    a, c = min(comp.pairs)
                    chi = next(x for x in ac if (a, c) in x.pairs)
                    a2, c2 = min(chi.pairs - comp.pairs)
                    return Verdict(False, (a, phi.mapping[a], c, a2, c2))
    return Verdict(True)


def _categorical_midpoint(alg):
    """Given a > b > c and a > c ∥ a′ > c′, exactly one b′ with a > b ∥ a′ > b′ and b > c ∥ b′ > c′."""
    pairs, rel = parallel_matrix(alg)
    index = {p: k for k, p in enumerate(pairs)}
    strict = structure(alg).orders.strict
    for a in range(alg.n):
        for b in np.flatnonzero(strict[a]):
            for c in np.flatnonzero(strict[b]):
                a, b, c = int(a), int(b), int(c)
                pab, pbc = index[(a, b)], index[(b, c)]
                for p2 in np.flatnonzero(rel[index[(a, c)]]):
                    a2, c2 = pairs[p2]
                    count = 0
                    for b2 in range(alg.n):
                        q1, q2 = index.get((a2, b2)), index.get((b2, c2))
                        if q1 is not None and q2 is not None and rel[pab, q1] and rel[pbc, q2]:
                            count += 1
                    if count != 1:
                        return Verdict(False, (a, b, c, a2, c2))
    return Verdict(True)


def is_categorical(alg: FiniteSkewLattice, mode: str = "structural") -> Verdict:
    m, j = alg.m, alg.j
    orders = structure(alg).orders
    if mode == "structural":
        return _categorical_structural(alg)
    if mode == "catshort":

        def holds(x, y, z):
            w = m(x, y, z, y, x)
            return m(x, j(w, y, w), x) == m(x, y, x)

        return _identity(alg, 3, holds)
    if mode == "catsymm":

        def holds(x, y, z):
            u, v = m(x, z, x), m(z, x, z)
            return m(x, j(u, y, u), x) == m(x, j(v, y, v), x)

        return _identity(alg, 3, holds)
    if mode == "conditional":
        geq, pre = orders.order_geq, orders.preorder_geq

        def catimp1(x, y, z):
            w = m(x, z, x)
            return m(x, j(z, y, z), x) == j(w, y, w)

        def catimp2(x, y, z):
            w = j(z, x, z)
            return j(z, m(x, y, x), z) == m(w, y, w)

        first = _identity(alg, 3, catimp1, when=lambda x, y, z: geq[x, y] & pre[y, z])
        if not first:
            return first
        return _identity(alg, 3, catimp2, when=lambda x, y, z: pre[x, y] & geq[y, z])
    if mode == "midpoint":
        return _categorical_midpoint(alg)
    raise ValueError(f"unknown categorical mode {mode!r}")


# -- strictly categorical ---------------------------------------------------


def _unique_midpoints(alg, rel):
    D = structure(alg).green.D.matrix()
    for x in range(alg.n):
        for z in range(alg.n):
            ys = np.flatnonzero(rel[x] & rel[:, z])
            if len(ys) < 2:
                continue
            block = D[np.ix_(ys, ys)] & ~np.eye(len(ys), dtype=bool)
            hit = np.argwhere(block)
            if len(hit):
                return Verdict(False, (x, int(ys[hit[0][0]]), int(ys[hit[0][1]]), z))
    return Verdict(True)


def _forbidden_four(alg):
    st = structure(alg)
    strict = st.orders.strict
    R, L = st.green.R.matrix(), st.green.L.matrix()
    for a in range(alg.n):
        for c in np.flatnonzero(strict[a]):
            mids = np.flatnonzero(strict[a] & strict[:, c])
            for i, b in enumerate(mids):
                for b2 in mids[i + 1 :]:
                    if not (R[b, b2] or L[b, b2]):
                        continue
                    quad = {a, int(b), int(b2), int(c)}
                    if subalgebra_closure(alg, quad) == quad:
                        return Verdict(False, (a, int(b), int(b2), int(c)))
    return Verdict(True)


def _closed(alg, members):
    grid = np.ix_(members, members)
    inside = np.zeros(alg.n, dtype=bool)
    inside[members] = True
    return bool(inside[alg.meet[grid]].all() and inside[alg.join[grid]].all())


def _interval(alg):
    geq = structure(alg).orders.order_geq
    strict = structure(alg).orders.strict
    for a, b in np.argwhere(strict):
        members = np.flatnonzero(geq[a] & geq[:, b])
        grid = np.ix_(members, members)
        commutes = (alg.meet[grid] == alg.meet[grid].T).all() and (
            alg.join[grid] == alg.join[grid].T
        ).all()
        if not (_closed(alg, members) and commutes):
            return Verdict(False, (int(a), int(b)))
    return Verdict(True)


def _swap_identity_holds(T, members):
    """x∘y∘z∘w = x∘z∘y∘w over ``members``."""
    s = np.asarray(members)
    x, y, z, w = (s.reshape([-1 if k == i else 1 for k in range(4)]) for i in range(4))
    return bool((T[T[T[x, y], z], w] == T[T[T[x, z], y], w]).all())


def _updown(alg):
    geq = structure(alg).orders.order_geq
    for a in range(alg.n):
        up = np.flatnonzero(geq[:, a])
        down = np.flatnonzero(geq[a])
        if not (_closed(alg, up) and _swap_identity_holds(alg.meet, up)):
            return Verdict(False, (a,))
        if not (_closed(alg, down) and _swap_identity_holds(alg.join, down)):
            return Verdict(False, (a,))
    return Verdict(True)


def _intersection(alg):
    for chain in three_chains(alg):
        a_cosets = coset_partitions(chain.pair(0, 1)).lower_cosets
        c_cosets = coset_partitions(chain.pair(1, 2)).upper_cosets
        for X in a_cosets:
            for Y in c_cosets:
                if not set(X) & set(Y):
                    return Verdict(False, (X[0], Y[0]))
    return Verdict(True)


def _unique_factorization(alg):
    for chain in three_chains(alg):
        ab = coset_bijections(chain.pair(0, 1))
        bc = coset_bijections(chain.pair(1, 2))
        for phi in coset_bijections(chain.pair(0, 2)):
            count = sum(
                1 for psi in ab for chi in bc if compose_bijections(chi, psi).pairs == phi.pairs
            )
            if count != 1:
                return Verdict(False, min(phi.pairs))
    return Verdict(True)


def is_strictly_categorical(alg: FiniteSkewLattice, mode: str = "intersection") -> Verdict:
    orders = structure(alg).orders
    if mode in ("intersection", "unique-factorization"):
        categorical = is_categorical(alg, "structural")
        if not categorical:
            return categorical
        return _intersection(alg) if mode == "intersection" else _unique_factorization(alg)
    if mode == "midpoint-order":
        return _unique_midpoints(alg, orders.strict)
    if mode == "midpoint-weak":
        return _unique_midpoints(alg, orders.order_geq)
    if mode == "forbidden-four":
        return _forbidden_four(alg)
    if mode == "interval":
        return _interval(alg)
    if mode == "updown":
        return _updown(alg)
    if mode == "identity":
        m, j = alg.m, alg.j
        return _identity(alg, 4, lambda x, y, z, u: j(x, m(y, z, u, y), x) == j(x, m(y, u, z, y), x))
    raise ValueError(f"unknown strictly categorical mode {mode!r}")


# -- distributive, normal, order-closed -------------------------------------


def is_distributive(alg: FiniteSkewLattice) -> Verdict:
    m, j = alg.m, alg.j
    first = _identity(alg, 3, lambda x, y, z: m(x, j(y, z), x) == j(m(x, y, x), m(x, z, x)))
    if not first:
        return first
    return _identity(alg, 3, lambda x, y, z: j(x, m(y, z), x) == m(j(x, y, x), j(x, z, x)))


@dataclass(frozen=True)
class NormalityFlags:
    normal: bool
    conormal: bool


def normality_flags(alg: FiniteSkewLattice) -> NormalityFlags:
    everything = np.arange(alg.n)
    return NormalityFlags(
        _swap_identity_holds(alg.meet, everything), _swap_identity_holds(alg.join, everything)
    )


def _order_closed_direct(alg):
    st = structure(alg)
    strict = st.orders.strict
    for i, j in st.class_pairs():
        A, B = np.array(st.classes[i]), np.array(st.classes[j])
        G = strict[np.ix_(A, B)]
        # axes (a, a', b, b'): a, a' > b and a > b, b' without a' > b'
        bad = (
            G[:, None, :, None]
            & G[None, :, :, None]
            & G[:, None, None, :]
            & ~G[None, :, None, :]
        )
        hit = np.argwhere(bad)
        if len(hit):
            a, a2, b, b2 = hit[0]
            return Verdict(False, (int(A[a]), int(A[a2]), int(B[b]), int(B[b2])))
    return Verdict(True)


def is_order_closed(alg: FiniteSkewLattice, mode: str = "direct") -> Verdict:
    if mode == "direct":
        return _order_closed_direct(alg)
    if mode == "identity":
        m, j = alg.m, alg.j

        def holds(x, y, u, v):
            p, q, yx = m(x, y, v, u, x, y), m(x, y, u, v, x, y), m(y, x)
            return j(p, yx, q) == j(q, yx, p)

        return _identity(alg, 4, holds)
    raise ValueError(f"unknown order-closed mode {mode!r}")


# -- forbidden subalgebras ----------------------------------------------------


@dataclass(frozen=True)
class ForbiddenWitness:
    kind: str  # "X" or "Y"
    n: int
    embedding: ElementMap

    def to_json(self):
        return {"kind": self.kind, "n": self.n, "embedding": self.embedding.as_labels()}


def _alternating_walk(Q, a, a2, b, c, c2):
    """Walk b₁ = b, b₂ = a′∧b₁, b₃ = b₂∨c, ... back to b₁; the middle row of X_n."""
    M, J = Q.meet, Q.join
    row = [b]
    while True:
        even = int(M[a2, row[-1]])
        nxt = int(J[even, c])
        if even in row:
            return None
        row.append(even)
        if nxt == b:
            return row
        if nxt in row:
            return None
        row.append(nxt)


def _xn_copy(Q: FiniteSkewLattice):
    """First copy of some X_n (n ≥ 2) in a left-handed Q, as (n, index map)."""
    st = structure(Q)
    strict = st.orders.strict
    pairs, rel = parallel_matrix(Q)
    index = {p: k for k, p in enumerate(pairs)}
    for chain in three_chains(Q):
        A, B, C = chain.classes
        for a in A:
            for c in C:
                if not strict[a, c]:
                    continue
                for a2 in A:
                    if a2 == a:
                        continue
                    c2 = int(Q.m(a2, c, a2))
                    if c2 == c or not rel[index[(a, c)], index[(a2, c2)]]:
                        continue
                    for b in B:
                        if not (strict[a, b] and strict[b, c]):
                            continue
                        row = _alternating_walk(Q, a, a2, b, c, c2)
                        if row is None or len(row) < 4:
                            continue
                        n = len(row) // 2
                        return n, (a, a2, *row, c, c2)
    return None


def _lift(alg, classes_of_copy, by, across):
    """Lift a copy living in a quotient S/by back into S.

    ``classes_of_copy`` lists, per copy element, its class in ``by``; inside
    the preimage every D-class meets each ``across``-class of a chosen
    a > b > c in exactly one element.
    """
    strict = structure(alg).orders.strict
    dlab = structure(alg).green.D.labels
    tops, mids, bots = classes_of_copy[0], classes_of_copy[2], classes_of_copy[-2]
    for a in tops:
        for b in mids:
            if not strict[a, b]:
                continue
            for c in bots:
                if not strict[b, c]:
                    continue
                anchors = {dlab[x]: across.class_of(x) for x in (a, b, c)}
                lifted = []
                for cls in classes_of_copy:
                    hit = set(cls) & set(anchors[dlab[cls[0]]])
                    if len(hit) != 1:
                        break
                    lifted.append(hit.pop())
                else:
                    yield tuple(lifted)


def find_forbidden(alg: FiniteSkewLattice) -> ForbiddenWitness | None:
    """An embedded X_n or Y_n (n ≥ 2), or None when ``alg`` is categorical.

    Searches the maximal left-handed image S/R for an X_n and the maximal
    right-handed image S/L (through its mirror) for a Y_n, then lifts the copy
    back into S along an L-class (resp. R-class) transversal.
    """
    if is_categorical(alg, "structural"):
        return None
    st = structure(alg)
    images = maximal_images(alg, st.green)
    for kind, Q, by, across in (
        ("X", images.S_over_R, st.green.R, st.green.L),
        ("Y", images.S_over_L, st.green.L, st.green.R),
    ):
        found = _xn_copy(Q if kind == "X" else mirror(Q))
        if found is None:
            continue
        n, copy = found
        source = gen_xn(n) if kind == "X" else gen_yn(n)
        classes = [by.classes[q] for q in copy]
        for lifted in _lift(alg, classes, by, across):
            m = ElementMap(source, alg, lifted)
            if check_embedding(m):
                return ForbiddenWitness(kind, n, m)
        raise InternalError(f"copy of {kind}_{n} in the handed image does not lift")
    raise InternalError("not categorical, yet no X_n or Y_n copy was found")


# -- auxiliary checks -------------------------------------------------------


def left_handed_identities(alg: FiniteSkewLattice) -> dict[str, Verdict]:
    """Derived identities that a left-handed categorical skew lattice satisfies."""
    m, j = alg.m, alg.j
    orders = structure(alg).orders
    geq, pre = orders.order_geq, orders.preorder_geq
    checks = {
        "cat1": lambda x, y, z: m(j(x, y), j(y, m(j(y, x), y, z))) == y,
        "cat2": lambda x, y, z: m(x, j(y, m(j(y, x), y, z))) == m(x, y),
        "cat3": lambda x, y, z: m(x, j(m(y, x), m(x, y, z))) == m(x, y),
        "catshort-lh": lambda x, y, z: m(x, j(y, m(x, y, z))) == m(x, y),
        "cat4": lambda x, y, z: m(x, j(y, z, m(x, z))) == m(x, j(y, z)),
        "catsymm-lh": lambda x, y, z: m(x, j(y, m(x, z))) == m(x, j(y, m(z, x))),
    }
    out = {name: _identity(alg, 3, h) for name, h in checks.items()}
    out["catimp-lh"] = _identity(
        alg,
        3,
        lambda x, y, z: m(x, j(y, z)) == j(y, m(x, z)),
        when=lambda x, y, z: geq[x, y] & pre[y, z],
    )
    return out


def strict_chain_conclusions(alg: FiniteSkewLattice) -> Verdict:
    """On every 3-chain A > B > C: images of each a lie in one C-coset, images of
    each c in one A-coset, and each a > c has exactly one b between them, lying
    in the intersection of those two cosets."""
    strict = structure(alg).orders.strict
    for chain in three_chains(alg):
        A, B, C = chain.classes
        a_cosets = coset_partitions(chain.pair(0, 1))
        c_cosets = coset_partitions(chain.pair(1, 2))
        for a in A:
            imgs = [b for b in B if strict[a, b]]
            if len({c_cosets.upper_of(b) for b in imgs}) != 1:
                return Verdict(False, (a,))
        for c in C:
            imgs = [b for b in B if strict[b, c]]
            if len({a_cosets.lower_of(b) for b in imgs}) != 1:
                return Verdict(False, (c,))
        for a in A:
            for c in C:
                if not strict[a, c]:
                    continue
                mids = [b for b in B if strict[a, b] and strict[b, c]]
                if len(mids) != 1:
                    return Verdict(False, (a, c))
                b = mids[0]
                a_side = c_cosets.upper_of(next(x for x in B if strict[a, x]))
                c_side = a_cosets.lower_of(next(x for x in B if strict[x, c]))
                if b not in a_side or b not in c_side:
                    return Verdict(False, (a, b, c))
    return Verdict(True)


def reflective_chains_factor(alg: FiniteSkewLattice) -> Verdict:
    """True iff every reflective 3-chain of D-classes factors as chain × rectangle."""
    for chain in three_chains(alg):
        result = reflective_factorization(chain)
        if result.reflective and not result.factors:
            return Verdict(False, tuple(cls[0] for cls in chain.classes))
    return Verdict(True)


# -- report -----------------------------------------------------------------

PROPERTY_MODES = {
    "categorical": CATEGORICAL_MODES,
    "strictly_categorical": STRICT_MODES,
    "distributive": ("identity",),
    "normal": ("identity",),
    "conormal": ("identity",),
    "order_closed": ORDER_CLOSED_MODES,
    "rectangular": ("identity",),
    "left_handed": ("identity",),
    "right_handed": ("identity",),
}


@dataclass
class ClassificationReport:
    verdicts: dict[str, bool]
    mode_results: dict[str, dict[str, Verdict]]
    agreement: dict[str, bool]
    forbidden: ForbiddenWitness | None
    auxiliary: dict[str, Verdict] = field(default_factory=dict)

    def to_json(self, alg: FiniteSkewLattice) -> dict:
        witnesses = {}
        for prop, modes in self.mode_results.items():
            for verdict in modes.values():
                if verdict.witness is not None:
                    witnesses[prop] = list(alg.labels(verdict.witness))
                    break
        return {
            "properties": dict(self.verdicts),
            "modes": {p: {m: v.holds for m, v in ms.items()} for p, ms in self.mode_results.items()},
            "agreement": dict(self.agreement),
            "witnesses": witnesses,
            "forbidden": self.forbidden.to_json() if self.forbidden else None,
        }


def classify_report(alg: FiniteSkewLattice) -> ClassificationReport:
    hand = handedness(alg)
    flags = normality_flags(alg)
    results = {
        "categorical": {m: is_categorical(alg, m) for m in CATEGORICAL_MODES},
        "strictly_categorical": {m: is_strictly_categorical(alg, m) for m in STRICT_MODES},
        "distributive": {"identity": is_distributive(alg)},
        "normal": {"identity": Verdict(flags.normal)},
        "conormal": {"identity": Verdict(flags.conormal)},
        "order_closed": {m: is_order_closed(alg, m) for m in ORDER_CLOSED_MODES},
        "rectangular": {"identity": Verdict(hand.rectangular)},
        "left_handed": {"identity": Verdict(hand.left_handed)},
        "right_handed": {"identity": Verdict(hand.right_handed)},
    }
    verdicts = {p: next(iter(ms.values())).holds for p, ms in results.items()}
    agreement = {p: len({v.holds for v in ms.values()}) == 1 for p, ms in results.items()}
    aux = {}
    if hand.left_handed:
        aux.update(left_handed_identities(alg))
    if verdicts["strictly_categorical"]:
        aux["strict-chain-conclusions"] = strict_chain_conclusions(alg)
    aux["reflective-chains-factor"] = reflective_chains_factor(alg)
    return ClassificationReport(verdicts, results, agreement, find_forbidden(alg), aux)
