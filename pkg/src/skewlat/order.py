"""Natural preorder and partial order, Green's relations and both decompositions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import (
    EquivPartition,
    FiniteSkewLattice,
    first_violation,
    is_commutative,
    is_congruence,
    quotient_by,
)
from .errors import InternalError


@dataclass(frozen=True, eq=False)
class OrderRelations:
    preorder_geq: np.ndarray  # x ⪰ y
    order_geq: np.ndarray  # x ≥ y

    @property
    def strict(self) -> np.ndarray:
        """x > y."""
        return self.order_geq & ~np.eye(len(self.order_geq), dtype=bool)

    @property
    def strict_preorder(self) -> np.ndarray:
        """x ≻ y."""
        return self.preorder_geq & ~self.preorder_geq.T


def compute_orders(alg: FiniteSkewLattice) -> OrderRelations:
    M, J = alg.meet, alg.join
    x = np.arange(alg.n)[:, None]
    y = np.arange(alg.n)[None, :]
    pre_join = J[J[x, y], x] == x
    pre_meet = M[M[y, x], y] == y
    geq_join = (J[x, y] == x) & (J[y, x] == x)
    geq_meet = (M[x, y] == y) & (M[y, x] == y)
    if not (np.array_equal(pre_join, pre_meet) and np.array_equal(geq_join, geq_meet)):
        raise InternalError("∨-form and ∧-form of the natural orders disagree")
    pre_join.setflags(write=False)
    geq_join.setflags(write=False)
    return OrderRelations(pre_join, geq_join)


@dataclass(frozen=True)
class GreenPartitions:
    R: EquivPartition
    L: EquivPartition
    D: EquivPartition


def green_partitions(alg: FiniteSkewLattice, orders: OrderRelations | None = None) -> GreenPartitions:
    M = alg.meet
    orders = orders or compute_orders(alg)
    x = np.arange(alg.n)[:, None]
    y = np.arange(alg.n)[None, :]
    rel_r = (M[x, y] == y) & (M[y, x] == x)
    rel_l = (M[x, y] == x) & (M[y, x] == y)
    rel_d = (M[M[x, y], x] == x) & (M[M[y, x], y] == y)
    if not np.array_equal(rel_d, orders.preorder_geq & orders.preorder_geq.T):
        raise InternalError("D from its identity differs from ⪰ ∩ ⪯")
    try:
        R, L, D = (EquivPartition.from_matrix(r) for r in (rel_r, rel_l, rel_d))
    except ValueError as exc:
        raise InternalError(f"Green's relation is not an equivalence: {exc}") from None
    if (rel_r & rel_l).sum() != alg.n:
        raise InternalError("R ∩ L is not the identity")
    # D = R∘L = L∘R
    r_then_l = (rel_r.astype(np.int64) @ rel_l.astype(np.int64)) > 0
    l_then_r = (rel_l.astype(np.int64) @ rel_r.astype(np.int64)) > 0
    if not (np.array_equal(r_then_l, rel_d) and np.array_equal(l_then_r, rel_d)):
        raise InternalError("R∘L or L∘R differs from D")
    for name, p in (("R", R), ("L", L), ("D", D)):
        witness = is_congruence(alg, p)
        if witness is not None:
            raise InternalError(f"{name} is not a congruence: {alg.labels(witness)}")
    for cls in D.classes:
        c = np.array(cls)
        if not (M[M[c[:, None], c[None, :]], c[:, None]] == c[:, None]).all():
            raise InternalError(f"D-class {alg.labels(cls)} is not rectangular")
    return GreenPartitions(R, L, D)


@dataclass(frozen=True)
class Handedness:
    rectangular: bool
    left_handed: bool
    right_handed: bool


def handedness(alg: FiniteSkewLattice) -> Handedness:
    M, J = alg.meet, alg.join
    rect = first_violation(alg.n, 2, lambda x, y: M[M[x, y], x] == x) is None
    left = first_violation(
        alg.n, 2, lambda x, y: (M[M[x, y], x] == M[x, y]) & (J[J[x, y], x] == J[y, x])
    ) is None
    right = first_violation(
        alg.n, 2, lambda x, y: (M[M[x, y], x] == M[y, x]) & (J[J[x, y], x] == J[x, y])
    ) is None
    return Handedness(rect, left, right)


def handed_variant_violation(alg: FiniteSkewLattice, side: str, orders=None):
    """First (x, x', y) breaking the handed variant of the handedness identity.

    left:  x ⪰ x' ⇒ x'∧y∧x = x'∧y and x'∨y∨x = y∨x
    right: x ⪰ x' ⇒ x∧y∧x' = y∧x' and x∨y∨x' = x∨y

    The two sides are mirror images of each other; the join half of the left
    form ends in y∨x, as the mirror of the right form requires.
    """
    orders = orders or compute_orders(alg)
    pre = orders.preorder_geq
    m, j = alg.m, alg.j
    if side == "left":
        holds = lambda x, xp, y: (m(xp, y, x) == m(xp, y)) & (j(xp, y, x) == j(y, x))
    else:
        holds = lambda x, xp, y: (m(x, y, xp) == m(y, xp)) & (j(x, y, xp) == j(x, y))
    return first_violation(alg.n, 3, holds, when=lambda x, xp, y: pre[x, xp])


@dataclass(frozen=True)
class MaximalImages:
    S_over_R: FiniteSkewLattice
    S_over_L: FiniteSkewLattice
    S_over_D: FiniteSkewLattice


def maximal_images(alg: FiniteSkewLattice, green: GreenPartitions | None = None) -> MaximalImages:
    green = green or green_partitions(alg)
    s_r = quotient_by(alg, green.R)
    s_l = quotient_by(alg, green.L)
    s_d = quotient_by(alg, green.D)
    if not handedness(s_r).left_handed:
        raise InternalError("S/R is not left-handed")
    if not handedness(s_l).right_handed:
        raise InternalError("S/L is not right-handed")
    if not is_commutative(s_d):
        raise InternalError("S/D is not a lattice")
    return MaximalImages(s_r, s_l, s_d)


def verify_pullback(alg: FiniteSkewLattice, green: GreenPartitions | None = None) -> bool:
    """Check that x ↦ (R_x, L_x) is an isomorphism onto S/R ×_{S/D} S/L."""
    green = green or green_partitions(alg)
    images = maximal_images(alg, green)
    rlab, llab, dlab = (np.array(p.labels) for p in (green.R, green.L, green.D))
    # D-class of an R-class / L-class, read off any member
    r_to_d = np.array([dlab[c[0]] for c in green.R.classes])
    l_to_d = np.array([dlab[c[0]] for c in green.L.classes])
    fibred = [
        (r, l)
        for r in range(len(green.R))
        for l in range(len(green.L))
        if r_to_d[r] == l_to_d[l]
    ]
    image = set(zip(rlab.tolist(), llab.tolist()))
    if len(image) != alg.n or image != set(fibred):
        return False
    SR, SL = images.S_over_R, images.S_over_L
    for T, TR, TL in ((alg.meet, SR.meet, SL.meet), (alg.join, SR.join, SL.join)):
        if not (rlab[T] == TR[rlab[:, None], rlab[None, :]]).all():
            return False
        if not (llab[T] == TL[llab[:, None], llab[None, :]]).all():
            return False
    return True


@dataclass(frozen=True, eq=False)
class Structure:
    """Orders, Green's relations and the ordering of D-classes, computed once."""

    orders: OrderRelations
    green: GreenPartitions
    class_geq: np.ndarray  # class i ≥ class j in S/D

    @property
    def classes(self):
        return self.green.D.classes

    def class_pairs(self):
        """(i, j) with D-class i strictly above D-class j."""
        k = len(self.classes)
        return [(i, j) for i in range(k) for j in range(k) if i != j and self.class_geq[i, j]]

    def class_triples(self):
        k = len(self.classes)
        g = self.class_geq
        return [
            (i, j, l)
            for i in range(k)
            for j in range(k)
            for l in range(k)
            if len({i, j, l}) == 3 and g[i, j] and g[j, l]
        ]


@lru_cache(maxsize=512)
def structure(alg: FiniteSkewLattice) -> Structure:
    orders = compute_orders(alg)
    green = green_partitions(alg, orders)
    reps = [c[0] for c in green.D.classes]
    class_geq = orders.preorder_geq[np.ix_(reps, reps)].copy()
    class_geq.setflags(write=False)
    return Structure(orders, green, class_geq)
