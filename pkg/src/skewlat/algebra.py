"""Finite skew lattices given by a pair of Cayley tables.

Elements are dense indices ``0..n-1``; labels only matter at the I/O boundary.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import CarrierTooLarge, NotACongruence, ParseError

DEFAULT_MAX_CARRIER = 4096

# evaluate identities in slabs over the first variable once the grid gets big
_CHUNK_CELLS = 1 << 22


def max_carrier() -> int:
    value = os.environ.get("SKL_MAX_CARRIER")
    return int(value) if value else DEFAULT_MAX_CARRIER


def _table(rows, n, what):
    arr = np.array(rows, dtype=np.int64)
    if arr.shape != (n, n):
        raise ValueError(f"{what} table has shape {arr.shape}, expected {(n, n)}")
    if n and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"{what} table has entries outside 0..{n - 1}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteSkewLattice:
    """Carrier of ``n`` labelled elements with meet and join tables.

    ``meet[i, j]`` is the index of ``e_i ∧ e_j``; likewise for ``join``.
    Construction only checks that the tables are total; use :func:`validate`
    for the skew lattice laws.
    """

    names: tuple[str, ...]
    meet: np.ndarray
    join: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise ValueError("element names must be distinct")
        n = len(names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "meet", _table(self.meet, n, "meet"))
        object.__setattr__(self, "join", _table(self.join, n, "join"))
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"FiniteSkewLattice(n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, FiniteSkewLattice):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.meet, other.meet)
            and np.array_equal(self.join, other.join)
        )

    def __hash__(self):
        return hash((self.names, self.meet.tobytes(), self.join.tobytes()))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no element named {name!r}") from None

    def labels(self, indices) -> tuple[str, ...]:
        return tuple(self.names[int(i)] for i in indices)

    # Left-folded products; the operands may be ints or broadcastable index arrays.
    def m(self, *xs):
        return reduce(lambda a, b: self.meet[a, b], xs)

    def j(self, *xs):
        return reduce(lambda a, b: self.join[a, b], xs)


@dataclass
class ValidationReport:
    failures: list[tuple[str, tuple[str, ...]]]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class ElementMap:
    """A map from the carrier of ``source`` into the carrier of ``target``."""

    source: FiniteSkewLattice
    target: FiniteSkewLattice
    map: tuple[int, ...]

    def as_labels(self) -> dict[str, str]:
        return {self.source.names[i]: self.target.names[t] for i, t in enumerate(self.map)}


@dataclass(frozen=True)
class EquivPartition:
    """Partition of ``0..n-1``; classes are numbered by their least element."""

    labels: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_classes(cls, n, classes):
        labels = [-1] * n
        blocks = sorted((tuple(sorted(c)) for c in classes if c), key=lambda c: c[0])
        for k, block in enumerate(blocks):
            for x in block:
                if labels[x] != -1:
                    raise ValueError(f"element {x} lies in two classes")
                labels[x] = k
        if -1 in labels:
            raise ValueError("classes do not cover the carrier")
        return cls(tuple(labels), tuple(blocks))

    @classmethod
    def from_matrix(cls, rel):
        """Partition from a boolean equivalence matrix (checked)."""
        rel = np.asarray(rel, dtype=bool)
        n = rel.shape[0]
        if not rel.diagonal().all() or not (rel == rel.T).all():
            raise ValueError("relation is not reflexive and symmetric")
        classes, seen = [], np.zeros(n, dtype=bool)
        for x in range(n):
            if not seen[x]:
                members = np.flatnonzero(rel[x])
                if not rel[np.ix_(members, members)].all():
                    raise ValueError("relation is not transitive")
                seen[members] = True
                classes.append(tuple(int(i) for i in members))
        return cls.from_classes(n, classes)

    @classmethod
    def identity(cls, n):
        return cls.from_classes(n, [(i,) for i in range(n)])

    def __len__(self):
        return len(self.classes)

    def class_of(self, x) -> tuple[int, ...]:
        return self.classes[self.labels[x]]

    def same(self, x, y) -> bool:
        return self.labels[x] == self.labels[y]

    def matrix(self) -> np.ndarray:
        lab = np.array(self.labels)
        return lab[:, None] == lab[None, :]


# -- identity evaluation ----------------------------------------------------


def _grids(n, arity, first=None):
    shape = [1] * arity
    grids = []
    for axis in range(arity):
        if axis == 0 and first is not None:
            grids.append(np.int64(first))
            continue
        s = list(shape)
        s[axis] = n
        grids.append(np.arange(n).reshape(s))
    return grids


def first_violation(n, arity, holds, when=None):
    """Least tuple (lexicographic) where ``holds`` is false, or None.

    ``holds`` and ``when`` take ``arity`` broadcastable index arrays and
    return boolean arrays; tuples where ``when`` is false are skipped.
    """
    if n == 0:
        return None
    if n**arity <= _CHUNK_CELLS or arity == 1:
        slabs = [None]
    else:
        slabs = range(n)
    for first in slabs:
        xs = _grids(n, arity, first)
        bad = ~np.broadcast_to(holds(*xs), (n,) * (arity - (first is not None)))
        if when is not None:
            bad &= np.broadcast_to(when(*xs), bad.shape)
        hits = np.argwhere(bad)
        if len(hits):
            tail = tuple(int(v) for v in hits[0])
            return tail if first is None else (first, *tail)
    return None


# -- .skl text format -------------------------------------------------------


def parse_algebra(text: str) -> FiniteSkewLattice:
    """Parse ``.skl`` text. Laws are not checked; see :func:`validate`."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines:
        raise ParseError("empty input")
    it = iter(lines)

    lineno, toks = next(it)
    if toks != ["skewlat", "v1"]:
        raise ParseError("expected header 'skewlat v1'", lineno)

    lineno, toks = next(it, (lineno, None))
    if not toks or toks[0] != "elements":
        raise ParseError("expected 'elements <n> <names...>'", lineno)
    try:
        n = int(toks[1])
    except (IndexError, ValueError):
        raise ParseError("element count is not an integer", lineno) from None
    names = toks[2:]
    if n < 1 or len(names) != n:
        raise ParseError(f"declared {toks[1]} elements but listed {len(names)}", lineno)
    index = {}
    for name in names:
        if name in index:
            raise ParseError(f"duplicate element name {name!r}", lineno)
        index[name] = len(index)

    tables = {}
    for section in ("meet", "join"):
        lineno, toks = next(it, (lineno, None))
        if toks != [section]:
            raise ParseError(f"expected '{section}'", lineno)
        rows = []
        for _ in range(n):
            lineno, toks = next(it, (lineno, None))
            if toks is None:
                raise ParseError(f"{section} table has fewer than {n} rows", lineno)
            if len(toks) != n:
                raise ParseError(f"{section} row has {len(toks)} entries, expected {n}", lineno)
            try:
                rows.append([index[t] for t in toks])
            except KeyError as exc:
                raise ParseError(f"{exc.args[0]!r} is not a declared element", lineno) from None
        tables[section] = rows
    extra = next(it, None)
    if extra is not None:
        raise ParseError("unexpected content after join table", extra[0])
    return FiniteSkewLattice(tuple(names), tables["meet"], tables["join"])


def serialize_algebra(alg: FiniteSkewLattice) -> str:
    out = ["skewlat v1", f"elements {alg.n} " + " ".join(alg.names)]
    width = max(len(s) for s in alg.names)
    for section, table in (("meet", alg.meet), ("join", alg.join)):
        out.append(section)
        for row in table:
            out.append(" ".join(alg.names[k].ljust(width) for k in row).rstrip())
    return "\n".join(out) + "\n"


def load(path) -> FiniteSkewLattice:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


def save(alg: FiniteSkewLattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_algebra(alg))


# -- laws -------------------------------------------------------------------


def _laws(alg):
    M, J = alg.meet, alg.join
    yield "meet-idempotent", 1, lambda x: M[x, x] == x
    yield "join-idempotent", 1, lambda x: J[x, x] == x
    yield "meet-associative", 3, lambda x, y, z: M[M[x, y], z] == M[x, M[y, z]]
    yield "join-associative", 3, lambda x, y, z: J[J[x, y], z] == J[x, J[y, z]]
    yield "absorption x∧(x∨y)=x", 2, lambda x, y: M[x, J[x, y]] == x
    yield "absorption (y∨x)∧x=x", 2, lambda x, y: M[J[y, x], x] == x
    yield "absorption x∨(x∧y)=x", 2, lambda x, y: J[x, M[x, y]] == x
    yield "absorption (y∧x)∨x=x", 2, lambda x, y: J[M[y, x], x] == x
    yield "duality x∧y=x iff x∨y=y", 2, lambda x, y: (M[x, y] == x) == (J[x, y] == y)
    yield "duality x∧y=y iff x∨y=x", 2, lambda x, y: (M[x, y] == y) == (J[x, y] == x)


def validate(alg: FiniteSkewLattice) -> ValidationReport:
    failures = []
    for law, arity, holds in _laws(alg):
        witness = first_violation(alg.n, arity, holds)
        if witness is not None:
            failures.append((law, alg.labels(witness)))
    for op, T in (("meet", alg.meet), ("join", alg.join)):
        # x∘y∘x∘z∘x = x∘y∘z∘x
        witness = first_violation(
            alg.n, 3, lambda x, y, z: T[T[T[T[x, y], x], z], x] == T[T[T[x, y], z], x]
        )
        if witness is not None:
            law = f"{op}-regularity" if failures else "regularity-theorem-violated"
            failures.append((law, alg.labels(witness)))
    return ValidationReport(failures)


def is_commutative(alg: FiniteSkewLattice) -> bool:
    return bool((alg.meet == alg.meet.T).all() and (alg.join == alg.join.T).all())


# -- constructions on algebras ---------------------------------------------


def direct_product(a: FiniteSkewLattice, b: FiniteSkewLattice, limit=None) -> FiniteSkewLattice:
    """Componentwise product; element ``(x, y)`` is named ``"x|y"`` (row-major)."""
    limit = max_carrier() if limit is None else limit
    if a.n * b.n > limit:
        raise CarrierTooLarge(f"product has {a.n * b.n} elements, limit is {limit}")
    names = tuple(f"{x}|{y}" for x in a.names for y in b.names)
    ai, bi = np.divmod(np.arange(a.n * b.n), b.n)
    meet = a.meet[ai[:, None], ai[None, :]] * b.n + b.meet[bi[:, None], bi[None, :]]
    join = a.join[ai[:, None], ai[None, :]] * b.n + b.join[bi[:, None], bi[None, :]]
    return FiniteSkewLattice(names, meet, join)


def mirror(alg: FiniteSkewLattice) -> FiniteSkewLattice:
    """Horizontal dual: both operations with their arguments swapped."""
    return FiniteSkewLattice(alg.names, alg.meet.T, alg.join.T)


def subalgebra_closure(alg: FiniteSkewLattice, seed) -> frozenset[int]:
    current = np.unique(np.asarray(list(seed), dtype=np.int64))
    if not len(current):
        raise ValueError("seed must be nonempty")
    while True:
        grid = np.ix_(current, current)
        grown = np.union1d(current, np.union1d(alg.meet[grid], alg.join[grid]))
        if len(grown) == len(current):
            return frozenset(int(x) for x in current)
        current = grown


def subalgebra(alg: FiniteSkewLattice, elements) -> FiniteSkewLattice:
    """The subalgebra on ``elements`` (which must be closed), in index order."""
    keep = sorted(set(int(e) for e in elements))
    pos = {e: i for i, e in enumerate(keep)}
    grid = np.ix_(keep, keep)
    try:
        meet = [[pos[int(v)] for v in row] for row in alg.meet[grid]]
        join = [[pos[int(v)] for v in row] for row in alg.join[grid]]
    except KeyError:
        raise ValueError("element set is not closed under ∧ and ∨") from None
    return FiniteSkewLattice(alg.labels(keep), meet, join)


def check_embedding(m: ElementMap) -> bool:
    f = np.asarray(m.map, dtype=np.int64)
    src, dst = m.source, m.target
    if f.shape != (src.n,) or (f < 0).any() or (f >= dst.n).any():
        return False
    if len(np.unique(f)) != src.n:
        return False
    fx, fy = f[:, None], f[None, :]
    return bool((f[src.meet] == dst.meet[fx, fy]).all() and (f[src.join] == dst.join[fx, fy]).all())


def find_embedding(source: FiniteSkewLattice, target: FiniteSkewLattice, fixed=None):
    """Search for an injective homomorphism ``source -> target``.

    Backtracking with forward propagation: once x and y are placed, the
    images of x∧y and x∨y are forced. Returns an :class:`ElementMap` or None.
    """
    n = source.n
    SM, SJ = source.meet.tolist(), source.join.tolist()
    TM, TJ = target.meet.tolist(), target.join.tolist()
    f = [-1] * n
    used = [False] * target.n

    def assign(x, t, trail):
        queue = [(x, t)]
        while queue:
            x, t = queue.pop()
            if f[x] != -1:
                if f[x] != t:
                    return False
                continue
            if used[t]:
                return False
            f[x] = t
            used[t] = True
            trail.append(x)
            for y in range(n):
                if f[y] == -1:
                    continue
                u = f[y]
                queue.append((SM[x][y], TM[t][u]))
                queue.append((SM[y][x], TM[u][t]))
                queue.append((SJ[x][y], TJ[t][u]))
                queue.append((SJ[y][x], TJ[u][t]))
        return True

    def undo(trail):
        for x in trail:
            used[f[x]] = False
            f[x] = -1

    trail0 = []
    for x, t in (fixed or {}).items():
        if not assign(x, t, trail0):
            return None

    def search():
        try:
            x = f.index(-1)
        except ValueError:
            return True
        for t in range(target.n):
            if used[t]:
                continue
            trail = []
            if assign(x, t, trail) and search():
                return True
            undo(trail)
        return False

    if search():
        return ElementMap(source, target, tuple(f))
    return None


def is_congruence(alg: FiniteSkewLattice, p: EquivPartition):
    """None if ``p`` is a congruence, else a witness ``(x, x', y)``."""
    lab = np.array(p.labels)
    same = p.matrix()
    for T in (alg.meet, alg.join):
        # x ~ x' must give x∘y ~ x'∘y and y∘x ~ y∘x'
        for left in (True, False):
            res = lab[T] if left else lab[T.T]
            bad = same[:, :, None] & (res[:, None, :] != res[None, :, :])
            hits = np.argwhere(bad)
            if len(hits):
                return tuple(int(v) for v in hits[0])
    return None


def quotient_by(alg: FiniteSkewLattice, p: EquivPartition) -> FiniteSkewLattice:
    """Induced algebra on the classes of ``p``.

    Classes are named by their members' names joined with ``+``.
    """
    lab = np.array(p.labels)
    reps = np.array([c[0] for c in p.classes])
    tables = []
    for T in (alg.meet, alg.join):
        induced = lab[T[np.ix_(reps, reps)]]
        bad = lab[T] != induced[lab[:, None], lab[None, :]]
        hits = np.argwhere(bad)
        if len(hits):
            x, y = (int(v) for v in hits[0])
            witness = alg.labels((reps[lab[x]], reps[lab[y]], x, y))
            raise NotACongruence(
                f"classes of {witness[2]} and {witness[3]} do not determine a unique class",
                witness,
            )
        tables.append(induced)
    names = tuple("+".join(alg.names[i] for i in c) for c in p.classes)
    return FiniteSkewLattice(names, *tables)
