"""Run every cross-validation invariant over a collection of algebras."""
from __future__ import annotations

import collections
from dataclasses import dataclass, field

from .algebra import check_embedding, direct_product, is_commutative, subalgebra, subalgebra_closure
from .classify import (
    PROPERTY_MODES,
    classify_report,
    is_categorical,
    is_order_closed,
    is_strictly_categorical,
)
from .constructions import Lcg
from .cosets import (
    ac_decomposition,
    coset_bijections,
    coset_partitions,
    comparable_pairs,
    determination_violation,
    parallel_classes,
    three_chains,
)
from .errors import InternalError
from .order import handed_variant_violation, handedness, maximal_images, structure, verify_pullback

# Identities derived under categoricity that also force it back.
_LH_EQUIVALENT = ("catshort-lh", "catsymm-lh", "catimp-lh")


@dataclass
class Disagreement:
    algebra: str
    invariant: str
    detail: str = ""
    internal: bool = False

    def __str__(self):
        return f"{self.algebra}: {self.invariant}" + (f" ({self.detail})" if self.detail else "")


def check_algebra(name, alg):
    """Returns (report, disagreements) for one algebra."""
    found = []

    def fail(invariant, detail="", internal=False):
        found.append(Disagreement(name, invariant, detail, internal))

    try:
        # order and decomposition
        st = structure(alg)
        if not verify_pullback(alg, st.green):
            fail("second decomposition (pullback)")
        if not is_commutative(maximal_images(alg, st.green).S_over_D):
            fail("S/D is a lattice")
        if not (st.orders.order_geq <= st.orders.preorder_geq).all():
            fail("x ≥ y implies x ⪰ y")
        hand = handedness(alg)
        for side, flag in (("left", hand.left_handed), ("right", hand.right_handed)):
            if flag and handed_variant_violation(alg, side, st.orders) is not None:
                fail(f"{side}-handed variant identity")

        # coset geometry
        for chain in comparable_pairs(alg):
            cosets = coset_partitions(chain, verify=True)
            coset_bijections(chain, cosets)
            witness = determination_violation(chain, cosets)
            if witness is not None:
                fail("cosets determine ∨ and ∧", str(alg.labels(witness)))
        parallel_classes(alg)
        for chain in three_chains(alg):
            ac_decomposition(chain)

        # classification
        report = classify_report(alg)
    except InternalError as exc:
        fail("internal invariant", str(exc), internal=True)
        return None, found

    v = report.verdicts
    for prop, agrees in report.agreement.items():
        if not agrees:
            modes = {m: r.holds for m, r in report.mode_results[prop].items()}
            fail(f"{prop} modes agree", str(modes))
    if v["distributive"] and not v["categorical"]:
        fail("distributive ⇒ categorical")
    if v["normal"] and not v["strictly_categorical"]:
        fail("normal ⇒ strictly categorical")
    if v["conormal"] and not v["strictly_categorical"]:
        fail("conormal ⇒ strictly categorical")
    if v["strictly_categorical"] and not v["categorical"]:
        fail("strictly categorical ⇒ categorical")
    if (report.forbidden is None) != v["categorical"]:
        fail("forbidden witness iff not categorical")
    if report.forbidden is not None and not check_embedding(report.forbidden.embedding):
        fail("forbidden witness embeds")
    aux = report.auxiliary
    if "strict-chain-conclusions" in aux and not aux["strict-chain-conclusions"]:
        fail("strict chain conclusions", str(alg.labels(aux["strict-chain-conclusions"].witness)))
    if aux["reflective-chains-factor"].holds != v["categorical"]:
        fail("categorical iff every reflective chain factors")
    for ident in _LH_EQUIVALENT:
        if ident in aux and aux[ident].holds != v["categorical"]:
            fail(f"{ident} iff categorical")
    for ident, verdict in aux.items():
        if ident.startswith("cat") and v["categorical"] and not verdict:
            fail(f"{ident} holds when categorical")
    return report, found


@dataclass
class Summary:
    checked: int = 0
    counts: dict = field(default_factory=lambda: collections.defaultdict(int))
    disagreements: list = field(default_factory=list)
    closure_checks: int = 0

    @property
    def ok(self):
        return not self.disagreements

    @property
    def internal(self):
        return any(d.internal for d in self.disagreements)

    def table(self) -> str:
        lines = [f"algebras checked: {self.checked}", f"variety closure checks: {self.closure_checks}"]
        width = max(len(p) for p in PROPERTY_MODES)
        lines.append(f"{'property'.ljust(width)}  true  false")
        for prop in PROPERTY_MODES:
            t = self.counts[prop]
            lines.append(f"{prop.ljust(width)}  {t:4d}  {self.checked - t:5d}")
        lines.append(f"disagreements: {len(self.disagreements)}")
        lines.extend(f"  {d}" for d in self.disagreements)
        return "\n".join(lines)


_VARIETIES = {
    "categorical": lambda a: is_categorical(a, "structural"),
    "strictly_categorical": lambda a: is_strictly_categorical(a, "identity"),
    "order_closed": lambda a: is_order_closed(a, "direct"),
}


def _closure_spot_checks(items, reports, seed, summary, max_size=24, samples=30):
    rng = Lcg(seed ^ 0x5EED)
    for prop, test in _VARIETIES.items():
        members = [(n, a) for (n, a), r in zip(items, reports) if r is not None and r.verdicts[prop]]
        if not members:
            continue
        for _ in range(samples):
            (n1, a1), (n2, a2) = rng.choice(members), rng.choice(members)
            if a1.n * a2.n <= max_size:
                summary.closure_checks += 1
                if not test(direct_product(a1, a2)):
                    summary.disagreements.append(
                        Disagreement(f"{n1}*{n2}", f"{prop} closed under products")
                    )
            seed_set = {rng.below(a1.n) for _ in range(2)}
            sub = subalgebra(a1, subalgebra_closure(a1, seed_set))
            summary.closure_checks += 1
            if not test(sub):
                summary.disagreements.append(
                    Disagreement(f"sub({n1})", f"{prop} closed under subalgebras")
                )


def crosscheck(items, seed=0) -> Summary:
    """``items`` are (name, algebra) pairs, already validated."""
    summary = Summary()
    reports = []
    for name, alg in items:
        report, found = check_algebra(name, alg)
        reports.append(report)
        summary.checked += 1
        summary.disagreements.extend(found)
        if report is not None:
            for prop, holds in report.verdicts.items():
                summary.counts[prop] += holds
    _closure_spot_checks(items, reports, seed, summary)
    return summary
