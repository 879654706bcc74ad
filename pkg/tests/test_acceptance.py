"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict in ``RESULTS``; the summary
is printed at the end of the pytest run (see conftest) or directly when this
file is executed as a script.
"""
import time

import numpy as np
import pytest

from skewlat import (
    check_embedding,
    classify_report,
    coset_bijections,
    coset_partitions,
    find_embedding,
    find_forbidden,
    gen_corpus,
    gen_primitive,
    gen_xn,
    gen_yn,
    is_categorical,
    is_order_closed,
    is_strictly_categorical,
    parallel_classes,
    validate,
    verify_pullback,
)
from skewlat.algebra import is_commutative
from skewlat.classify import (
    CATEGORICAL_MODES,
    ORDER_CLOSED_MODES,
    STRICT_MODES,
    reflective_chains_factor,
    strict_chain_conclusions,
)
from skewlat.constructions import twisted_primitive_spec
from skewlat.cosets import (
    comparable_pairs,
    determination_violation,
    reflective_factorization,
    three_chains,
)
from skewlat.order import maximal_images, structure

# pinned limits
PER_ALGEBRA_SECONDS = 1.0
CORPUS_SECONDS = 60.0
MIN_CORPUS = 200
MAX_ELEMENTS = 24

RESULTS = {}


def record(number, ok, detail):
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[number]


@pytest.fixture(scope="module")
def timed_corpus():
    start = time.perf_counter()
    corpus = gen_corpus(seed=0)
    return corpus, time.perf_counter() - start


@pytest.fixture(scope="module")
def reports(timed_corpus):
    corpus, _ = timed_corpus
    return [classify_report(alg) for _, alg in corpus]


def test_criterion_1_xn_yn_golden():
    problems = []
    slowest = 0.0
    for n in range(1, 7):
        for gen in (gen_xn, gen_yn):
            start = time.perf_counter()
            alg = gen(n)
            if not validate(alg).ok or alg.n != 2 * n + 4:
                problems.append(f"{gen.__name__}({n}) invalid")
            verdicts = {bool(is_categorical(alg, m)) for m in CATEGORICAL_MODES}
            if verdicts != {n == 1}:
                problems.append(f"{gen.__name__}({n}) categorical modes {verdicts}")
            slowest = max(slowest, time.perf_counter() - start)
    x2 = gen_xn(2)
    i = x2.index
    golden = (
        x2.join[i("a1"), i("c2")] == i("a2"),
        x2.meet[i("a1"), i("b4")] == i("b3"),
        x2.join[i("b1"), i("c2")] == i("b4"),
    )
    if not all(golden):
        problems.append(f"X_2 products {golden}")
    if slowest >= PER_ALGEBRA_SECONDS:
        problems.append(f"slowest algebra {slowest:.3f}s")
    record(1, not problems, "; ".join(problems) or f"12 algebras, slowest {slowest:.3f}s")


def test_criterion_2_forbidden_witness(timed_corpus, reports):
    corpus, _ = timed_corpus
    problems = []
    for n in range(2, 7):
        for gen, kind in ((gen_xn, "X"), (gen_yn, "Y")):
            w = find_forbidden(gen(n))
            if w is None or w.kind != kind or w.n != n or not check_embedding(w.embedding):
                problems.append(f"{gen.__name__}({n})")
    categorical = [(name, alg) for (name, alg), r in zip(corpus, reports) if r.verdicts["categorical"]]
    problems += [name for name, alg in categorical if find_forbidden(alg) is not None]
    for m in range(1, 5):
        for n in range(1, 5):
            found = find_embedding(gen_xn(m), gen_xn(n))
            if (found is not None) != (m == n):
                problems.append(f"X_{m} into X_{n}")
    detail = f"X/Y n=2..6 exact; none on {len(categorical)} categorical algebras; X_m into X_n only for m=n (n<=4)"
    record(2, not problems, "; ".join(problems) or detail)


def test_criterion_3_categorical_modes(timed_corpus):
    corpus, gen_seconds = timed_corpus
    start = time.perf_counter()
    bad = [
        name
        for name, alg in corpus
        if len({bool(is_categorical(alg, m)) for m in CATEGORICAL_MODES}) != 1
    ]
    total = gen_seconds + time.perf_counter() - start
    sizes_ok = len(corpus) >= MIN_CORPUS and max(a.n for _, a in corpus) <= MAX_ELEMENTS
    ok = not bad and sizes_ok and total < CORPUS_SECONDS
    detail = f"{len(corpus)} algebras, {len(corpus) - len(bad)} agree, {total:.1f}s"
    record(3, ok, detail + (f"; disagree on {bad[:5]}" if bad else ""))


def test_criterion_4_strict_modes(timed_corpus, reports):
    corpus, _ = timed_corpus
    bad = [
        name
        for name, alg in corpus
        if len({bool(is_strictly_categorical(alg, m)) for m in STRICT_MODES}) != 1
    ]
    strict = [(n, a) for (n, a), r in zip(corpus, reports) if r.verdicts["strictly_categorical"]]
    chains = sum(len(three_chains(a)) for _, a in strict)
    failed = [name for name, alg in strict if not strict_chain_conclusions(alg)]
    detail = f"8 modes agree on {len(corpus) - len(bad)}/{len(corpus)}; conclusions hold on {chains} chains in {len(strict)} algebras"
    record(4, not bad and not failed, detail + (f"; {bad[:5]} {failed[:5]}" if bad or failed else ""))


def test_criterion_5_implications(timed_corpus, reports):
    corpus, _ = timed_corpus
    rules = (
        ("distributive", "categorical"),
        ("normal", "strictly_categorical"),
        ("conormal", "strictly_categorical"),
        ("strictly_categorical", "categorical"),
    )
    counter = [
        f"{name}: {p}=>{q}"
        for (name, _), r in zip(corpus, reports)
        for p, q in rules
        if r.verdicts[p] and not r.verdicts[q]
    ]
    record(5, not counter, "; ".join(counter[:5]) or f"0 counterexamples over {len(corpus)} algebras")


def test_criterion_6_order_closed(timed_corpus):
    corpus, _ = timed_corpus
    bad = [
        name
        for name, alg in corpus
        if len({bool(is_order_closed(alg, m)) for m in ORDER_CLOSED_MODES}) != 1
    ]
    xn_ok = all(is_order_closed(gen_xn(n), m) for n in range(1, 7) for m in ORDER_CLOSED_MODES)
    twisted = gen_primitive(twisted_primitive_spec())
    verdict = is_order_closed(twisted, "direct")
    witness = twisted.labels(verdict.witness) if verdict.witness else None
    ok = not bad and xn_ok and not verdict and witness == ("a1", "a3", "b1", "b3")
    record(6, ok, f"modes agree on {len(corpus) - len(bad)}/{len(corpus)}; X_n closed={xn_ok}; twisted witness {witness}")


def test_criterion_7_decompositions(timed_corpus):
    corpus, _ = timed_corpus
    problems = []
    classes = 0
    for name, alg in corpus:
        if not verify_pullback(alg):
            problems.append(f"{name} pullback")
        if not is_commutative(maximal_images(alg).S_over_D):
            problems.append(f"{name} S/D")
        for cls in structure(alg).classes:
            c = np.array(cls)
            classes += 1
            if not (alg.meet[alg.meet[c[:, None], c[None, :]], c[:, None]] == c[:, None]).all():
                problems.append(f"{name} class {alg.labels(cls)}")
    record(7, not problems, "; ".join(problems[:5]) or f"{len(corpus)} algebras, {classes} rectangular D-classes")


def _is_isomorphism(alg, mapping):
    dom = list(mapping)
    for x in dom:
        for y in dom:
            for T in (alg.meet, alg.join):
                if mapping.get(int(T[x, y])) != T[mapping[x], mapping[y]]:
                    return False
    return True


def test_criterion_8_coset_machinery(timed_corpus):
    corpus, _ = timed_corpus
    problems = []
    pairs = 0
    for name, alg in corpus:
        bijections = []
        for chain in comparable_pairs(alg):
            pairs += 1
            cosets = coset_partitions(chain, verify=True)
            for blocks, cls in ((cosets.upper_cosets, chain.classes[0]), (cosets.lower_cosets, chain.classes[1])):
                if sorted(x for b in blocks for x in b) != sorted(cls):
                    problems.append(f"{name} cosets do not partition")
            if len({len(b) for b in cosets.upper_cosets + cosets.lower_cosets}) != 1:
                problems.append(f"{name} coset sizes")
            found = coset_bijections(chain, cosets)
            if not all(_is_isomorphism(alg, b.mapping) for b in found):
                problems.append(f"{name} bijection not an isomorphism")
            if determination_violation(chain, cosets) is not None:
                problems.append(f"{name} tables not determined by cosets")
            bijections += found
        if {b.pairs for b in bijections} != set(parallel_classes(alg)):
            problems.append(f"{name} parallel classes")
    record(8, not problems, "; ".join(problems[:5]) or f"{pairs} comparable class pairs in {len(corpus)} algebras")


def test_criterion_9_reflective_chains(timed_corpus, reports):
    corpus, _ = timed_corpus
    bad = [
        name
        for (name, alg), r in zip(corpus, reports)
        if bool(reflective_chains_factor(alg)) != r.verdicts["categorical"]
    ]
    x1 = reflective_factorization(three_chains(gen_xn(1))[0])
    x2 = reflective_factorization(three_chains(gen_xn(2))[0])
    examples = x1.reflective and x1.factors and x2.reflective and not x2.factors
    chains = sum(len(three_chains(a)) for _, a in corpus)
    record(9, not bad and examples, f"biconditional on {len(corpus) - len(bad)}/{len(corpus)} algebras ({chains} 3-chains); X_1 factors, X_2 does not: {examples}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
