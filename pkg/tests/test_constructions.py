import json

import numpy as np
import pytest

from skewlat import (
    Lcg,
    PrimitiveSpec,
    check_embedding,
    compute_orders,
    direct_product,
    find_embedding,
    gen_chain,
    gen_corpus,
    gen_partial_functions,
    gen_primitive,
    gen_rectangular,
    gen_xn,
    gen_yn,
    green_partitions,
    handedness,
    is_categorical,
    is_order_closed,
    subalgebra,
    validate,
)
from skewlat.constructions import SpecInconsistent, gen_diamond, gen_pentagon, twisted_primitive_spec
from skewlat.algebra import is_commutative

from conftest import ix


def test_chains():
    assert gen_chain(1).n == 1
    c2 = gen_chain(2)
    a, b = ix(c2, "a", "b")
    assert c2.meet[a, b] == b and c2.join[a, b] == a
    c3 = gen_chain(3)
    assert validate(c3).ok and len(green_partitions(c3).D) == 3


def test_rectangular():
    assert gen_rectangular(1, 1).n == 1
    r = gen_rectangular(2, 2)
    assert r.n == 4 and validate(r).ok
    for x in range(4):
        for y in range(4):
            if r.meet[x, y] == r.meet[y, x]:
                assert x == y
    h = handedness(gen_rectangular(1, 2))
    assert h.left_handed != h.right_handed


@pytest.mark.parametrize("n", range(1, 7))
def test_xn_and_yn(n):
    x, y = gen_xn(n), gen_yn(n)
    assert x.n == y.n == 2 * n + 4
    assert validate(x).ok and validate(y).ok
    sizes = [len(c) for c in green_partitions(x).D.classes]
    assert sorted(sizes) == sorted([2, 2 * n, 2])


def test_x2_golden_products(x2):
    a1, a2, b1, b3, b4, c2 = ix(x2, "a1", "a2", "b1", "b3", "b4", "c2")
    assert x2.join[a1, c2] == a2
    assert x2.meet[a1, b4] == b3
    assert x2.join[b1, c2] == b4


def test_x2_parity_order(x2):
    geq = compute_orders(x2).order_geq
    odd = ix(x2, "b1", "b3")
    even = ix(x2, "b2", "b4")
    a1, a2, c1, c2 = ix(x2, "a1", "a2", "c1", "c2")
    assert all(geq[a1, b] and geq[b, c1] for b in odd)
    assert all(geq[a2, b] and geq[b, c2] for b in even)


def test_partial_functions():
    pf = gen_partial_functions(1, 1)
    assert pf.n == 2 and is_commutative(pf)
    assert find_embedding(gen_chain(2), pf) is not None
    pf22 = gen_partial_functions(2, 2)
    assert pf22.n == 9 and validate(pf22).ok
    h = handedness(pf22)
    assert h.right_handed and not h.left_handed


def test_singleton_primitive_is_two_chain():
    spec = PrimitiveSpec([["a"]], [["b"]], {(0, 0): [(0, 0)]})
    alg = gen_primitive(spec)
    assert np.array_equal(alg.meet, gen_chain(2).meet)


def test_twisted_primitive():
    t = gen_primitive(twisted_primitive_spec())
    assert validate(t).ok
    verdict = is_order_closed(t, "direct")
    assert not verdict and t.labels(verdict.witness) == ("a1", "a3", "b1", "b3")


def test_x2_top_layer_from_spec(x2):
    spec = PrimitiveSpec(
        [["a1", "a2"]],
        [["b1", "b2"], ["b3", "b4"]],
        {(0, 0): [(0, 0), (1, 1)], (0, 1): [(0, 0), (1, 1)]},
    )
    layer = subalgebra(x2, ix(x2, "a1", "a2", "b1", "b2", "b3", "b4"))
    assert gen_primitive(spec) == layer


def test_spec_json_round_trip():
    spec = twisted_primitive_spec("right")
    again = PrimitiveSpec.from_json(json.dumps(spec.to_json()))
    assert again == spec
    assert handedness(gen_primitive(again)).right_handed


def test_inconsistent_spec_is_rejected():
    # lower coset sizes disagree with the upper cosets
    spec = PrimitiveSpec([["a1", "a2"]], [["b1"]], {(0, 0): [(0, 0)]})
    with pytest.raises(SpecInconsistent):
        gen_primitive(spec)


def test_lattices():
    from skewlat import is_distributive

    assert is_categorical(gen_diamond()) and not is_distributive(gen_diamond())
    assert not is_distributive(gen_pentagon())
    assert gen_diamond().n == 5 and gen_pentagon().n == 5
    assert is_commutative(gen_pentagon())


def test_lcg_is_deterministic():
    a, b = Lcg(7), Lcg(7)
    assert [a.next() for _ in range(5)] == [b.next() for _ in range(5)]
    assert Lcg(0).next() == 167951807
    assert sorted(Lcg(3).shuffled(range(10))) == list(range(10))


def test_corpus_is_deterministic(corpus):
    again = gen_corpus(seed=0)
    assert [n for n, _ in again] == [n for n, _ in corpus]
    assert all(a == b for (_, a), (_, b) in zip(again, corpus))


def test_corpus_contents(corpus):
    assert len(corpus) >= 200
    assert any(not is_categorical(a) for _, a in corpus)
    assert any(not is_order_closed(a) for _, a in corpus)
    assert max(a.n for _, a in corpus) <= 24


def test_product_of_chain_and_rectangle_is_categorical():
    p = direct_product(gen_chain(3), gen_rectangular(1, 2))
    assert p.n == 6 and is_categorical(p)
    e = find_embedding(gen_chain(3), p)
    assert e is not None and check_embedding(e)


def test_square_of_x2_is_not_categorical(x2):
    verdict = is_categorical(direct_product(x2, x2))
    assert not verdict and verdict.witness is not None
