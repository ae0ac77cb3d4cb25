"""Monomial group arithmetic and the evaluation map into an oracle group."""

import itertools
import random

import pytest

from abelian import make_group
from abelian.detgen import GeneratorChain, evaluate_exponents, verify_chain
from abelian import monomial as mn

import helpers

# The running example used throughout: K = (4, 3, 3) with relations
# x2^3 = x1^3 and x3^3 = x1^2 x2, an order-36 group.
PRES = mn.Presentation(K=(4, 3, 3), L=((), (3,), (2, 1)))

# A chain in the plainly-labeled Z_36 realizing that presentation:
# 9 has order 4; 21 gains order 3 over <9> with 3*21 = 27 = 3*9;
# 1 gains order 3 over <9,21> with 3*1 = 3 = 2*9 + 1*21 (mod 36).
CHAIN36 = GeneratorChain(A=[9, 21, 1], K=[4, 3, 3], L=[(), (3,), (2, 1)], identity=0)
SPEC36 = make_group((36,), label_seed=None)


def test_fixture_chain_is_valid():
    oracle = SPEC36.oracle("fs")
    assert verify_chain(CHAIN36, oracle)
    assert mn.Presentation.from_chain(CHAIN36) == PRES


def test_presentation_validation():
    with pytest.raises(ValueError):
        mn.Presentation(K=(1, 3), L=((), ()))  # k below 2
    with pytest.raises(ValueError):
        mn.Presentation(K=(4, 3), L=((),))  # missing row
    with pytest.raises(ValueError):
        mn.Presentation(K=(4, 3), L=((), (4,)))  # exponent >= K[0]
    with pytest.raises(ValueError):
        mn.Presentation(K=(4, 3), L=((1,), ()))  # row length mismatch


def test_worked_multiplication():
    assert mn.multiply(PRES, (2, 2, 2), (3, 1, 2)) == (2, 1, 1)


def test_reduce_handles_large_and_unreduced_exponents():
    assert mn.reduce(PRES, (0, 0, 0)) == (0, 0, 0)
    assert mn.reduce(PRES, (5, 3, 4)) == mn.multiply(
        PRES, mn.reduce(PRES, (5, 3, 0)), mn.reduce(PRES, (0, 0, 4))
    )
    # reducing twice changes nothing
    for raw in [(7, 5, 9), (3, 2, 2), (100, 100, 100)]:
        once = mn.reduce(PRES, raw)
        assert mn.reduce(PRES, once) == once
        assert all(0 <= j < k for j, k in zip(once, PRES.K))


def test_enumerate_monomials_counts_and_identity():
    all_monos = list(mn.enumerate_monomials(PRES))
    assert len(all_monos) == 36
    assert len(set(all_monos)) == 36
    assert mn.identity(PRES) == (0, 0, 0)
    assert mn.order_of(PRES) == 36


def test_inverse_and_mpow():
    e = mn.identity(PRES)
    for a in mn.enumerate_monomials(PRES):
        assert mn.multiply(PRES, a, mn.inverse(PRES, a)) == e
        acc = e
        for k in range(8):
            assert mn.mpow(PRES, a, k) == acc
            acc = mn.multiply(PRES, acc, a)


def test_element_order_matches_brute_force():
    e = mn.identity(PRES)
    for a in mn.enumerate_monomials(PRES):
        acc = a
        order = 1
        while acc != e:
            acc = mn.multiply(PRES, acc, a)
            order += 1
        assert mn.element_order(PRES, a) == order


def test_psi_is_bijective_homomorphism_on_fixture():
    oracle = SPEC36.oracle("fs")
    images = {}
    for mono in mn.enumerate_monomials(PRES):
        images[mono] = mn.psi(PRES, CHAIN36, oracle, mono)
    assert len(set(images.values())) == 36  # injective onto all labels
    assert images[mn.identity(PRES)] == 0
    rng = random.Random(7)
    monos = list(images)
    for _ in range(200):
        u, v = rng.choice(monos), rng.choice(monos)
        uv = mn.multiply(PRES, u, v)
        assert images[uv] == oracle.op(images[u], images[v])


def test_psi_single_generator_fixture():
    spec = make_group((6,), label_seed=None)
    oracle = spec.oracle("fs")
    chain = GeneratorChain(A=[1], K=[6], L=[()], identity=0)
    pres = mn.Presentation.from_chain(chain)
    seen = set()
    for d in range(6):
        lbl = mn.psi(pres, chain, oracle, (d,))
        assert lbl == oracle.pow(1, d)
        seen.add(lbl)
    assert seen == set(range(6))


def test_unreduced_exponent_identity():
    """Evaluating raw exponents elementwise equals evaluating their reduction."""
    oracle = SPEC36.oracle("fs")
    rng = random.Random(13)
    for _ in range(100):
        raw = [rng.randrange(0, 25) for _ in range(3)]
        direct = 0  # identity label
        for a, l in zip(CHAIN36.A, raw):
            direct = oracle.op(direct, oracle.pow(a, l))
        via_reduce = mn.psi(PRES, CHAIN36, oracle, mn.reduce(PRES, raw))
        assert direct == via_reduce


def test_psi_bijective_on_every_small_fixture():
    for factors, seed in [((2, 2), 3), ((8,), 1), ((3, 4), 5), ((2, 2, 2, 2), 2)]:
        spec = make_group(factors, label_seed=seed)
        oracle = spec.oracle("fs")
        from abelian.detgen import generators

        chain = generators(oracle)
        pres = mn.Presentation.from_chain(chain)
        images = [
            mn.psi(pres, chain, oracle, m) for m in mn.enumerate_monomials(pres)
        ]
        assert sorted(images) == list(range(spec.n))


def test_format_parse_roundtrip():
    text = mn.format_presentation(PRES)
    assert mn.parse_presentation(text) == PRES
    assert mn.parse_presentation("K=4,3,3; L[2,1]=3 L[3,1]=2 L[3,2]=1") == PRES
    assert mn.parse_presentation("K=2,2;") == mn.Presentation((2, 2), ((), (0,)))
    for bad in ["", "4,3", "K=4,3; L[9,1]=0", "K=4,3; nonsense"]:
        with pytest.raises(ValueError):
            mn.parse_presentation(bad)


def test_format_monomial():
    assert mn.format_monomial((2, 1, 1)) == "x1^2 x2^1 x3^1"
    assert mn.format_monomial((0, 0)) == "1"


def test_evaluate_exponents_prefix_semantics():
    oracle = SPEC36.oracle("fs")
    # shorter exponent vectors апply to the chain prefix
    assert evaluate_exponents(CHAIN36, (2,), oracle) == oracle.pow(9, 2)
    assert evaluate_exponents(CHAIN36, (1, 1), oracle) == oracle.op(9, 21)
    assert evaluate_exponents(CHAIN36, (), oracle) == 0