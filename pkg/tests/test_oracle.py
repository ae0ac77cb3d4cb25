"""Oracle layer: labeling, group law, counters, and model rules."""

import itertools
import random

import numpy as np
import pytest

from abelian import make_group, parse_group_spec, format_group_spec
from abelian.errors import ModelViolation

import helpers


def test_parse_group_spec():
    assert parse_group_spec("4x3x3") == (4, 3, 3)
    assert parse_group_spec(" 2X2 ") == (2, 2)
    assert parse_group_spec("1") == ()
    assert format_group_spec((4, 3, 3)) == "4x3x3"
    assert format_group_spec(()) == "1"
    for bad in ("", "0", "x", "2x", "2xq", "-3"):
        with pytest.raises(ValueError):
            parse_group_spec(bad)


def test_identity_labeling_is_mixed_radix():
    spec = make_group((4, 3, 3), label_seed=None)
    # least significant factor first: label = x1 + 4*x2 + 12*x3
    for lbl in range(spec.n):
        x1, x2, x3 = spec.tuple_of(lbl)
        assert lbl == x1 + 4 * x2 + 12 * x3
        assert spec.label_of((x1, x2, x3)) == lbl
    assert spec.identity_label == 0


def test_seeded_labeling_is_a_permutation():
    spec = make_group((2, 3, 5), label_seed=11)
    seen = {spec.label_of(t) for t in helpers.tuples_of(spec.factors)}
    assert seen == set(range(30))
    again = make_group((2, 3, 5), label_seed=11)
    assert [spec.tuple_of(i) for i in range(30)] == [
        again.tuple_of(i) for i in range(30)
    ]


@pytest.mark.parametrize("factors", [(6,), (2, 2, 2), (4, 3), (2, 2, 3, 3)])
def test_op_matches_tuple_arithmetic(factors):
    spec = make_group(factors, label_seed=5)
    oracle = spec.oracle("fs")
    for a, b in itertools.product(range(spec.n), repeat=2):
        got = oracle.op(a, b)
        want = spec.label_of(
            helpers.tuple_add(factors, spec.tuple_of(a), spec.tuple_of(b))
        )
        assert got == want


def test_group_axioms_small():
    spec = make_group((12,), label_seed=3)
    oracle = spec.oracle("fs")
    e = oracle.identity()
    labels = range(spec.n)
    for a in labels:
        assert oracle.op(e, a) == a
        assert oracle.op(a, e) == a
    for a, b in itertools.product(labels, repeat=2):
        assert oracle.op(a, b) == oracle.op(b, a)
    for a, b, c in itertools.product(range(0, spec.n, 3), repeat=3):
        assert oracle.op(oracle.op(a, b), c) == oracle.op(a, oracle.op(b, c))


def test_counters_track_each_access():
    spec = make_group((5, 5), label_seed=2)
    oracle = spec.oracle("fs")
    assert oracle.total_accesses == 0
    oracle.identity()
    assert oracle.counters == {"products": 0, "elements": 1}
    oracle.op(3, 4)
    assert oracle.counters == {"products": 1, "elements": 1}
    oracle.op_batch(2, np.arange(7, dtype=np.int64))
    assert oracle.counters == {"products": 8, "elements": 1}
    oracle.random_element(random.Random(0))
    assert oracle.counters == {"products": 8, "elements": 2}
    assert oracle.total_accesses == 10


def test_op_batch_matches_op():
    spec = make_group((3, 4, 5), label_seed=9)
    oracle = spec.oracle("fs")
    labels = np.arange(spec.n, dtype=np.int64)
    batch = oracle.op_batch(17, labels)
    singles = [spec.oracle("fs").op(17, int(x)) for x in labels]
    assert batch.tolist() == singles


def test_pow_matches_repeated_op():
    spec = make_group((6, 4), label_seed=4)
    oracle = spec.oracle("fs")
    e = oracle.identity()
    for a in (0, 5, 17, 23):
        acc = e
        for m in range(0, 30):
            assert oracle.pow(a, m) == acc
            acc = oracle.op(acc, a)


def test_pow_on_xor_group():
    spec = make_group((2, 2, 2, 2), label_seed=8)
    oracle = spec.oracle("fs")
    e = oracle.identity()
    for a in range(16):
        assert oracle.pow(a, 2) == e
        assert oracle.pow(a, 3) == a


def test_ps_model_hides_size_and_identity():
    oracle = make_group((3, 3), label_seed=1).oracle("ps")
    with pytest.raises(ModelViolation):
        oracle.size
    with pytest.raises(ModelViolation):
        oracle.identity()


def test_ps_model_rejects_unseen_labels():
    spec = make_group((8,), label_seed=6)
    oracle = spec.oracle("ps")
    rng = random.Random(1)
    a = oracle.random_element(rng)
    with pytest.raises(ModelViolation):
        oracle.op(a, (a + 1) % spec.n)
    b = oracle.random_element(rng)
    c = oracle.op(a, b)  # products of seen labels are fine
    d = oracle.op(c, a)  # results become usable too
    unseen = next(x for x in range(spec.n) if x not in {a, b, c, d})
    with pytest.raises(ModelViolation):
        oracle.op_batch(a, np.asarray([unseen], dtype=np.int64))


def test_fs_rejects_out_of_range_labels():
    oracle = make_group((4,), label_seed=0).oracle("fs")
    with pytest.raises(ValueError):
        oracle.op(0, 4)
    with pytest.raises(ValueError):
        oracle.op(-1, 0)


def test_trivial_group():
    spec = make_group((), label_seed=None)
    oracle = spec.oracle("fs")
    assert oracle.size == 1
    assert oracle.identity() == 0
    assert oracle.op(0, 0) == 0


def test_size_limit_enforced():
    with pytest.raises(ValueError):
        make_group((2,) * 27)
    with pytest.raises(ValueError):
        make_group((0, 3))


def test_mode_validation():
    spec = make_group((2,), label_seed=0)
    with pytest.raises(ValueError):
        spec.oracle("nope")