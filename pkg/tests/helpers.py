"""Independent verification oracles used by the test suite.

Everything here is deliberately naive and self-contained: tuple arithmetic
straight from the definition of a direct product, cofactor determinants,
gcd-of-minors invariant factors, brute-force closures and element orders.
None of it shares code with the library being tested, so an agreement
between the two is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
from math import gcd


# ---------------------------------------------------------------------------
# direct products of cyclic groups, from first principles


def tuples_of(factors):
    """All elements of Z_f1 x ... x Z_fk as tuples."""
    return list(itertools.product(*(range(f) for f in factors)))


def tuple_add(factors, a, b):
    return tuple((x + y) % f for x, y, f in zip(a, b, factors))


def tuple_neg(factors, a):
    return tuple((-x) % f for x, f in zip(a, factors))


def tuple_mul(factors, a, e: int):
    return tuple((x * e) % f for x, f in zip(a, factors))


def tuple_order(factors, a) -> int:
    """Order of an element by the lcm of componentwise orders."""
    out = 1
    for x, f in zip(a, factors):
        k = f // gcd(f, x) if x else 1
        out = out * k // gcd(out, k)
    return out


def closure(factors, gens):
    """Subgroup generated by ``gens``, by breadth-first closure."""
    seen = {tuple([0] * len(factors))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = tuple_add(factors, a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def label_order(oracle_spec, label: int) -> int:
    """Order of a label computed on the hidden tuples, no oracle accesses."""
    return tuple_order(oracle_spec.factors, oracle_spec.tuple_of(label))


# ---------------------------------------------------------------------------
# exact linear algebra, the slow way


def cofactor_det(m) -> int:
    """Determinant by cofactor expansion; fine for the small sizes used here."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j, head in enumerate(m[0]):
        if head == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * head * cofactor_det(minor)
    return total


def minors_gcd(m, k: int) -> int:
    """gcd of the absolute values of all k x k minors."""
    rows = range(len(m))
    cols = range(len(m[0]) if m else 0)
    g = 0
    for ri in itertools.combinations(rows, k):
        for ci in itertools.combinations(cols, k):
            sub = [[m[r][c] for c in ci] for r in ri]
            g = gcd(g, abs(cofactor_det(sub)))
    return g


def invariants_by_minors(m) -> list[int]:
    """Invariant factors of an integer matrix via determinantal divisors.

    d_k = gcd of all k x k minors; the k-th diagonal entry of the Smith form
    is d_k / d_(k-1).  Factors of 1 are dropped; a zero quotient chain stops
    (the matrix was singular).
    """
    size = min(len(m), len(m[0]) if m else 0)
    out = []
    prev = 1
    for k in range(1, size + 1):
        d = minors_gcd(m, k)
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return [x for x in out if x > 1]


def invariants_of_factors(factors) -> list[int]:
    """Ground-truth invariant factors of Z_f1 x ... via gcd-of-minors.

    Independent of any CRT reasoning: the group is presented by the diagonal
    relation matrix diag(f_1..f_k), whose Smith form is computed through
    determinantal divisors.
    """
    k = len(factors)
    if k == 0:
        return []
    m = [[factors[i] if i == j else 0 for j in range(k)] for i in range(k)]
    return invariants_by_minors(m)


# ---------------------------------------------------------------------------
# brute-force views of an oracle group (testing only: peeks at the labeling)


def all_labels_by_order(spec):
    """Map order -> sorted labels of that order, from the hidden tuples."""
    out: dict[int, list[int]] = {}
    for lbl in range(spec.n):
        out.setdefault(label_order(spec, lbl), []).append(lbl)
    return out


def subgroup_labels(spec, gen_labels):
    """Labels of the subgroup generated by the given labels."""
    gens = [spec.tuple_of(g) for g in gen_labels]
    return {spec.label_of(t) for t in closure(spec.factors, gens)}