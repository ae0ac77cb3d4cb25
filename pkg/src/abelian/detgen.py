"""Deterministic generator chains by exhaustive coset enumeration.

``generators`` finds a chain a_1..a_t with minimal relative orders k_i whose
partial products of cyclic layers tile the whole group (prod k_i = |G|,
t <= log2 |G|).  ``generator_plus`` additionally records, for every element,
its exponent vector over the chain, and the triangular relation rows
a_i^{k_i} = a_1^{l_1} ... a_{i-1}^{l_{i-1}}.

Both need the fs model: they touch every element exactly once, building
G_i = G_{i-1} + a_i G_{i-1} + ... + a_i^{k_i - 1} G_{i-1} from disjoint
cosets, for O(|G|) products overall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistencyError, ModelViolation


@dataclass
class GeneratorChain:
    """A generator chain (A, K, L) plus the identity label.

    ``L[i]`` is the relation row of generator i (0-based): the exponents
    expressing a_i^{k_i} over a_0..a_{i-1}, so row i has length i and row 0
    is empty.  Algorithm variants that do not compute relations leave L as
    None.  A chain whose generators span a subgroup H <= G doubles as the
    subgroup handle for the randomized membership machinery.
    """

    A: list[int]
    K: list[int]
    L: list[tuple[int, ...]] | None
    identity: int
    size_estimate: object | None = field(default=None, repr=False, compare=False)

    @property
    def t(self) -> int:
        return len(self.A)

    def order(self) -> int:
        n = 1
        for k in self.K:
            n *= k
        return n

    def prefix(self, r: int) -> "GeneratorChain":
        return GeneratorChain(
            self.A[:r], self.K[:r], None if self.L is None else self.L[:r], self.identity
        )


def evaluate_exponents(chain: GeneratorChain, exponents, oracle) -> int:
    """The label of a_1^{e_1} * a_2^{e_2} * ...; shorter vectors evaluate a prefix."""
    acc = None
    for a, e in zip(chain.A, exponents):
        if e == 0:
            continue
        term = oracle.pow(a, e, identity=chain.identity)
        acc = term if acc is None else oracle.op(acc, term)
    return chain.identity if acc is None else acc


def verify_chain(chain: GeneratorChain, oracle) -> bool:
    """Check each relation a_i^{k_i} == evaluation of row L[i]; exact, O(t log n) products."""
    if chain.L is None:
        raise ValueError("chain carries no relation rows")
    for i in range(chain.t):
        lhs = oracle.pow(chain.A[i], chain.K[i], identity=chain.identity)
        rhs = evaluate_exponents(chain, chain.L[i], oracle)
        if lhs != rhs:
            return False
    return True


class ElementSet:
    """Bitmap-backed element set over labels 0..n-1 with insertion order."""

    def __init__(self, n: int, members=()):
        self.n = n
        self.bitmap = np.zeros(n, dtype=bool)
        self.order = np.empty(n, dtype=np.int64)
        self.size = 0
        self._cursor = 0
        for x in members:
            self.add(int(x))

    def __len__(self):
        return self.size

    def __contains__(self, label):
        return bool(self.bitmap[label])

    def add(self, label: int):
        if not self.bitmap[label]:
            self.bitmap[label] = True
            self.order[self.size] = label
            self.size += 1

    def add_batch(self, labels: np.ndarray):
        if self.bitmap[labels].any():
            raise InconsistencyError("coset expansion touched an existing element")
        self.bitmap[labels] = True
        self.order[self.size : self.size + labels.size] = labels
        self.size += int(labels.size)

    def members(self) -> np.ndarray:
        return self.order[: self.size]

    def smallest_absent(self) -> int:
        while self._cursor < self.n and self.bitmap[self._cursor]:
            self._cursor += 1
        if self._cursor >= self.n:
            raise ValueError("the set already contains every label")
        return self._cursor


def choose_outside_det(g_set: ElementSet, oracle=None) -> int:
    """Smallest label not yet in the set (the deterministic choice rule)."""
    return g_set.smallest_absent()


@dataclass
class RepresentationTable:
    """label -> exponent vector over the chain, for every element of G.

    Vectors are stored packed as single mixed-radix codes (one int per
    element) and decoded on access; the map is a bijection onto
    prod [0, k_i).
    """

    K: list[int]
    codes: np.ndarray

    def __len__(self):
        return int(self.codes.size)

    def vector(self, label: int) -> tuple[int, ...]:
        return decode_code(int(self.codes[label]), self.K)

    def items(self):
        for label in range(self.codes.size):
            yield label, self.vector(label)


def decode_code(code: int, K) -> tuple[int, ...]:
    out = []
    for k in K:
        code, d = divmod(code, k)
        out.append(d)
    return tuple(out)


def encode_vector(vec, K) -> int:
    code = 0
    mult = 1
    for d, k in zip(vec, K):
        code += d * mult
        mult *= k
    return code


def _build_chain(oracle, want_table: bool):
    if oracle.mode != "fs":
        raise ModelViolation("deterministic generator construction needs the fs model")
    n = oracle.size
    e = oracle.identity()
    g_set = ElementSet(n, [e])
    codes = np.zeros(n, dtype=np.int64) if want_table else None
    A: list[int] = []
    K: list[int] = []
    L: list[tuple[int, ...]] = []
    weight = 1
    while g_set.size < n:
        a = choose_outside_det(g_set)
        # minimal k with a^k inside the current subgroup, by linear scan
        k = 1
        p = a
        while p not in g_set:
            p = oracle.op(p, a)
            k += 1
        if want_table:
            L.append(decode_code(int(codes[p]), K))
        base = g_set.members()  # stable: later appends land beyond this view
        pw = a
        for j in range(1, k):
            if j > 1:
                pw = oracle.op(pw, a)
            new = oracle.op_batch(pw, base)
            if want_table:
                codes[new] = codes[base] + j * weight
            g_set.add_batch(new)
        A.append(a)
        K.append(k)
        weight *= k
    chain = GeneratorChain(A, K, L if want_table else None, e)
    if want_table:
        return chain, RepresentationTable(list(K), codes)
    return chain


def generators(oracle) -> GeneratorChain:
    """Generator chain (A, K) alone; relation rows are not computed."""
    return _build_chain(oracle, want_table=False)


def generator_plus(oracle):
    """Generator chain with relation rows plus the full representation table."""
    return _build_chain(oracle, want_table=True)
