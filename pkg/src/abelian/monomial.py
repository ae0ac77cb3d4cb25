"""Exact arithmetic in monomial groups with triangular power relations.

A presentation (K, L) describes the Abelian group on x_1..x_t subject to
x_1^{k_1} = 1 and, for i >= 2, x_i^{k_i} = x_1^{l_{i,1}} ... x_{i-1}^{l_{i,i-1}}.
Elements are reduced exponent tuples (j_1..j_t) with 0 <= j_i < k_i, so the
group has exactly prod k_i elements.  All arithmetic is exact integer work on
exponent vectors; no oracle is touched except by ``psi``, which evaluates a
monomial through a matching generator chain of a black-box group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .detgen import evaluate_exponents
from .numtheory import prime_factors


@dataclass(frozen=True)
class Presentation:
    """Triangular presentation data: cyclic layer sizes K and relation rows L.

    Row i (0-based) holds the exponents of x_1..x_i in the relation for
    x_{i+1}, so row 0 is empty and 0 <= L[i][j] <= K[j]-1.
    """

    K: tuple[int, ...]
    L: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        K, L = self.K, self.L
        if len(L) != len(K):
            raise ValueError("presentation needs one relation row per generator")
        for i, k in enumerate(K):
            if k < 2:
                raise ValueError(f"layer sizes must be >= 2, got k_{i + 1} = {k}")
            if len(L[i]) != i:
                raise ValueError(f"relation row {i + 1} must have {i} entries")
            for j, l in enumerate(L[i]):
                if not 0 <= l < K[j]:
                    raise ValueError(
                        f"relation exponent L[{i + 1},{j + 1}] = {l} outside 0..{K[j] - 1}"
                    )

    @classmethod
    def from_chain(cls, chain) -> "Presentation":
        if chain.L is None:
            raise ValueError("chain carries no relation rows")
        return cls(tuple(chain.K), tuple(tuple(row) for row in chain.L))

    @property
    def t(self) -> int:
        return len(self.K)

    @property
    def n(self) -> int:
        n = 1
        for k in self.K:
            n *= k
        return n


def identity(pres: Presentation) -> tuple[int, ...]:
    return (0,) * pres.t


def reduce(pres: Presentation, exponents, intermediate_bound: int | None = None) -> tuple[int, ...]:
    """Canonical form of an arbitrary integer exponent vector.

    Works top down: the overflow (or deficit) of x_i folds into x_1..x_{i-1}
    through relation row i, and the carry of x_1 vanishes.  Floor division
    handles positive and negative exponents uniformly.  When
    ``intermediate_bound`` is set, every intermediate exponent magnitude is
    checked against it (products of reduced monomials stay under 2 n^2).
    """
    K, L = pres.K, pres.L
    cur = list(exponents)
    if len(cur) != len(K):
        raise ValueError(f"expected {len(K)} exponents, got {len(cur)}")
    for i in range(len(K) - 1, -1, -1):
        c, r = divmod(cur[i], K[i])
        cur[i] = r
        if c and i > 0:
            row = L[i]
            for j in range(i):
                if row[j]:
                    cur[j] += c * row[j]
                    if intermediate_bound is not None and abs(cur[j]) >= intermediate_bound:
                        raise OverflowError(
                            f"intermediate exponent {cur[j]} exceeded bound {intermediate_bound}"
                        )
    return tuple(cur)


def multiply(pres: Presentation, a, b) -> tuple[int, ...]:
    return reduce(pres, [x + y for x, y in zip(a, b)])


def inverse(pres: Presentation, a) -> tuple[int, ...]:
    return reduce(pres, [-x for x in a])


def mpow(pres: Presentation, a, e: int) -> tuple[int, ...]:
    """a^e for any integer e; commutativity lets the exponents just scale."""
    return reduce(pres, [e * x for x in a])


def order_of(pres: Presentation) -> int:
    return pres.n


def element_order(pres: Presentation, a) -> int:
    """Order of a reduced monomial, by divisor descent from the group order."""
    a = tuple(a)
    e = identity(pres)
    d = pres.n
    for p in prime_factors(pres.n) if pres.n > 1 else []:
        while d % p == 0 and mpow(pres, a, d // p) == e:
            d //= p
    return d


def enumerate_monomials(pres: Presentation):
    """All reduced monomials in mixed-radix order (identity first)."""
    for code in range(pres.n):
        vec = []
        c = code
        for k in pres.K:
            c, d = divmod(c, k)
            vec.append(d)
        yield tuple(vec)


def psi(pres: Presentation, chain, oracle, monomial) -> int:
    """Evaluate a monomial through a chain: Psi(x_1^{j_1}...x_t^{j_t}) = a_1^{j_1}...a_t^{j_t}.

    When (K, L) of the chain match the presentation this is an isomorphism
    onto the chain's group; it also maps unreduced exponent vectors
    consistently, Psi(reduce(v)) == product of pow(a_i, v_i).
    """
    if tuple(chain.K) != pres.K:
        raise ValueError("chain layer sizes do not match the presentation")
    if chain.L is not None and tuple(tuple(r) for r in chain.L) != pres.L:
        raise ValueError("chain relation rows do not match the presentation")
    if len(monomial) != pres.t:
        raise ValueError(f"expected {pres.t} exponents, got {len(monomial)}")
    return evaluate_exponents(chain, monomial, oracle)


# textual formats ----------------------------------------------------------

def format_monomial(m) -> str:
    parts = [f"x{i + 1}^{e}" for i, e in enumerate(m) if e]
    return " ".join(parts) if parts else "1"


def format_presentation(pres: Presentation) -> str:
    head = "K=" + ",".join(str(k) for k in pres.K)
    rels = [
        f"L[{i + 1},{j + 1}]={pres.L[i][j]}"
        for i in range(pres.t)
        for j in range(i)
    ]
    return head + ";" + (" " + " ".join(rels) if rels else "")


_REL = re.compile(r"L\[(\d+),(\d+)\]=(-?\d+)")


def parse_presentation(text: str) -> Presentation:
    """Parse the textual format ``K=4,3,3; L[2,1]=3 L[3,1]=2 L[3,2]=1``.

    Omitted relation exponents default to 0.
    """
    head, sep, tail = text.partition(";")
    head = head.strip()
    if not head.startswith("K="):
        raise ValueError("presentation text must start with K=")
    body = head[2:].strip()
    K = tuple(int(p) for p in body.split(",") if p.strip()) if body else ()
    rows = [[0] * i for i in range(len(K))]
    for token in tail.split():
        m = _REL.fullmatch(token)
        if m is None:
            raise ValueError(f"unparseable relation token {token!r}")
        i, j, l = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if not (2 <= i <= len(K) and 1 <= j < i):
            raise ValueError(f"relation index L[{i},{j}] out of range for t={len(K)}")
        rows[i - 1][j - 1] = l
    return Presentation(K, tuple(tuple(r) for r in rows))
