"""Randomized generator discovery through collision-based membership testing.

The deterministic builder touches every element of the group; the routines
here replace that sweep with birthday-style sampling so the expected access
count scales like sqrt(n) * polylog(n).  Membership of x in a known subgroup
H is decided by translating a dictionary D of elements of H by x and looking
for a hit in a pool of uniform samples of H: a hit yields the equation
x * d = r and therefore an exponent-vector certificate for x, so True
answers are always correct and only False answers carry a bounded one-sided
error.  Everything randomized either returns a verified certificate or
raises RandomizedFailure, which callers may treat as retryable bad luck.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log, log2, sqrt

import numpy as np

from . import monomial as mn
from .detgen import GeneratorChain, evaluate_exponents
from .errors import InconsistencyError, RandomizedFailure
from .numtheory import factorize

# Sloppiness allowed to a size estimate before a comparison calls it a
# mismatch: the true size may undershoot the square estimate by at most
# this factor times log2 of the estimate.
ESTIMATE_SLACK = 70

_SAMPLE_CAP = 10**9


def sample_size(budget: int, delta: float) -> int:
    """Pool size for which a collision miss is no more likely than (delta/2)^2.

    ``budget`` is an upper bound on the order of any subgroup the pool will
    be tested against.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    return max(1, ceil(sqrt(2.0 * budget * log(2.0 / delta))))


class SubgroupTables:
    """Membership machinery for the subgroup generated by a growing chain.

    Two structures are maintained.  D holds the first min(s, |H|) elements of
    H in mixed-radix order over the chain; while it covers all of H entirely,
    membership is an exact dictionary lookup costing no oracle accesses.
    Once H outgrows D, a pool R2 of uniform samples of H is built (lazily,
    on the first test that needs it) and membership becomes the collision
    test described in the module docstring.  Both structures store exponent
    vectors alongside labels, so every hit doubles as a certificate.

    The collision test uses only the first sample_size(|H|, delta) entries
    of D and keeps R2 at that same size, so each test costs O(sqrt(|H|))
    products rather than O(sqrt(budget)); summed over a chain whose subgroup
    doubles every round this keeps the whole build at O(sqrt(n)) up to logs.

    ``extend`` appends one generator: D grows coset by coset while it still
    covers H, each R2 sample r is refreshed to r * a^j with j uniform (which
    keeps the pool exactly uniform over the enlarged subgroup), and R2 is
    topped up with fresh uniform samples to match the grown subgroup.
    """

    def __init__(self, oracle, rng, s: int, identity: int, delta: float = 1e-2):
        self.oracle = oracle
        self.rng = rng
        self.s = int(s)
        self.delta = float(delta)
        self.identity = int(identity)
        self.gens: list[int] = []
        self.orders: list[int] = []
        self.relations: list[tuple[int, ...]] = []
        self.order = 1
        self._d_labels: list[int] = [self.identity]
        self._d_vecs: list[tuple[int, ...]] = [()]
        self._d_map: dict[int, tuple[int, ...]] = {self.identity: ()}
        self._r2_labels: list[int] = []
        self._r2_vecs: list[tuple[int, ...]] = []
        self._r2_map: dict[int, tuple[int, ...]] = {}
        self._r2_ready = False
        self._pres: mn.Presentation | None = None

    @classmethod
    def from_chain(
        cls, oracle, rng, s: int, chain: GeneratorChain, delta: float = 1e-2
    ) -> "SubgroupTables":
        """Rebuild tables for an existing chain (its relation rows required)."""
        if chain.L is None:
            raise ValueError("the chain must carry relation rows")
        tables = cls(oracle, rng, s, chain.identity, delta)
        for a, k, row in zip(chain.A, chain.K, chain.L):
            tables.extend(a, k, row)
        return tables

    @property
    def t(self) -> int:
        return len(self.gens)

    @property
    def _s_eff(self) -> int:
        """Pool size matched to the current subgroup, capped at the budget's."""
        return min(self.s, sample_size(self.order, self.delta))

    @property
    def exact(self) -> bool:
        return len(self._d_labels) == self.order

    def chain(self) -> GeneratorChain:
        return GeneratorChain(
            A=list(self.gens),
            K=list(self.orders),
            L=list(self.relations),
            identity=self.identity,
        )

    def presentation(self) -> mn.Presentation:
        if self._pres is None:
            self._pres = mn.Presentation(
                tuple(self.orders), tuple(self.relations)
            )
        return self._pres

    def extend(self, a: int, k: int, relation) -> None:
        """Append generator ``a`` of coset order ``k`` with a^k = relation."""
        relation = tuple(int(x) for x in relation)
        if len(relation) != self.t:
            raise ValueError(f"relation row must have length {self.t}")
        if k < 2:
            raise ValueError("coset orders below 2 never extend the subgroup")
        covered = self.exact
        old_labels = self._d_labels[:]
        old_vecs = self._d_vecs[:]
        self.gens.append(int(a))
        self.orders.append(int(k))
        self.relations.append(relation)
        self.order *= int(k)
        self._pres = None
        self._d_vecs = [v + (0,) for v in self._d_vecs]
        self._d_map = dict(zip(self._d_labels, self._d_vecs))
        if covered and len(self._d_labels) < self.s:
            pw = a
            for j in range(1, k):
                if j > 1:
                    pw = self.oracle.op(pw, a)
                need = self.s - len(self._d_labels)
                if need <= 0:
                    break
                take = min(len(old_labels), need)
                batch = self.oracle.op_batch(
                    pw, np.asarray(old_labels[:take], dtype=np.int64)
                )
                for lbl, v in zip(batch, old_vecs[:take]):
                    lbl = int(lbl)
                    if lbl in self._d_map:
                        raise RandomizedFailure(
                            "duplicate label while extending the dictionary: "
                            "a coset order was not minimal"
                        )
                    vec = v + (j,)
                    self._d_labels.append(lbl)
                    self._d_vecs.append(vec)
                    self._d_map[lbl] = vec
        if self._r2_ready:
            self._extend_r2(a, k)

    def _ensure_r2(self) -> None:
        if self._r2_ready:
            return
        chain = self.chain()
        labels: list[int] = []
        vecs: list[tuple[int, ...]] = []
        for _ in range(self._s_eff):
            vec = tuple(self.rng.randrange(k) for k in self.orders)
            labels.append(evaluate_exponents(chain, vec, self.oracle))
            vecs.append(vec)
        self._r2_labels = labels
        self._r2_vecs = vecs
        self._r2_map = dict(zip(labels, vecs))
        self._r2_ready = True

    def _extend_r2(self, a: int, k: int) -> None:
        js = [self.rng.randrange(k) for _ in self._r2_labels]
        powers: dict[int, int] = {1: a}
        pw = a
        for j in range(2, k):
            pw = self.oracle.op(pw, a)
            powers[j] = pw
        buckets: dict[int, list[int]] = {}
        for idx, j in enumerate(js):
            if j:
                buckets.setdefault(j, []).append(idx)
        for j, idxs in buckets.items():
            batch = self.oracle.op_batch(
                powers[j],
                np.asarray([self._r2_labels[i] for i in idxs], dtype=np.int64),
            )
            for i, lbl in zip(idxs, batch):
                self._r2_labels[i] = int(lbl)
        self._r2_vecs = [v + (j,) for v, j in zip(self._r2_vecs, js)]
        chain = self.chain()
        for _ in range(self._s_eff - len(self._r2_labels)):
            vec = tuple(self.rng.randrange(kk) for kk in self.orders)
            self._r2_labels.append(evaluate_exponents(chain, vec, self.oracle))
            self._r2_vecs.append(vec)
        self._r2_map = dict(zip(self._r2_labels, self._r2_vecs))

    def membership(self, x: int) -> tuple[bool, tuple[int, ...] | None]:
        """One-sided membership test with certificate.

        Returns (True, exponent vector) or (False, None).  True answers are
        always correct; a False answer for an actual member happens with
        probability at most (delta/2)^2 for the delta the pool was sized to.
        """
        if self.exact:
            vec = self._d_map.get(x)
            return (vec is not None), vec
        self._ensure_r2()
        use = min(len(self._d_labels), self._s_eff)
        batch = self.oracle.op_batch(
            x, np.asarray(self._d_labels[:use], dtype=np.int64)
        )
        pres = self.presentation()
        r2_map = self._r2_map
        for lbl, dvec in zip(batch, self._d_vecs[:use]):
            hit = r2_map.get(int(lbl))
            if hit is not None:
                raw = [h - d for h, d in zip(hit, dvec)]
                return True, mn.reduce(pres, raw)
        return False, None


def find_outside(tables: SubgroupTables, delta: float) -> int:
    """A random element that tests outside the subgroup.

    Draws ceil(log2(1/delta)) + 1 elements; if every one of them tests as a
    member, raises RandomizedFailure.  For a proper subgroup (index >= 2)
    that event has probability at most delta/2 plus the membership error.
    """
    tries = ceil(log2(1.0 / delta)) + 1
    for _ in range(tries):
        x = tables.oracle.random_element(tables.rng)
        inside, _ = tables.membership(x)
        if not inside:
            return x
    raise RandomizedFailure(
        f"no element outside the subgroup in {tries} draws"
    )


def find_min_exponent(
    tables: SubgroupTables, a: int, bound: int
) -> tuple[int, tuple[int, ...]]:
    """Minimal k >= 1 with a^k in the subgroup, plus a verified certificate.

    ``bound`` must satisfy a^bound in H (any multiple of the order of a
    works, since H contains the identity).  The minimal k divides bound, so
    each prime of bound is resolved by binary search on the monotone
    predicate j -> [a^(bound / p^j) in H].  The result comes with the
    exponent vector of a^k over the chain, verified by evaluation; a
    computed k of 1 means ``a`` was already a member and raises ValueError.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    oracle = tables.oracle
    k = bound
    for p, e in factorize(bound).items():
        lo, hi = 0, e
        while lo < hi:
            mid = (lo + hi + 1) // 2
            inside, _ = tables.membership(oracle.pow(a, bound // p**mid))
            if inside:
                lo = mid
            else:
                hi = mid - 1
        k //= p**lo
    if k == 1:
        raise ValueError("the element already belongs to the subgroup")
    ak = oracle.pow(a, k)
    inside, vec = tables.membership(ak)
    if not inside:
        raise RandomizedFailure("membership test missed the subgroup power")
    if evaluate_exponents(tables.chain(), vec, oracle) != ak:
        raise InconsistencyError("membership certificate failed evaluation")
    return k, vec


def find_exponents(tables: SubgroupTables, x: int) -> tuple[int, ...]:
    """Exponent vector of a known member over the chain, verified by evaluation."""
    inside, vec = tables.membership(x)
    if not inside:
        raise RandomizedFailure("no collision certificate for the element")
    if evaluate_exponents(tables.chain(), vec, tables.oracle) != x:
        raise InconsistencyError("membership certificate failed evaluation")
    return vec


def order_bound_ps(oracle, a: int, budget: int, rng, delta: float) -> int:
    """A verified positive multiple of the order of ``a`` (size-hidden model).

    Samples distinct exponents from [1, 2*budget] until two of them power
    ``a`` to the same label; the gap w then satisfies a^w = identity, which
    is confirmed through the cancellation identity a^w * a = a.  Needs
    budget >= order(a); raises RandomizedFailure when no collision shows up.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    hi = 2 * budget
    cap = max(2, min(ceil(sqrt(2.0 * hi * log(1.0 / delta))), hi))
    seen: dict[int, int] = {}
    used: set[int] = set()
    while len(used) < cap:
        j = rng.randrange(1, hi + 1)
        if j in used:
            continue
        used.add(j)
        lbl = oracle.pow(a, j)
        if lbl in seen:
            w = abs(j - seen[lbl])
            if oracle.op(oracle.pow(a, w), a) != a:
                raise InconsistencyError(
                    "exponent collision failed the cancellation check"
                )
            return w
        seen[lbl] = j
    raise RandomizedFailure("no exponent collision within the sampling budget")


def find_identity_ps(oracle, budget: int, rng, delta: float) -> int:
    """Identity label in the size-hidden model, via an order multiple.

    a^w with w a verified order multiple of a random element is the
    identity; a handful of extra samples double-check that it fixes them.
    """
    a = oracle.random_element(rng)
    w = order_bound_ps(oracle, a, budget, rng, delta)
    e = oracle.pow(a, w)
    for _ in range(16):
        x = oracle.random_element(rng)
        if oracle.op(e, x) != x:
            raise InconsistencyError("claimed identity failed to fix a sample")
    return e


@dataclass
class SizeEstimate:
    """Square upper estimate of a hidden group size, with the draws it cost."""

    q: int
    draws: int

    def range(self) -> tuple[int, int]:
        return size_range(self.q)


def size_range(q: int) -> tuple[int, int]:
    """The interval of true sizes an estimate ``q`` is considered to match."""
    if q < 1:
        raise ValueError("estimates are positive")
    width = ESTIMATE_SLACK * max(1, ceil(log2(q))) if q > 1 else ESTIMATE_SLACK
    lo = max(1, -(-q // width))
    return lo, q


def estimate_size(oracle, rng) -> SizeEstimate:
    """Perfect-square size estimate from repeated birthday experiments.

    Each experiment draws random elements until one repeats and reports the
    number of distinct labels seen; the square of the maximum over all
    experiments lands in ``size_range`` of the truth with high probability.
    Six experiments calibrate a rough scale n', then ~6*log2(n') more sharpen
    the maximum.  Exceeding an absolute cap of 10^9 draws raises RuntimeError.
    """
    draws = 0

    def run_once() -> int:
        nonlocal draws
        seen: set[int] = set()
        while True:
            x = oracle.random_element(rng)
            draws += 1
            if draws > _SAMPLE_CAP:
                raise RuntimeError("size estimation exceeded the sample cap")
            if x in seen:
                return len(seen)
            seen.add(x)

    best = 0
    for _ in range(6):
        best = max(best, run_once())
    rough = max(best, 2)
    for _ in range(max(1, ceil(6 * log2(rough)))):
        best = max(best, run_once())
    return SizeEstimate(q=best * best, draws=draws)


def _delta_split(q: int, delta: float, ps: bool) -> tuple[int, float]:
    """Round limit and per-subroutine failure budget for a full build."""
    lg = ceil(log2(q)) if q > 1 else 1
    rounds = lg + 1
    calls = rounds * (40 + 2 * lg + 2)
    if ps:
        calls += rounds + 2
    return rounds, delta / calls


def random_generators(
    oracle, rng, delta: float = 1e-2, budget: int | None = None
) -> GeneratorChain:
    """Generating chain with orders and relation rows, by random sampling.

    In the size-known model the builder stops once the subgroup order
    reaches the group order.  In the size-hidden model ``budget`` (an upper
    bound on the size, e.g. the square estimate of ``estimate_size``) is
    required; the builder stops when it can no longer find anything outside
    the subgroup.  The returned chain is correct with probability at least
    1 - delta; detected corruption raises RandomizedFailure, so a caller
    may retry with fresh randomness.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    ps = oracle.mode == "ps"
    if ps:
        if budget is None:
            raise ValueError("the size-hidden model needs an explicit budget")
        n = None
        q = int(budget)
        if q < 1:
            raise ValueError("budget must be positive")
    else:
        n = oracle.size
        q = n if budget is None else max(1, int(budget))
    rounds_cap, dd = _delta_split(q, delta, ps)
    s = sample_size(q, dd)
    e = find_identity_ps(oracle, q, rng, dd) if ps else oracle.identity()
    tables = SubgroupTables(oracle, rng, s, e, dd)
    rounds = 0
    while True:
        if not ps and tables.order == n:
            break
        if ps and tables.order > q:
            raise RandomizedFailure("subgroup order exceeded the budget")
        rounds += 1
        if rounds > rounds_cap:
            raise RandomizedFailure(f"no convergence within {rounds_cap} rounds")
        try:
            a = find_outside(tables, dd)
        except RandomizedFailure:
            if ps:
                break
            raise
        bound = order_bound_ps(oracle, a, q, rng, dd) if ps else n
        try:
            k, vec = find_min_exponent(tables, a, bound)
        except ValueError as exc:
            raise RandomizedFailure(f"candidate generator collapsed: {exc}")
        tables.extend(a, k, vec)
        if not ps and n % tables.order != 0:
            raise RandomizedFailure("subgroup order stopped dividing the group order")
    chain = tables.chain()
    if ps:
        chain.size_estimate = q
    return chain