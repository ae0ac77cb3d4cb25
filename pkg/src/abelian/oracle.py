"""Hidden Abelian groups behind counted black-box oracles.

A GroupSpec fixes a direct product Z_m1 x ... x Z_ms together with a seeded
shuffle of its elements onto the label range 0..n-1, so the labels carry no
structure.  A GroupOracle exposes the group law through that labeling while
counting every access, in one of two models:

* ``fs``: the order n is known and any label in 0..n-1 may be used.
* ``ps``: the order is hidden.  Only uniform random elements and products of
  labels the oracle has already returned are available; asking for the size
  or the identity is a model violation.

Counters: every product costs 1 on the product counter, every element handed
out (random element or identity) costs 1 on the element counter.  Total
accesses is their sum.
"""

from __future__ import annotations

import numpy as np

from .errors import ModelViolation

MODES = ("fs", "ps")


def parse_group_spec(text: str) -> tuple[int, ...]:
    """Parse a group spec string like ``4x3x3`` into a factor tuple.

    ``1`` denotes the trivial group (empty factor tuple).
    """
    text = text.strip().lower()
    if not text:
        raise ValueError("empty group spec")
    if text == "1":
        return ()
    factors = []
    for part in text.split("x"):
        try:
            m = int(part)
        except ValueError:
            raise ValueError(f"bad group spec component {part!r}") from None
        if m < 2:
            raise ValueError(f"group spec factors must be >= 2, got {m}")
        factors.append(m)
    return tuple(factors)


def format_group_spec(factors) -> str:
    return "x".join(str(m) for m in factors) if factors else "1"


class GroupSpec:
    """A direct product of cyclic groups plus a seeded element relabeling.

    ``label_seed=None`` uses the identity labeling (label = mixed-radix index
    of the tuple, least significant factor first); an integer seed shuffles
    labels uniformly.  Memory is O(n): the full n x n table is never built.
    """

    def __init__(self, factors, label_seed: int | None = 0):
        factors = tuple(int(m) for m in factors)
        for m in factors:
            if m < 2:
                raise ValueError(f"cyclic factors must be >= 2, got {m}")
        n = 1
        for m in factors:
            n *= m
        if n > 1 << 26:
            raise ValueError(f"group order {n} exceeds the supported 2^26")
        self.factors = factors
        self.label_seed = label_seed
        self.n = n
        self._all_two = bool(factors) and all(m == 2 for m in factors)
        if label_seed is None:
            perm = np.arange(n, dtype=np.int64)
        else:
            perm = np.random.default_rng(label_seed).permutation(n).astype(np.int64)
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n, dtype=np.int64)
        self._perm = perm
        self._inv = inv
        self.identity_label = int(perm[0])

    def __repr__(self):
        return f"GroupSpec({format_group_spec(self.factors)}, label_seed={self.label_seed})"

    def oracle(self, mode: str = "fs") -> "GroupOracle":
        return GroupOracle(self, mode)

    # label <-> hidden tuple plumbing -------------------------------------

    def index_of(self, label: int) -> int:
        return int(self._inv[label])

    def tuple_of(self, label: int) -> tuple[int, ...]:
        idx = int(self._inv[label])
        out = []
        for m in self.factors:
            idx, d = divmod(idx, m)
            out.append(d)
        return tuple(out)

    def label_of(self, coords) -> int:
        idx = 0
        mult = 1
        for d, m in zip(coords, self.factors):
            idx += (d % m) * mult
            mult *= m
        return int(self._perm[idx])

    def _op_label(self, a: int, b: int) -> int:
        ia = int(self._inv[a])
        ib = int(self._inv[b])
        if self._all_two:
            return int(self._perm[ia ^ ib])
        idx = 0
        mult = 1
        for m in self.factors:
            ia, da = divmod(ia, m)
            ib, db = divmod(ib, m)
            s = da + db
            if s >= m:
                s -= m
            idx += s * mult
            mult *= m
        return int(self._perm[idx])

    def _op_label_batch(self, b: int, labels: np.ndarray) -> np.ndarray:
        ia = self._inv[labels]
        ib = int(self._inv[b])
        if self._all_two:
            return self._perm[ia ^ ib]
        idx = np.zeros_like(ia)
        mult = 1
        rem = ia
        rb = ib
        for m in self.factors:
            da = rem % m
            rem = rem // m
            rb, db = divmod(rb, m)
            idx += ((da + db) % m) * mult
            mult *= m
        return self._perm[idx]


def make_group(factors, label_seed: int | None = 0) -> GroupSpec:
    """Build a GroupSpec for Z_f1 x ... x Z_fk with a seeded labeling."""
    return GroupSpec(factors, label_seed)


class GroupOracle:
    """Counted access to a hidden group, enforcing the chosen model's rules."""

    def __init__(self, spec: GroupSpec, mode: str = "fs"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.spec = spec
        self.mode = mode
        self.products = 0
        self.elements = 0
        self._seen: set[int] | None = set() if mode == "ps" else None

    def __repr__(self):
        return f"GroupOracle({self.spec!r}, mode={self.mode!r})"

    @property
    def size(self) -> int:
        if self.mode == "ps":
            raise ModelViolation("group size is not available in the ps model")
        return self.spec.n

    @property
    def counters(self) -> dict[str, int]:
        return {"products": self.products, "elements": self.elements}

    @property
    def total_accesses(self) -> int:
        return self.products + self.elements

    def identity(self) -> int:
        if self.mode == "ps":
            raise ModelViolation("the identity is not handed out in the ps model")
        self.elements += 1
        return self.spec.identity_label

    def random_element(self, rng) -> int:
        self.elements += 1
        label = rng.randrange(self.spec.n)
        if self._seen is not None:
            self._seen.add(label)
        return label

    def _check_label(self, a: int):
        if not 0 <= a < self.spec.n:
            raise ValueError(f"label {a} out of range 0..{self.spec.n - 1}")
        if self._seen is not None and a not in self._seen:
            raise ModelViolation(f"label {a} has not been observed in the ps model")

    def op(self, a: int, b: int) -> int:
        self._check_label(a)
        self._check_label(b)
        self.products += 1
        r = self.spec._op_label(a, b)
        if self._seen is not None:
            self._seen.add(r)
        return r

    def op_batch(self, b: int, labels: np.ndarray) -> np.ndarray:
        """Products b*x for every label x in the array; counts len(labels)."""
        self._check_label(b)
        labels = np.asarray(labels, dtype=np.int64)
        if self._seen is not None:
            missing = [int(x) for x in labels if int(x) not in self._seen]
            if missing:
                raise ModelViolation(f"labels {missing[:4]} not observed in the ps model")
        self.products += int(labels.size)
        out = self.spec._op_label_batch(b, labels)
        if self._seen is not None:
            self._seen.update(int(x) for x in out)
        return out

    def pow(self, a: int, m: int, identity: int | None = None) -> int:
        """a composed with itself m times (m >= 0) by binary exponentiation.

        ``a**0`` needs the identity; in the ps model pass one that has been
        discovered already, since ``identity()`` is unavailable there.
        """
        if m < 0:
            raise ValueError("negative exponents are not supported by the oracle")
        if m == 0:
            if identity is not None:
                return identity
            return self.identity()
        result = a
        for bit in bin(m)[3:]:
            result = self.op(result, result)
            if bit == "1":
                result = self.op(result, a)
        return result
