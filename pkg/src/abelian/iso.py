"""Canonical decomposition and isomorphism testing of hidden groups.

``find_basis`` turns a generator chain into the invariant-factor form
Z_{m_1} x ... x Z_{m_r} (m_1 | m_2 | ...) by diagonalizing the chain's
relation matrix, and returns basis monomials realizing each factor.  Two
groups are isomorphic exactly when their invariant lists agree, so
``is_isomorphic`` compares them and, on success, produces a verified witness
mapping basis to basis.  In the size-hidden model a square size estimate
bounds the sampling budget and wildly different estimates short-circuit the
comparison before any generator work.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

from . import monomial as mn
from .detgen import GeneratorChain, generator_plus
from .errors import InconsistencyError, ModelViolation, RandomizedFailure
from .numtheory import prime_factors
from .randgen import estimate_size, random_generators, size_range
from .snf import IntMatrix, SnfResult, build_relation_matrix, smith_normal_form, basis_from_snf


@dataclass
class BasisResult:
    """A chain together with its diagonalized presentation.

    ``invariants`` is the divisibility chain m_1 | m_2 | ... (trivial factors
    dropped), and ``basis[i]`` is a monomial over the chain of order exactly
    ``invariants[i]``; for the trivial group all of these are empty and the
    matrices are None.
    """

    chain: GeneratorChain
    pres: mn.Presentation
    rel: IntMatrix | None
    snf: SnfResult | None
    invariants: list[int]
    basis: list[tuple[int, ...]]

    def basis_labels(self, oracle) -> list[int]:
        """Oracle labels of the basis monomials."""
        return [mn.psi(self.pres, self.chain, oracle, y) for y in self.basis]


def find_basis(
    oracle,
    rng=None,
    delta: float = 1e-2,
    method: str = "rand",
    budget: int | None = None,
) -> BasisResult:
    """Invariant factors and basis monomials of the hidden group.

    ``method`` picks the chain construction: "det" sweeps the whole group
    (size-known model only), "rand" uses collision sampling and needs an
    ``rng``.  In the size-hidden model a missing ``budget`` is filled by an
    internal size estimate.
    """
    if method == "det":
        chain, _ = generator_plus(oracle)
    elif method == "rand":
        if rng is None:
            raise ValueError("the randomized method needs an rng")
        if oracle.mode == "ps" and budget is None:
            budget = estimate_size(oracle, rng).q
        chain = random_generators(oracle, rng, delta=delta, budget=budget)
    else:
        raise ValueError(f"method must be 'det' or 'rand', got {method!r}")
    return basis_of_chain(chain)


def basis_of_chain(chain: GeneratorChain) -> BasisResult:
    """Diagonalize an existing chain (its relation rows required)."""
    pres = mn.Presentation.from_chain(chain)
    if pres.t == 0:
        return BasisResult(chain, pres, None, None, [], [])
    rel = build_relation_matrix(pres)
    snf = smith_normal_form(rel)
    diag = snf.D.diagonal()
    if any(d == 0 for d in diag):
        raise InconsistencyError("relation matrix of a finite group must be nonsingular")
    invariants = [d for d in diag if d > 1]
    basis = basis_from_snf(pres, snf)
    return BasisResult(chain, pres, rel, snf, invariants, basis)


@dataclass
class IsomorphismWitness:
    """A basis-to-basis correspondence certifying an isomorphism.

    The map y_i -> z_i on basis monomials of equal order extends uniquely to
    an isomorphism; ``verify`` re-checks the claimed orders against both
    oracles, spot-checks the homomorphism property on random coordinate
    pairs, and, when both groups are small with known size, certifies
    bijectivity by full enumeration.
    """

    invariants: list[int]
    left: BasisResult
    right: BasisResult

    def verify(self, oracle_a, oracle_b, rng, samples: int = 24) -> bool:
        if self.invariants != self.left.invariants or self.invariants != self.right.invariants:
            return False
        for side, oracle in ((self.left, oracle_a), (self.right, oracle_b)):
            if not _orders_certified(side, oracle):
                return False
        if not self._homomorphism_samples(oracle_a, oracle_b, rng, samples):
            return False
        if oracle_a.mode == "fs" and oracle_b.mode == "fs":
            if oracle_a.size != oracle_b.size:
                return False
            if oracle_a.size <= 256 and not (
                _bijective(self.left, oracle_a) and _bijective(self.right, oracle_b)
            ):
                return False
        return True

    def _homomorphism_samples(self, oracle_a, oracle_b, rng, samples: int) -> bool:
        for _ in range(samples):
            u = [rng.randrange(m) for m in self.invariants]
            v = [rng.randrange(m) for m in self.invariants]
            w = [(x + y) % m for x, y, m in zip(u, v, self.invariants)]
            for side, oracle in ((self.left, oracle_a), (self.right, oracle_b)):
                xu = _label_of_coords(side, u, oracle)
                xv = _label_of_coords(side, v, oracle)
                xw = _label_of_coords(side, w, oracle)
                if oracle.op(xu, xv) != xw:
                    return False
        return True


def _monomial_of_coords(side: BasisResult, coords) -> tuple[int, ...]:
    acc = mn.identity(side.pres)
    for y, c in zip(side.basis, coords):
        if c:
            acc = mn.multiply(side.pres, acc, mn.mpow(side.pres, y, c))
    return acc


def _label_of_coords(side: BasisResult, coords, oracle) -> int:
    return mn.psi(side.pres, side.chain, oracle, _monomial_of_coords(side, coords))


def _orders_certified(side: BasisResult, oracle) -> bool:
    """Oracle-level check that basis monomial i has order exactly invariants[i]."""
    e = side.chain.identity
    for y, m in zip(side.basis, side.invariants):
        lbl = mn.psi(side.pres, side.chain, oracle, y)
        if oracle.pow(lbl, m, identity=e) != e:
            return False
        for p in prime_factors(m):
            if oracle.pow(lbl, m // p, identity=e) == e:
                return False
    return True


def _bijective(side: BasisResult, oracle) -> bool:
    seen = set()
    for coords in iter_product(*(range(m) for m in side.invariants)):
        seen.add(_label_of_coords(side, coords, oracle))
    return len(seen) == oracle.size


def is_isomorphic(
    oracle_a,
    oracle_b,
    rng=None,
    delta: float = 1e-2,
    method: str = "rand",
    budget_a: int | None = None,
    budget_b: int | None = None,
) -> tuple[bool, IsomorphismWitness | None]:
    """Decide whether two hidden groups are isomorphic.

    Returns (answer, witness); the witness is present and verified only for
    a positive answer.  Known sizes that disagree, or size estimates whose
    plausible ranges do not even overlap, settle the question negatively
    before any generator construction.  The failure budget ``delta`` is
    split evenly across the two sides; detected bad luck surfaces as
    RandomizedFailure, which callers may retry.
    """
    fs_a = oracle_a.mode == "fs"
    fs_b = oracle_b.mode == "fs"
    if method == "det" and not (fs_a and fs_b):
        raise ModelViolation("the deterministic method needs the size-known model")
    if fs_a and fs_b and oracle_a.size != oracle_b.size:
        return False, None
    if not fs_a and budget_a is None and method == "rand":
        budget_a = estimate_size(oracle_a, rng).q
    if not fs_b and budget_b is None and method == "rand":
        budget_b = estimate_size(oracle_b, rng).q
    lo_a, hi_a = (oracle_a.size, oracle_a.size) if fs_a else size_range(budget_a)
    lo_b, hi_b = (oracle_b.size, oracle_b.size) if fs_b else size_range(budget_b)
    if lo_a > hi_b or lo_b > hi_a:
        return False, None
    half = delta / 2.0
    left = find_basis(oracle_a, rng, delta=half, method=method, budget=budget_a)
    right = find_basis(oracle_b, rng, delta=half, method=method, budget=budget_b)
    if left.invariants != right.invariants:
        return False, None
    witness = IsomorphismWitness(list(left.invariants), left, right)
    if rng is not None and not witness.verify(oracle_a, oracle_b, rng):
        raise RandomizedFailure("isomorphism witness failed verification")
    return True, witness