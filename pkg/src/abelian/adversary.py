"""An adversarial oracle showing that distinguishing needs many accesses.

Two groups of size p^m — variant 1 = Z_p^m and variant 2 =
Z_p^(m-2) x Z_{p^2} — share the subgroup W = Z_p^(m-2) x {(0,0)}.  The
oracle here presents a size-known group of order p^m but binds labels to
elements lazily: the first time a label is used it is assigned the next
unserved element of W, and products of W elements stay in W, so every answer
is computed inside W for as long as possible.  Only when a fresh element is
needed and W is exhausted does the oracle commit to its configured variant
and extend the labeling deterministically.  Until that moment the transcript
is identical whichever variant was configured — and is consistent with
honest embeddings of W into both groups — so no strategy, however clever,
can tell the variants apart with at most p^(m-2) accesses: exposing a
(p^(m-2)+1)-th element costs at least one access per element exposed.

``adversary_demo`` runs a strategy (by default the deterministic pipeline:
exhaustive generator chain, then invariant factors) against both variants
and packages the checkable facts: equal pre-commit transcripts, a commit
point beyond the threshold, honest replays against both variants, and
correct final answers on both sides.
"""

from __future__ import annotations

import numpy as np

from .detgen import decode_code, generator_plus
from .errors import ModelViolation
from .monomial import Presentation
from .numtheory import canonical_invariant_factors, factorize
from .snf import invariant_factors


def variant_radices(p: int, m: int, target: int) -> tuple[int, ...]:
    """Cyclic factor sizes of variant 1 (Z_p^m) or 2 (Z_p^(m-2) x Z_{p^2})."""
    if target == 1:
        return (p,) * m
    return (p,) * (m - 2) + (p * p,)


class AdversaryOracle:
    """Size-known oracle that postpones choosing between two groups.

    ``target`` (1 or 2) fixes which group the oracle commits to when forced;
    until then its answers do not depend on the choice.  The interface
    mirrors the counted size-known oracle (``size``, ``identity``, ``op``,
    ``op_batch``), and every answer is appended to ``transcript`` as
    ``(kind, args, answer)``.  Counter discipline: serving an element a
    label did not previously have costs one element access (a product whose
    operand was never seen implicitly requests that operand), and each
    product costs one product access — so the access total is always at
    least the number of elements exposed, which is what forces the bound.
    """

    mode = "fs"

    def __init__(self, p: int, m: int, target: int, access_cap: int | None = None):
        if factorize(p) != {p: 1}:
            raise ValueError("p must be prime")
        if m < 3:
            raise ValueError("m must be at least 3")
        if target not in (1, 2):
            raise ValueError("target must be 1 or 2")
        self.p = p
        self.m = m
        self.target = target
        self.n = p**m
        self.threshold = p ** (m - 2)
        self.w_radices = (p,) * (m - 2)
        self.radices: tuple[int, ...] = self.w_radices  # widens on commit
        self.access_cap = access_cap
        self.products = 0
        self.elements = 0
        self.committed = False
        self.commit_access: int | None = None
        self.commit_entry: int | None = None
        self.transcript: list[tuple] = []
        self._elem_of: dict[int, tuple[int, ...]] = {}
        self._label_of: dict[tuple[int, ...], int] = {}
        self._serve_ptr = 0  # cursor over element index space, fresh serves
        self._free_label = 0  # smallest label the oracle may hand out itself

    # -- bookkeeping ---------------------------------------------------

    @property
    def size(self) -> int:
        return self.n

    @property
    def fresh_count(self) -> int:
        return len(self._elem_of)

    @property
    def counters(self) -> dict[str, int]:
        return {"products": self.products, "elements": self.elements}

    @property
    def total_accesses(self) -> int:
        return self.products + self.elements

    def _bump(self, kind: str, amount: int = 1) -> None:
        if kind == "products":
            self.products += amount
        else:
            self.elements += amount
        if self.access_cap is not None and self.total_accesses > self.access_cap:
            raise RuntimeError("adversary access cap exceeded")

    def _space(self) -> int:
        out = 1
        for r in self.radices:
            out *= r
        return out

    def _commit(self) -> None:
        self.committed = True
        self.commit_access = self.total_accesses
        self.commit_entry = len(self.transcript)
        self.radices = variant_radices(self.p, self.m, self.target)
        pad = (0,) * (len(self.radices) - len(self.w_radices))
        self._elem_of = {lbl: w + pad for lbl, w in self._elem_of.items()}
        self._label_of = {e: lbl for lbl, e in self._elem_of.items()}
        self._serve_ptr = 0

    def _next_fresh_elem(self) -> tuple[int, ...]:
        """The next never-labeled element, committing when W runs out."""
        while True:
            space = self._space()
            while self._serve_ptr < space:
                elem = decode_code(self._serve_ptr, self.radices)
                self._serve_ptr += 1
                if elem not in self._label_of:
                    return elem
            if self.committed:
                raise RuntimeError("every element of the group is already labeled")
            self._commit()

    def _bind_label(self, label: int) -> tuple[int, ...]:
        """Element behind a label, serving a fresh one on first touch.

        The access is counted before the serve so that a commit forced by
        this request already includes it in ``commit_access``.
        """
        got = self._elem_of.get(label)
        if got is not None:
            return got
        self._bump("elements")
        elem = self._next_fresh_elem()
        self._elem_of[label] = elem
        self._label_of[elem] = label
        return elem

    def _label_for_elem(self, elem: tuple[int, ...]) -> int:
        """Label of an element, allocating the smallest free label if new."""
        got = self._label_of.get(elem)
        if got is not None:
            return got
        while self._free_label in self._elem_of:
            self._free_label += 1
        label = self._free_label
        self._elem_of[label] = elem
        self._label_of[elem] = label
        return label

    # -- the oracle interface -------------------------------------------

    def identity(self) -> int:
        self._bump("elements")
        zero = (0,) * len(self.radices)
        label = self._label_for_elem(zero)
        self.transcript.append(("identity", (), label))
        return label

    def op(self, a: int, b: int) -> int:
        for lbl in (a, b):
            if not 0 <= lbl < self.n:
                raise ValueError(f"label {lbl} out of range 0..{self.n - 1}")
        ea = self._bind_label(a)
        eb = self._bind_label(b)
        self._bump("products")
        elem = tuple((x + y) % r for x, y, r in zip(ea, eb, self.radices))
        label = self._label_for_elem(elem)
        self.transcript.append(("op", (a, b), label))
        return label

    def op_batch(self, b: int, labels) -> np.ndarray:
        return np.asarray(
            [self.op(int(x), b) for x in np.asarray(labels, dtype=np.int64)],
            dtype=np.int64,
        )

    def random_element(self, rng=None) -> int:
        raise ModelViolation(
            "the adversarial oracle serves the size-known interface only"
        )

    # -- honesty checks ---------------------------------------------------

    def replay(self, target: int | None = None, upto: int | None = None) -> bool:
        """Check the transcript against an honest embedding into a variant.

        With the defaults the whole transcript is checked against the
        committed variant.  Passing the other variant with ``upto`` set to
        ``commit_entry`` verifies that the pre-commit prefix would have been
        equally consistent with the road not taken: prefix elements must lie
        in the embedded W and every product must obey that variant's group
        law under the final labeling.
        """
        target = self.target if target is None else target
        radices = variant_radices(self.p, self.m, target)
        w_len = len(self.w_radices)
        pad = (0,) * (len(radices) - w_len)
        entries = self.transcript if upto is None else self.transcript[:upto]

        def embedded(label: int) -> tuple[int, ...] | None:
            stored = self._elem_of.get(label)
            if stored is None:
                return None
            if upto is not None:
                # prefix elements must lie inside W, re-embedded per variant
                if any(stored[w_len:]):
                    return None
                return stored[:w_len] + pad
            return stored

        seen: dict[int, tuple[int, ...]] = {}
        for kind, args, ans in entries:
            if kind == "identity":
                er = embedded(ans)
                if er is None or any(er):
                    return False
                seen[ans] = er
                continue
            if kind != "op":
                return False
            a, b = args
            ea, eb, er = embedded(a), embedded(b), embedded(ans)
            if ea is None or eb is None or er is None:
                return False
            want = tuple((x + y) % r for x, y, r in zip(ea, eb, radices))
            if er != want:
                return False
            seen[a], seen[b], seen[ans] = ea, eb, er
        return len(set(seen.values())) == len(seen)


def pipeline_strategy(oracle) -> list[int]:
    """The shipped deterministic pipeline: exhaustive chain, then invariants."""
    chain, _ = generator_plus(oracle)
    return invariant_factors(Presentation.from_chain(chain))


def adversary_demo(p: int, m: int, strategy=None) -> dict:
    """Run a deterministic strategy against both variants; collect evidence.

    The strategy takes the oracle and returns the invariant-factor list it
    believes in.  The report carries, per variant, the answer and whether it
    matches the committed group's true invariants, plus the shared facts:
    prefix equality, commit beyond the threshold, and honest replays.  A
    strategy that exceeds the access cap is reported inconclusive.
    """
    strategy = pipeline_strategy if strategy is None else strategy
    n = p**m
    advs: dict[int, AdversaryOracle] = {}
    answers: dict[int, list[int] | None] = {}
    inconclusive = False
    for target in (1, 2):
        adv = AdversaryOracle(p, m, target, access_cap=10_000 * n)
        try:
            answers[target] = strategy(adv)
        except RuntimeError:
            answers[target] = None
            inconclusive = True
        advs[target] = adv
    a1, a2 = advs[1], advs[2]
    prefix1 = a1.transcript[: a1.commit_entry]
    prefix2 = a2.transcript[: a2.commit_entry]
    truth = {
        t: canonical_invariant_factors(variant_radices(p, m, t)) for t in (1, 2)
    }
    if a1.committed and a2.committed:
        replay_ok = all(
            adv.replay()
            and adv.replay(target=1, upto=adv.commit_entry)
            and adv.replay(target=2, upto=adv.commit_entry)
            for adv in (a1, a2)
        )
    else:
        replay_ok = False
    return {
        "p": p,
        "m": m,
        "threshold": p ** (m - 2),
        "inconclusive": inconclusive,
        "answers": answers,
        "true_invariants": truth,
        "answers_correct": answers[1] == truth[1] and answers[2] == truth[2],
        "committed": a1.committed and a2.committed,
        "commit_access": {1: a1.commit_access, 2: a2.commit_access},
        "total_accesses": {1: a1.total_accesses, 2: a2.total_accesses},
        "prefixes_equal": prefix1 == prefix2,
        "commit_beyond_threshold": all(
            adv.commit_access is not None and adv.commit_access > adv.threshold
            for adv in (a1, a2)
        ),
        "replay_ok": replay_ok,
    }