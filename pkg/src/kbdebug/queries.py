"""Query generation and the partition-based risk measures.

A query is a conjunction of literals common to the repaired KBs of some
diagnosis subset; it partitions the leading diagnoses into the entailing set,
the contradicting set, and the uncommitted rest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .diagnosis import Diagnosis, DiagnosisEngine, Dpi
from .reasoner import BOTH_SIGNS, POSITIVE_ONLY, Literal

YES = "yes"
NO = "no"


@dataclass(frozen=True)
class Partition:
    """⟨D_X, D_¬X, D_∅⟩ over the current leading set, as id-set frozensets."""

    d_x: frozenset[frozenset[str]]
    d_nx: frozenset[frozenset[str]]
    d_z: frozenset[frozenset[str]]

    @property
    def size(self) -> int:
        return len(self.d_x) + len(self.d_nx) + len(self.d_z)

    def rejected_by(self, answer: str) -> frozenset[frozenset[str]]:
        return self.d_nx if answer == YES else self.d_x


@dataclass(frozen=True)
class Query:
    literals: frozenset[Literal]
    partition: Partition


class QueryGenerator:
    """Generates discriminating queries for one DPI snapshot."""

    def __init__(self, engine: DiagnosisEngine, signs: str = POSITIVE_ONLY):
        if signs not in (POSITIVE_ONLY, BOTH_SIGNS):
            raise ValueError(f"bad signs option {signs!r}")
        self.engine = engine
        self.dpi: Dpi = engine.dpi
        self.signs = signs
        kb = self.dpi.kb
        # default query vocabulary: atoms occurring in O∖B
        self.vocab = frozenset().union(
            *(self._atoms(ax_id) for ax_id in kb.candidate_ids)
        ) if kb.candidate_ids else frozenset()
        self._ents_cache: dict[frozenset[str], frozenset[Literal]] = {}
        self._full_cache: dict[frozenset[str], frozenset[Literal]] = {}
        self._bucket_cache: dict[tuple, str] = {}
        self._base_entailed: frozenset[Literal] | None = None

    def _atoms(self, ax_id: str) -> frozenset[str]:
        from .formulas import atoms_of

        return atoms_of(self.dpi.kb.by_id[ax_id].formula)

    def repaired_ids(self, diagnosis_ids: frozenset[str]) -> frozenset[str]:
        """Axiom ids of O*_i = (O ∖ D_i) ∪ B."""
        return (frozenset(self.dpi.candidate_ids) - diagnosis_ids) | self.dpi.background

    def base_entailed(self) -> frozenset[Literal]:
        """Literals entailed by B ∪ (∪Tp) alone."""
        if self._base_entailed is None:
            self._base_entailed = self.engine.reasoner.entailed_literals(
                self.dpi.background, self.vocab, self.signs, self.dpi.tp_union
            )
        return self._base_entailed

    def _full_entailments(self, diagnosis_ids: frozenset[str]) -> frozenset[Literal]:
        """Entailed literals of O*_i over both signs, regardless of the query
        sign policy; backs the contradiction fast path in classify."""
        cached = self._full_cache.get(diagnosis_ids)
        if cached is None:
            cached = self.engine.reasoner.entailed_literals(
                self.repaired_ids(diagnosis_ids), self.vocab, BOTH_SIGNS, self.dpi.tp_union
            )
            self._full_cache[diagnosis_ids] = cached
        return cached

    def entailments_of(self, diagnosis_ids: frozenset[str]) -> frozenset[Literal]:
        cached = self._ents_cache.get(diagnosis_ids)
        if cached is None:
            cached = self._full_entailments(diagnosis_ids)
            if self.signs == POSITIVE_ONLY:
                cached = frozenset(lit for lit in cached if lit.positive)
            self._ents_cache[diagnosis_ids] = cached
        return cached

    def common_entailments(self, seed: list[frozenset[str]]) -> frozenset[Literal]:
        """∩ entailments over the seed diagnoses, minus the base entailments."""
        if not seed:
            raise ValueError("seed must be nonempty")
        common = self.entailments_of(seed[0])
        for ids in seed[1:]:
            common &= self.entailments_of(ids)
        return common - self.base_entailed()

    def classify(self, literals: frozenset[Literal], leading: list[Diagnosis]) -> Partition:
        """Place each leading diagnosis by the entail / contradict / neither tests."""
        if not literals:
            raise ValueError("literals must be nonempty")
        buckets = {"d_x": set(), "d_nx": set(), "d_z": set()}
        for diag in leading:
            key = (diag.ids, literals)
            bucket = self._bucket_cache.get(key)
            if bucket is None:
                full = self._full_entailments(diag.ids)
                if literals <= self.entailments_of(diag.ids):
                    bucket = "d_x"
                elif any(Literal(lit.atom, not lit.positive) in full for lit in literals):
                    # O*_i entails the negation of a query literal
                    bucket = "d_nx"
                elif not self.engine.reasoner.is_consistent(
                    self.repaired_ids(diag.ids), self.dpi.tp_union | literals
                ):
                    bucket = "d_nx"
                else:
                    bucket = "d_z"
                self._bucket_cache[key] = bucket
            buckets[bucket].add(diag.ids)
        return Partition(
            frozenset(buckets["d_x"]), frozenset(buckets["d_nx"]), frozenset(buckets["d_z"])
        )

    def minimize(self, q: Query, leading: list[Diagnosis]) -> Query:
        """Greedy backward literal elimination preserving the partition."""
        literals = set(q.literals)
        for lit in sorted(q.literals):
            if len(literals) == 1:
                break
            trial = frozenset(literals - {lit})
            if self.classify(trial, leading) == q.partition:
                literals.discard(lit)
        return Query(frozenset(literals), q.partition)

    def generate(self, leading: list[Diagnosis]) -> list[Query]:
        """All discriminating queries, minimized, one per distinct partition.

        Seeds are the nonempty proper subsets of the leading set, enumerated by
        (size, sorted canonical diagnosis index); the first minimized
        representative of each partition is kept.
        """
        if len(leading) < 2:
            raise ValueError("need at least two leading diagnoses")
        kb = self.dpi.kb
        order = sorted(range(len(leading)), key=lambda i: leading[i].sort_key(kb))
        all_ids = frozenset(d.ids for d in leading)
        seen: dict[Partition, Query] = {}
        results: list[Query] = []
        for size in range(1, len(leading)):
            for combo in itertools.combinations(order, size):
                seed = [leading[i].ids for i in combo]
                literals = self.common_entailments(seed)
                if not literals:
                    continue
                partition = self.classify(literals, leading)
                if not partition.d_x or partition.d_x == all_ids:
                    continue
                if not (partition.d_nx | partition.d_z):
                    continue
                if partition in seen:
                    continue
                query = self.minimize(Query(literals, partition), leading)
                seen[partition] = query
                results.append(query)
        return results


def query_cautiousness(p: Partition) -> Fraction:
    """qc(X) = min(|D_X|, |D_¬X|) / |D| as an exact rational."""
    return Fraction(min(len(p.d_x), len(p.d_nx)), p.size)


def elimination_rate(p: Partition, answer: str) -> Fraction:
    if answer == YES:
        return Fraction(len(p.d_nx), p.size)
    if answer == NO:
        return Fraction(len(p.d_x), p.size)
    raise ValueError(f"bad answer {answer!r}")


def worst_case_elimination_rate(p: Partition) -> Fraction:
    return min(elimination_rate(p, YES), elimination_rate(p, NO))


def is_high_risk(p: Partition, c) -> bool:
    """High-risk iff the query's cautiousness is strictly below c."""
    return query_cautiousness(p) < c
