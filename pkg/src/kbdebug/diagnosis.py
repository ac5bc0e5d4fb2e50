"""Minimal conflicts (QuickXPlain) and leading minimal diagnoses (HS-tree).

The hitting-set tree is expanded best-first with node priority equal to the
unnormalized diagnosis-probability product of the partial hitting set, which
realizes uniform cost search over fault probabilities. Conflicts are reused
across nodes before a fresh QuickXPlain call is made.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace

from .formulas import FaultModel, KnowledgeBase, axiom_fault_probability
from .reasoner import Literal, Reasoner, Requirements, ResourceLimitExceeded

PROB_CLAMP = 1e-6  # p(ax) kept inside [PROB_CLAMP, 1-PROB_CLAMP] to avoid zero mass


class NoDiagnosisNeeded(Exception):
    """The DPI is not faulty; there is nothing to diagnose."""


@dataclass(frozen=True)
class Dpi:
    """Diagnosis problem instance ⟨O, B, Tp, Tn⟩ with requirements."""

    kb: KnowledgeBase
    positive_cases: tuple[frozenset[Literal], ...] = ()
    negative_cases: tuple[frozenset[Literal], ...] = ()
    requirements: Requirements = Requirements()

    @property
    def background(self) -> frozenset[str]:
        return self.kb.background_ids

    @property
    def candidate_ids(self) -> tuple[str, ...]:
        return self.kb.candidate_ids

    @property
    def tp_union(self) -> frozenset[Literal]:
        if not self.positive_cases:
            return frozenset()
        return frozenset().union(*self.positive_cases)

    def with_case(self, literals: frozenset[Literal], answer_yes: bool) -> "Dpi":
        if answer_yes:
            return replace(self, positive_cases=self.positive_cases + (literals,))
        return replace(self, negative_cases=self.negative_cases + (literals,))


@dataclass(frozen=True)
class Diagnosis:
    ids: frozenset[str]
    prior: float = 0.0       # unnormalized Eq.-1 style product
    posterior: float = 0.0   # normalized belief within the current leading set

    def sort_key(self, kb: KnowledgeBase) -> tuple[int, ...]:
        return tuple(sorted(kb.order_index[i] for i in self.ids))


Conflict = frozenset  # conflicts are plain frozensets of axiom ids


class DiagnosisEngine:
    """Conflict and diagnosis computation for one DPI (immutable)."""

    def __init__(self, dpi: Dpi, reasoner: Reasoner | None = None):
        self.dpi = dpi
        self.reasoner = reasoner if reasoner is not None else Reasoner(dpi.kb)
        self._faulty_cache: dict[frozenset[str], bool] = {}

    def is_faulty(self, candidate) -> bool:
        """True iff candidate ∪ B ∪ ∪Tp violates a requirement or entails some tn."""
        candidate = frozenset(candidate)
        cached = self._faulty_cache.get(candidate)
        if cached is not None:
            return cached
        dpi = self.dpi
        ids = candidate | dpi.background
        units = dpi.tp_union
        ok = self.reasoner.meets_requirements(
            ids, dpi.requirements, dpi.kb.coherency_atoms, units
        )
        faulty = not ok
        if not faulty:
            for tn in dpi.negative_cases:
                if self.reasoner.entails(ids, tn, units):
                    faulty = True
                    break
        self._faulty_cache[candidate] = faulty
        return faulty

    def quickxplain(self, candidate) -> Conflict | None:
        """A subset-minimal faulty subset of candidate, or None if not faulty.

        Preference order is the global axiom order; deterministic.
        """
        candidate = self.dpi.kb.sort_ids(frozenset(candidate))
        if not self.is_faulty(candidate):
            return None
        if self.is_faulty(()):
            return frozenset()

        def qx(background: tuple[str, ...], delta_added: bool, cand: tuple[str, ...]):
            if delta_added and self.is_faulty(background):
                return ()
            if len(cand) == 1:
                return cand
            mid = len(cand) // 2
            c1, c2 = cand[:mid], cand[mid:]
            d2 = qx(background + c1, bool(c1), c2)
            d1 = qx(background + d2, bool(d2), c1)
            return d1 + d2

        return frozenset(qx((), False, candidate))

    # -- diagnoses ----------------------------------------------------------

    def axiom_probabilities(self, fm: FaultModel) -> dict[str, float]:
        probs = {}
        for ax_id in self.dpi.candidate_ids:
            p = axiom_fault_probability(self.dpi.kb.by_id[ax_id], fm)
            probs[ax_id] = min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP)
        return probs

    def raw_prior(self, ids: frozenset[str], probs: dict[str, float]) -> float:
        value = 1.0
        for ax_id in self.dpi.candidate_ids:
            value *= probs[ax_id] if ax_id in ids else 1.0 - probs[ax_id]
        return value

    def is_diagnosis(self, ids) -> bool:
        ids = frozenset(ids)
        rest = frozenset(self.dpi.candidate_ids) - ids
        return not self.is_faulty(rest)

    def leading_diagnoses(self, fm: FaultModel, n: int) -> list[Diagnosis]:
        """Up to n most probable minimal diagnoses, ordered by unnormalized
        prior descending (ties by global axiom order of the id sets).

        Raises NoDiagnosisNeeded when the DPI is not faulty at all.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        all_candidates = frozenset(self.dpi.candidate_ids)
        if not self.is_faulty(all_candidates):
            raise NoDiagnosisNeeded("the DPI meets all requirements and test cases")

        probs = self.axiom_probabilities(fm)
        kb = self.dpi.kb

        def prior_of(path: frozenset[str]) -> float:
            return self.raw_prior(path, probs)

        def bound_of(path: frozenset[str]) -> float:
            # best achievable Eq.-1 value over any superset of path: every axiom
            # not yet in the path may contribute max(p, 1-p)
            value = 1.0
            for ax_id in self.dpi.candidate_ids:
                p = probs[ax_id]
                value *= p if ax_id in path else max(p, 1.0 - p)
            return value

        def tiebreak(path: frozenset[str]) -> tuple[int, ...]:
            return tuple(sorted(kb.order_index[i] for i in path))

        conflicts: list[Conflict] = []
        found: list[Diagnosis] = []
        closed: set[frozenset[str]] = set()
        counter = itertools.count()
        heap: list = []

        def push(path: frozenset[str]) -> None:
            heapq.heappush(heap, (-bound_of(path), tiebreak(path), next(counter), path))

        push(frozenset())
        while heap:
            neg_bound, _, _, path = heapq.heappop(heap)
            if len(found) >= n:
                nth_best = sorted(d.prior for d in found)[-n]
                if -neg_bound <= nth_best:
                    break  # no open node can beat the current top n
            if path in closed:
                continue
            closed.add(path)
            if any(path >= d.ids for d in found):
                continue
            # reuse a known conflict this path does not hit yet
            conflict = next((c for c in conflicts if not (c & path)), None)
            if conflict is None:
                conflict = self.quickxplain(all_candidates - path)
                if conflict is not None:
                    conflicts.append(conflict)
            if conflict is None:
                # path hits every conflict; keep it only if subset-minimal
                if all(not self.is_diagnosis(path - {ax}) for ax in path):
                    found.append(Diagnosis(frozenset(path), prior=prior_of(path)))
                continue
            for ax_id in kb.sort_ids(conflict):
                push(path | {ax_id})
        found.sort(key=lambda d: (-d.prior, d.sort_key(kb)))
        return found[:n]

    def all_minimal_diagnoses(self, fm: FaultModel | None = None) -> list[Diagnosis]:
        fm = fm if fm is not None else FaultModel()
        return self.leading_diagnoses(fm, 1 << len(self.dpi.candidate_ids))


def diagnosis_priors(diagnoses, engine: DiagnosisEngine, fm: FaultModel) -> dict[frozenset[str], float]:
    """Unnormalized Eq.-1 values normalized to sum 1 over the given set."""
    probs = engine.axiom_probabilities(fm)
    raw = {d.ids: engine.raw_prior(d.ids, probs) for d in diagnoses}
    total = sum(raw.values())
    if total <= 0.0:
        raise ValueError("all-zero probability mass over the leading diagnoses")
    return {ids: v / total for ids, v in raw.items()}
