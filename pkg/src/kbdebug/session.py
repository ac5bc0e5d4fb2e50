"""The interactive debugging state machine.

A session computes leading diagnoses, asks discriminating queries, folds the
answers back into the problem instance as test cases, and stops once a single
diagnosis survives (singleton mode) and/or the leader is sufficiently more
probable than the runner-up (threshold mode).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from .diagnosis import DiagnosisEngine, Diagnosis, Dpi, NoDiagnosisNeeded, diagnosis_priors
from .formulas import FaultModel
from .queries import NO, YES, Query, QueryGenerator, elimination_rate, is_high_risk
from .reasoner import POSITIVE_ONLY, Literal, Reasoner
from .strategy import (
    RIO,
    STRATEGIES,
    AnsweredQuery,
    BeliefState,
    CautiousnessParams,
    above_threshold,
    adjust_for_history,
    posterior_update,
    score_entropy,
    score_split,
    select_query,
    update_cautiousness,
)

STOP_SINGLETON = "singleton"
STOP_THRESHOLD = "threshold"
STOP_BOTH = "both"
STOP_MODES = (STOP_SINGLETON, STOP_THRESHOLD, STOP_BOTH)


class SessionError(Exception):
    pass


@dataclass(frozen=True)
class SessionConfig:
    dpi: Dpi
    fault_model: FaultModel = field(default_factory=FaultModel)
    strategy: str = "entropy"
    n: int = 9
    sigma: float = 85.0
    cautiousness: CautiousnessParams = CautiousnessParams()
    stop_mode: str = STOP_SINGLETON
    signs: str = POSITIVE_ONLY

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.stop_mode not in STOP_MODES:
            raise ValueError(f"unknown stop mode {self.stop_mode!r}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0.0 < self.sigma <= 100.0:
            raise ValueError("sigma must lie in (0, 100]")


@dataclass
class Round:
    query: Query
    scores: dict
    c_before: float
    answer: str | None = None
    c_after: float | None = None
    eliminated: frozenset[frozenset[str]] = frozenset()
    react_seconds: float = 0.0
    chosen_high_risk: bool = False
    safe_available: bool = False


class Session:
    """One debugging session. All mutation flows through submit_answer."""

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.dpi = cfg.dpi
        self.cp = cfg.cautiousness
        self.reasoner = Reasoner(cfg.dpi.kb)
        self.beliefs = BeliefState({}, [])
        self.leading: list[Diagnosis] = []
        self.pending: Query | None = None
        self.result: Diagnosis | None = None
        self.rounds: list[Round] = []
        self._started = time.perf_counter()
        self._debug_seconds = 0.0
        self._recompute(initial=True)

    # -- lifecycle ----------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.result is not None

    @property
    def debug_seconds(self) -> float:
        return self._debug_seconds

    def _recompute(self, initial: bool) -> None:
        """Recompute leading diagnoses, beliefs and the next pending query."""
        t0 = time.perf_counter()
        engine = DiagnosisEngine(self.dpi, self.reasoner)
        try:
            leading = engine.leading_diagnoses(self.cfg.fault_model, self.cfg.n)
        except NoDiagnosisNeeded:
            if initial:
                raise SessionError("the knowledge base meets all requirements; nothing to debug")
            raise
        priors = diagnosis_priors(leading, engine, self.cfg.fault_model)
        generator = QueryGenerator(engine, self.cfg.signs)

        def reclassify(literals, ids):
            diag = Diagnosis(ids)
            part = generator.classify(literals, [diag])
            if ids in part.d_x:
                return "d_x"
            if ids in part.d_nx:
                return "d_nx"
            return "d_z"

        posteriors = adjust_for_history(priors, self.beliefs.history, reclassify)
        self.leading = [replace(d, posterior=posteriors[d.ids]) for d in leading]
        self.beliefs = BeliefState(posteriors, self.beliefs.history)
        self.beliefs.check()
        self.engine = engine
        self.generator = generator

        if len(self.leading) == 1:
            self.pending = None
            self.result = self.leading[0]
            self._debug_seconds += time.perf_counter() - t0
            return
        queries = generator.generate(self.leading)
        if not queries:
            # degenerate: leading diagnoses are indistinguishable
            self.pending = None
            self.result = self._most_probable()
            self._debug_seconds += time.perf_counter() - t0
            return
        query = select_query(
            self.cfg.strategy, queries, self.beliefs, self.cp, self.leading, self.dpi.kb
        )
        react = time.perf_counter() - t0
        self._debug_seconds += react
        self.pending = query
        self.rounds.append(
            Round(
                query=query,
                scores={
                    "split": score_split(query.partition),
                    "entropy": score_entropy(query.partition, self.beliefs),
                },
                c_before=self.cp.c,
                react_seconds=react,
                chosen_high_risk=is_high_risk(query.partition, self.cp.c),
                safe_available=any(
                    not is_high_risk(q.partition, self.cp.c) for q in queries
                ),
            )
        )

    def _most_probable(self) -> Diagnosis:
        return max(self.leading, key=lambda d: (d.posterior, [-i for i in d.sort_key(self.dpi.kb)]))

    def submit_answer(self, answer: str) -> None:
        if self.finished:
            raise SessionError("session already finished")
        if answer not in (YES, NO):
            raise ValueError(f"answer must be 'yes' or 'no', got {answer!r}")
        t0 = time.perf_counter()
        query = self.pending
        partition = query.partition
        rnd = self.rounds[-1]
        rnd.answer = answer

        self.dpi = self.dpi.with_case(query.literals, answer == YES)
        rejected = partition.rejected_by(answer)
        survivors = [d for d in self.leading if d.ids not in rejected]
        eliminated = frozenset(d.ids for d in self.leading if d.ids in rejected)
        rnd.eliminated = eliminated

        self.beliefs = posterior_update(self.beliefs, partition, answer)
        self.beliefs.history.append(AnsweredQuery(query.literals, partition, answer))
        self.leading = [replace(d, posterior=self.beliefs.posteriors[d.ids]) for d in survivors]

        if self.cfg.strategy == RIO:
            self.cp = update_cautiousness(self.cp, partition, answer, partition.size)
        rnd.c_after = self.cp.c
        self.pending = None

        if self._should_stop(eliminated):
            self.result = self._most_probable()
            self._debug_seconds += time.perf_counter() - t0
            return
        self._debug_seconds += time.perf_counter() - t0
        self._recompute(initial=False)

    def _should_stop(self, eliminated) -> bool:
        mode = self.cfg.stop_mode
        singleton = len(self.leading) == 1
        if mode == STOP_SINGLETON:
            return singleton
        threshold = above_threshold(self.beliefs, self.cfg.sigma) or not eliminated
        if mode == STOP_THRESHOLD:
            return threshold
        return singleton or threshold

    # -- oracles ------------------------------------------------------------

    def run_to_completion(self, oracle) -> Diagnosis:
        while not self.finished:
            self.submit_answer(oracle(self, self.pending))
        return self.result

    # -- transcript ---------------------------------------------------------

    def transcript(self, include_timing: bool = True) -> dict:
        kb = self.dpi.kb

        def idlist(ids) -> list[str]:
            return list(kb.sort_ids(ids))

        def partdict(p) -> dict:
            return {
                "d_x": sorted(idlist(ids) for ids in p.d_x),
                "d_nx": sorted(idlist(ids) for ids in p.d_nx),
                "d_z": sorted(idlist(ids) for ids in p.d_z),
            }

        rounds = []
        for rnd in self.rounds:
            entry = {
                "query_literals": sorted(str(l) for l in rnd.query.literals),
                "partition": partdict(rnd.query.partition),
                "scores": rnd.scores,
                "answer": rnd.answer,
                "c_before": rnd.c_before,
                "c_after": rnd.c_after,
                "eliminated": sorted(idlist(ids) for ids in rnd.eliminated),
            }
            if include_timing:
                entry["react_ms"] = rnd.react_seconds * 1000.0
            rounds.append(entry)
        doc = {
            "config": {
                "strategy": self.cfg.strategy,
                "n": self.cfg.n,
                "sigma": self.cfg.sigma,
                "stop_mode": self.cfg.stop_mode,
                "cautiousness": {
                    "c": self.cfg.cautiousness.c,
                    "c_min": self.cfg.cautiousness.c_min,
                    "c_max": self.cfg.cautiousness.c_max,
                    "epsilon": self.cfg.cautiousness.epsilon,
                },
            },
            "rounds": rounds,
            "result": idlist(self.result.ids) if self.finished else None,
            "metrics": {
                "queries": sum(1 for r in self.rounds if r.answer is not None),
            },
        }
        if include_timing:
            doc["metrics"]["debug_ms"] = self._debug_seconds * 1000.0
        return doc

    def transcript_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.transcript(include_timing), indent=2, sort_keys=True) + "\n"


def simulated_oracle(target_ids: frozenset[str]):
    """Answer function of the hidden intended KB: the original KB minus the target."""

    def answer(session: Session, query: Query) -> str:
        dpi = session.dpi
        repaired = (frozenset(dpi.candidate_ids) - frozenset(target_ids)) | dpi.background
        yes = session.reasoner.entails(repaired, query.literals, dpi.tp_union)
        return YES if yes else NO

    return answer


def start_session(cfg: SessionConfig) -> Session:
    return Session(cfg)
