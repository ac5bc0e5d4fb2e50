"""Query scoring and selection: split-in-half, entropy, and risk optimization.

The risk-optimized strategy picks the entropy winner unless it is high-risk
w.r.t. the current cautiousness, in which case the best-scored query among the
least cautious non-high-risk ones is taken instead. After every answer the
cautiousness is nudged toward braver or more cautious behavior depending on
the achieved elimination rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .diagnosis import Diagnosis
from .queries import (
    NO,
    YES,
    Partition,
    Query,
    elimination_rate,
    is_high_risk,
    query_cautiousness,
)

SPLIT = "split"
ENTROPY = "entropy"
RIO = "rio"
STRATEGIES = (SPLIT, ENTROPY, RIO)

POSTERIOR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CautiousnessParams:
    c: float = 0.25
    c_min: float = 0.0
    c_max: float = 0.5
    epsilon: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if not 0.0 <= self.c_min <= self.c <= self.c_max:
            raise ValueError("need 0 <= c_min <= c <= c_max")


@dataclass(frozen=True)
class AnsweredQuery:
    literals: frozenset
    partition: Partition
    answer: str


@dataclass
class BeliefState:
    """Normalized posteriors over the leading diagnoses plus the answer history."""

    posteriors: dict[frozenset[str], float]
    history: list[AnsweredQuery] = field(default_factory=list)

    def check(self) -> None:
        total = sum(self.posteriors.values())
        if abs(total - 1.0) > POSTERIOR_TOLERANCE:
            raise AssertionError(f"posteriors sum to {total}, not 1")


def score_split(p: Partition) -> int:
    return abs(len(p.d_x) - len(p.d_nx)) + len(p.d_z)


def answer_probability(p: Partition, beliefs: BeliefState) -> float:
    """p(yes) = mass of D_X plus half the mass of D_∅."""
    # fsum keeps the result independent of set iteration order, so score ties
    # break identically across processes
    post = beliefs.posteriors
    yes = math.fsum(post.get(ids, 0.0) for ids in p.d_x)
    yes += 0.5 * math.fsum(post.get(ids, 0.0) for ids in p.d_z)
    return yes


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def score_entropy(p: Partition, beliefs: BeliefState) -> float:
    p_yes = answer_probability(p, beliefs)
    p_no = 1.0 - p_yes
    p_dz = math.fsum(beliefs.posteriors.get(ids, 0.0) for ids in p.d_z)
    return _xlog2x(p_yes) + _xlog2x(p_no) + p_dz + 1.0


def posterior_update(beliefs: BeliefState, p: Partition, answer: str) -> BeliefState:
    """Bayesian update: rejected side zeroed and removed, D_∅ halved, renormalized."""
    rejected = p.rejected_by(answer)
    updated: dict[frozenset[str], float] = {}
    for ids, prob in beliefs.posteriors.items():
        if ids in rejected:
            continue
        factor = 0.5 if ids in p.d_z else 1.0
        updated[ids] = prob * factor
    total = sum(updated.values())
    if total <= 0.0:
        raise ValueError("observed a zero-probability answer")
    posteriors = {ids: v / total for ids, v in updated.items()}
    # history bookkeeping belongs to the session, which knows the literals
    return BeliefState(posteriors, list(beliefs.history))


def adjust_for_history(
    priors: dict[frozenset[str], float],
    history: list[AnsweredQuery],
    reclassify=None,
) -> dict[frozenset[str], float]:
    """Multiply each prior by (1/2)^z, z = answered queries leaving it uncommitted.

    For a diagnosis that was present when a query was asked, membership is read
    off the stored partition; otherwise `reclassify(literals, ids)` must return
    the bucket ('d_x', 'd_nx' or 'd_z') the diagnosis would have landed in.
    """
    adjusted: dict[frozenset[str], float] = {}
    for ids, prior in priors.items():
        z = 0
        for entry in history:
            part = entry.partition
            if ids in part.d_z:
                z += 1
            elif ids in part.d_x or ids in part.d_nx:
                pass
            elif reclassify is not None:
                if reclassify(entry.literals, ids) == "d_z":
                    z += 1
        adjusted[ids] = prior * 0.5 ** z
    total = sum(adjusted.values())
    if total <= 0.0:
        raise ValueError("all-zero probability mass after history adjustment")
    return {ids: v / total for ids, v in adjusted.items()}


def _tiebreak_key(q: Query, leading: list[Diagnosis], kb) -> tuple:
    index = {d.ids: rank for rank, d in enumerate(
        sorted(leading, key=lambda d: d.sort_key(kb))
    )}
    d_x_tuple = tuple(sorted(index[ids] for ids in q.partition.d_x))
    literal_tuple = tuple(sorted((lit.atom, not lit.positive) for lit in q.literals))
    return d_x_tuple, literal_tuple


def select_query(
    strategy: str,
    queries: list[Query],
    beliefs: BeliefState,
    cp: CautiousnessParams,
    leading: list[Diagnosis],
    kb,
) -> Query:
    """Pick the next query per the configured strategy; deterministic ties."""
    if not queries:
        raise ValueError("queries must be nonempty")
    if strategy == SPLIT:
        score = lambda q: score_split(q.partition)
    elif strategy in (ENTROPY, RIO):
        score = lambda q: score_entropy(q.partition, beliefs)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    def best(pool: list[Query]) -> Query:
        return min(pool, key=lambda q: (score(q), _tiebreak_key(q, leading, kb)))

    winner = best(queries)
    if strategy == RIO and is_high_risk(winner.partition, cp.c):
        safe = [q for q in queries if not is_high_risk(q.partition, cp.c)]
        if safe:
            least = min(query_cautiousness(q.partition) for q in safe)
            winner = best([q for q in safe if query_cautiousness(q.partition) == least])
    return winner


def update_cautiousness(
    cp: CautiousnessParams, p: Partition, answer: str, n_leading: int
) -> CautiousnessParams:
    """c ← clamp(c + 2(c̄-c̲)(⌊|D|/2-ε⌋/|D| - e(X,a)), [c̲, c̄])."""
    e = float(elimination_rate(p, answer))
    adj = math.floor(n_leading / 2 - cp.epsilon) / n_leading - e
    c = cp.c + 2.0 * (cp.c_max - cp.c_min) * adj
    c = min(max(c, cp.c_min), cp.c_max)
    return replace(cp, c=c)


def above_threshold(beliefs: BeliefState, sigma: float) -> bool:
    """True iff the leader is at least sigma% more likely than the runner-up."""
    values = sorted(beliefs.posteriors.values(), reverse=True)
    if not values:
        raise ValueError("no diagnoses")
    if len(values) == 1:
        return True
    return values[0] >= (1.0 + sigma / 100.0) * values[1]
