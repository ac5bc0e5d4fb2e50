"""Propositional decision procedures: consistency, entailment, literal extraction.

Clausification is structure-preserving (auxiliary variables for non-clausal
subformulas) and the satisfiability search is complete backtracking with unit
propagation. Results are memoized per axiom-set/assumption-set; the caller
treats this module as a black box.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from .formulas import (
    Atom,
    BinOp,
    Not,
    Formula,
    KnowledgeBase,
    atoms_of,
    BICONDITIONAL,
    CONJUNCTION,
    DISJUNCTION,
    IMPLICATION,
)


class ResourceLimitExceeded(Exception):
    """The configured decision budget ran out; distinct from an unsat answer."""


@dataclass(frozen=True, order=True)
class Literal:
    atom: str
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return self.atom if self.positive else f"!{self.atom}"


@dataclass(frozen=True)
class Requirements:
    consistency: bool = True
    coherency: bool = False

    def __post_init__(self):
        if not self.consistency:
            raise ValueError("consistency is always required")


POSITIVE_ONLY = "positive-only"
BOTH_SIGNS = "both"


def _solve(clauses: list[list[int]], nvars: int, deadline: float | None) -> bool:
    """Complete DPLL with unit propagation. True iff satisfiable."""
    assign: dict[int, bool] = {}
    # (clauses, assignment) stack of decision points
    trail: list[tuple[list[list[int]], dict[int, bool]]] = []
    cur = clauses

    def propagate(cls: list[list[int]], asg: dict[int, bool]):
        # returns simplified clause list or None on conflict
        changed = True
        while changed:
            changed = False
            nxt: list[list[int]] = []
            for clause in cls:
                sat = False
                lits: list[int] = []
                for lit in clause:
                    v = asg.get(abs(lit))
                    if v is None:
                        lits.append(lit)
                    elif v == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if not lits:
                    return None
                if len(lits) == 1:
                    lit = lits[0]
                    asg[abs(lit)] = lit > 0
                    changed = True
                else:
                    nxt.append(lits)
            cls = nxt
        return cls

    branch_var: list[int] = []
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceLimitExceeded("satisfiability time budget exceeded")
        simplified = propagate(cur, assign)
        if simplified is None:
            # backtrack: flip the most recent decision
            while trail:
                cls, asg = trail.pop()
                var = branch_var.pop()
                if asg.get(var) is None:
                    # second branch not yet tried
                    asg[var] = False
                    cur, assign = cls, asg
                    break
            else:
                return False
            continue
        if not simplified:
            return True
        var = abs(simplified[0][0])
        # try var=True now; record var-unassigned snapshot for the False branch
        snap = dict(assign)
        trail.append((simplified, snap))
        branch_var.append(var)
        assign[var] = True
        cur = simplified


class Reasoner:
    """Consistency/entailment engine bound to one knowledge base.

    Axiom sets are given as frozensets of axiom ids; extra literal units
    (accumulated positive test cases) ride along as assumptions. All public
    methods are safe under concurrent calls; the caches are lock-guarded.
    """

    def __init__(self, kb: KnowledgeBase, time_budget: float | None = None):
        self.kb = kb
        self.time_budget = time_budget
        self._var_of: dict[str, int] = {}
        self._next_var = 1
        self._axiom_clauses: dict[str, list[list[int]]] = {}
        self._sat_cache: dict[frozenset, bool] = {}
        self._entailed_cache: dict[tuple, frozenset[Literal]] = {}
        self._lock = threading.RLock()
        for name in sorted(kb.signature):
            self._var(name)

    # -- clausification -----------------------------------------------------

    def _var(self, atom: str) -> int:
        v = self._var_of.get(atom)
        if v is None:
            v = self._next_var
            self._next_var += 1
            self._var_of[atom] = v
        return v

    def _aux(self) -> int:
        v = self._next_var
        self._next_var += 1
        return v

    def _clausify_axiom(self, ax_id: str) -> list[list[int]]:
        cached = self._axiom_clauses.get(ax_id)
        if cached is not None:
            return cached
        clauses: list[list[int]] = []
        root = self._encode(self.kb.by_id[ax_id].formula, clauses)
        clauses.append([root])
        self._axiom_clauses[ax_id] = clauses
        return clauses

    def _encode(self, f: Formula, out: list[list[int]]) -> int:
        """Return a literal equivalent to f, emitting defining clauses."""
        if isinstance(f, Atom):
            return self._var(f.name)
        if isinstance(f, Not):
            return -self._encode(f.arg, out)
        a = self._encode(f.left, out)
        b = self._encode(f.right, out)
        x = self._aux()
        if f.op == CONJUNCTION:
            out += [[-x, a], [-x, b], [x, -a, -b]]
        elif f.op == DISJUNCTION:
            out += [[-x, a, b], [x, -a], [x, -b]]
        elif f.op == IMPLICATION:
            out += [[-x, -a, b], [x, a], [x, -b]]
        elif f.op == BICONDITIONAL:
            out += [[-x, -a, b], [-x, a, -b], [x, a, b], [x, -a, -b]]
        else:
            raise AssertionError(f.op)
        return x

    def _assemble(self, ids: frozenset[str], units: frozenset[Literal]) -> list[list[int]]:
        clauses: list[list[int]] = []
        for ax_id in sorted(ids):
            clauses.extend(self._clausify_axiom(ax_id))
        for lit in sorted(units):
            v = self._var(lit.atom)
            clauses.append([v if lit.positive else -v])
        return clauses

    # -- decision procedures ------------------------------------------------

    def is_consistent(self, ids, units=frozenset()) -> bool:
        ids = frozenset(ids)
        units = frozenset(units)
        key = frozenset((ids, units))
        with self._lock:
            cached = self._sat_cache.get(key)
        if cached is not None:
            return cached
        with self._lock:
            clauses = self._assemble(ids, units)
            nvars = self._next_var - 1
        deadline = time.monotonic() + self.time_budget if self.time_budget else None
        result = _solve(clauses, nvars, deadline)
        with self._lock:
            self._sat_cache[key] = result
        return result

    def entails(self, ids, conj, units=frozenset()) -> bool:
        """True iff every model of ids ∪ units satisfies all literals of conj.

        An inconsistent axiom set entails everything (explosion); callers
        that care must check consistency first.
        """
        ids = frozenset(ids)
        units = frozenset(units)
        for lit in conj:
            if self.is_consistent(ids, units | {lit.negate()}):
                return False
        return True

    def entailed_literals(
        self, ids, vocab, signs: str = POSITIVE_ONLY, units=frozenset()
    ) -> frozenset[Literal]:
        """All literals over vocab entailed by a consistent axiom set."""
        ids = frozenset(ids)
        units = frozenset(units)
        key = (frozenset((ids, units)), frozenset(vocab), signs)
        with self._lock:
            cached = self._entailed_cache.get(key)
        if cached is not None:
            return cached
        if not self.is_consistent(ids, units):
            raise ValueError("entailed_literals called on inconsistent axiom set")
        candidates = [Literal(a, True) for a in sorted(vocab)]
        if signs == BOTH_SIGNS:
            candidates += [Literal(a, False) for a in sorted(vocab)]
        result = frozenset(
            lit for lit in candidates
            if not self.is_consistent(ids, units | {lit.negate()})
        )
        with self._lock:
            self._entailed_cache[key] = result
        return result

    def meets_requirements(
        self, ids, rq: Requirements, coherency_atoms=frozenset(), units=frozenset()
    ) -> bool:
        ids = frozenset(ids)
        units = frozenset(units)
        if not self.is_consistent(ids, units):
            return False
        if rq.coherency:
            for atom in sorted(coherency_atoms):
                if not self.is_consistent(ids, units | {Literal(atom, True)}):
                    return False
        return True
