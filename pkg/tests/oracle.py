"""Independent brute-force oracle used to cross-check the engine.

Semantics are computed by full truth-table enumeration encoded as bitmasks:
bit k of a formula's mask is set iff assignment k satisfies the formula.
Completely separate from the package's clausification/DPLL path.
"""

from __future__ import annotations

import itertools

from kbdebug.formulas import (
    Atom,
    BinOp,
    Not,
    BICONDITIONAL,
    CONJUNCTION,
    DISJUNCTION,
    IMPLICATION,
)
from kbdebug.reasoner import Literal


class TruthTable:
    def __init__(self, kb):
        self.kb = kb
        self.atoms = sorted(kb.signature)
        self.n = len(self.atoms)
        assert self.n <= 16, "truth-table oracle capped at 16 atoms"
        self.full = (1 << (1 << self.n)) - 1
        self.atom_mask = {}
        for i, atom in enumerate(self.atoms):
            mask = 0
            for k in range(1 << self.n):
                if (k >> i) & 1:
                    mask |= 1 << k
            self.atom_mask[atom] = mask
        self.axiom_mask = {ax.id: self.formula_mask(ax.formula) for ax in kb.axioms}

    def formula_mask(self, f) -> int:
        if isinstance(f, Atom):
            return self.atom_mask[f.name]
        if isinstance(f, Not):
            return self.full & ~self.formula_mask(f.arg)
        a, b = self.formula_mask(f.left), self.formula_mask(f.right)
        if f.op == CONJUNCTION:
            return a & b
        if f.op == DISJUNCTION:
            return a | b
        if f.op == IMPLICATION:
            return (self.full & ~a) | b
        if f.op == BICONDITIONAL:
            return (a & b) | (self.full & ~a & ~b)
        raise AssertionError(f.op)

    def literal_mask(self, lit: Literal) -> int:
        m = self.atom_mask[lit.atom]
        return m if lit.positive else self.full & ~m

    def set_mask(self, ids, units=()) -> int:
        mask = self.full
        for ax_id in ids:
            mask &= self.axiom_mask[ax_id]
        for lit in units:
            mask &= self.literal_mask(lit)
        return mask

    # -- reasoner-level facts ----------------------------------------------

    def consistent(self, ids, units=()) -> bool:
        return self.set_mask(ids, units) != 0

    def entails(self, ids, literals, units=()) -> bool:
        mask = self.set_mask(ids, units)
        for lit in literals:
            if mask & ~self.literal_mask(lit):
                return False
        return True

    def entailed_positive(self, ids, vocab, units=()) -> frozenset[Literal]:
        mask = self.set_mask(ids, units)
        assert mask != 0
        return frozenset(
            Literal(a, True) for a in vocab if not mask & ~self.atom_mask[a]
        )

    # -- diagnosis-level facts ---------------------------------------------

    def is_faulty(self, dpi, candidate) -> bool:
        ids = frozenset(candidate) | dpi.background
        units = dpi.tp_union
        mask = self.set_mask(ids, units)
        if mask == 0:
            return True
        if dpi.requirements.coherency:
            for atom in dpi.kb.coherency_atoms:
                if mask & self.atom_mask[atom] == 0:
                    return True
        for tn in dpi.negative_cases:
            if self.entails(ids, tn, units):
                return True
        return False

    def all_minimal_diagnoses(self, dpi) -> set[frozenset[str]]:
        candidates = list(dpi.candidate_ids)
        diagnoses: list[frozenset[str]] = []
        for size in range(len(candidates) + 1):
            for combo in itertools.combinations(candidates, size):
                d = frozenset(combo)
                if any(prev <= d for prev in diagnoses):
                    continue
                if not self.is_faulty(dpi, frozenset(candidates) - d):
                    diagnoses.append(d)
        return set(diagnoses)

    def all_minimal_conflicts(self, dpi) -> set[frozenset[str]]:
        candidates = list(dpi.candidate_ids)
        conflicts: list[frozenset[str]] = []
        for size in range(1, len(candidates) + 1):
            for combo in itertools.combinations(candidates, size):
                c = frozenset(combo)
                if any(prev <= c for prev in conflicts):
                    continue
                if self.is_faulty(dpi, c):
                    conflicts.append(c)
        if self.is_faulty(dpi, frozenset()):
            return {frozenset()}
        return set(conflicts)

    def classify(self, dpi, literals, diagnosis_ids_list) -> tuple:
        """⟨D_X, D_¬X, D_∅⟩ membership computed straight from the definitions."""
        all_candidates = frozenset(dpi.candidate_ids)
        d_x, d_nx, d_z = set(), set(), set()
        for ids in diagnosis_ids_list:
            repaired = (all_candidates - ids) | dpi.background
            if self.entails(repaired, literals, dpi.tp_union):
                d_x.add(ids)
            elif not self.consistent(repaired, dpi.tp_union | frozenset(literals)):
                d_nx.add(ids)
            else:
                d_z.add(ids)
        return frozenset(d_x), frozenset(d_nx), frozenset(d_z)
