"""Alignment ingestion: building an aligned DPI and fixing a target diagnosis.

Correspondences come in as CSV rows `left,right,relation,confidence` with
relation one of ``<`` (subsumed-by), ``>`` (subsumes) and ``=`` (equivalent);
they are translated one-to-one into implication/biconditional axioms whose
explicit fault prior is 1 - confidence.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .diagnosis import DiagnosisEngine, Diagnosis, Dpi, NoDiagnosisNeeded
from .formulas import Atom, Axiom, BinOp, BICONDITIONAL, IMPLICATION, KnowledgeBase
from .reasoner import Requirements

RELATIONS = ("<", ">", "=")


class AlignmentError(Exception):
    pass


@dataclass(frozen=True)
class Correspondence:
    left: str
    right: str
    relation: str
    confidence: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise AlignmentError(f"bad relation {self.relation!r} (expected <, > or =)")
        if not 0.0 <= self.confidence <= 1.0:
            raise AlignmentError(f"confidence {self.confidence} outside [0,1]")

    def to_formula(self):
        left, right = Atom(self.left), Atom(self.right)
        if self.relation == "<":
            return BinOp(IMPLICATION, left, right)
        if self.relation == ">":
            return BinOp(IMPLICATION, right, left)
        return BinOp(BICONDITIONAL, left, right)


@dataclass(frozen=True)
class Alignment:
    correspondences: tuple[Correspondence, ...]

    def __len__(self) -> int:
        return len(self.correspondences)


def load_alignment_csv(text: str) -> Alignment:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if rows and [c.strip().lower() for c in rows[0][:4]] == ["left", "right", "relation", "confidence"]:
        rows = rows[1:]
    corrs = []
    for i, row in enumerate(rows, start=1):
        if len(row) < 4:
            raise AlignmentError(f"row {i}: expected 4 columns left,right,relation,confidence")
        left, right, relation, conf = (c.strip() for c in row[:4])
        try:
            v = float(conf)
        except ValueError:
            raise AlignmentError(f"row {i}: bad confidence {conf!r}")
        corrs.append(Correspondence(left, right, relation, v))
    return Alignment(tuple(corrs))


def alignment_axiom_ids(alignment: Alignment) -> tuple[str, ...]:
    return tuple(f"m{i}" for i in range(1, len(alignment) + 1))


def build_aligned_dpi(
    kb1: KnowledgeBase,
    kb2: KnowledgeBase,
    alignment: Alignment,
    base_prior: float = 0.001,
    ontologies_in_background: bool = False,
    requirements: Requirements = Requirements(),
) -> Dpi:
    """O = kb1 ∪ kb2 ∪ translated(alignment) with the confidence-derived priors.

    Ontology axioms get explicit prior `base_prior`, alignment axioms 1 - v.
    With ontologies_in_background=True the whole of kb1 ∪ kb2 is declared
    correct and only the alignment is diagnosed.
    """
    axioms: list[Axiom] = []
    ids1 = {ax.id for ax in kb1.axioms}
    ids2 = {ax.id for ax in kb2.axioms}
    clash = ids1 & ids2

    def carried(ax: Axiom, prefix: str) -> Axiom:
        ax_id = f"{prefix}{ax.id}" if ax.id in clash else ax.id
        prior = ax.explicit_prior if ax.explicit_prior is not None else base_prior
        return Axiom(ax_id, ax.formula, prior)

    background: set[str] = set()
    for kb, prefix in ((kb1, "o1_"), (kb2, "o2_")):
        for ax in kb.axioms:
            new = carried(ax, prefix)
            axioms.append(new)
            if ax.id in kb.background_ids or ontologies_in_background:
                background.add(new.id)

    signature = kb1.signature | kb2.signature
    m_ids = alignment_axiom_ids(alignment)
    for m_id, corr in zip(m_ids, alignment.correspondences):
        for endpoint in (corr.left, corr.right):
            if endpoint not in signature:
                raise AlignmentError(
                    f"correspondence endpoint {endpoint!r} missing from both signatures"
                )
        axioms.append(Axiom(m_id, corr.to_formula(), 1.0 - corr.confidence))

    kb = KnowledgeBase(
        axioms,
        frozenset(background),
        kb1.coherency_atoms | kb2.coherency_atoms,
    )
    return Dpi(kb, requirements=requirements)


def fix_target_diagnosis(dpi: Dpi, alignment: Alignment, reference: Alignment) -> Diagnosis:
    """Minimum-cardinality diagnosis inside the non-reference alignment axioms.

    Ties are broken lexicographically by sorted axiom ids. Raises
    AlignmentError when no diagnosis fits inside M ∖ R.
    """
    ref = {(c.left, c.right, c.relation) for c in reference.correspondences}
    missing = ref - {(c.left, c.right, c.relation) for c in alignment.correspondences}
    if missing:
        raise AlignmentError(f"reference rows not part of the alignment: {sorted(missing)}")
    pool = {
        m_id
        for m_id, corr in zip(alignment_axiom_ids(alignment), alignment.correspondences)
        if (corr.left, corr.right, corr.relation) not in ref
    }
    # diagnose within M ∖ R only: everything else moves to the background
    restricted_bg = frozenset(dpi.kb.by_id) - pool
    restricted_kb = KnowledgeBase(
        list(dpi.kb.axioms), restricted_bg, dpi.kb.coherency_atoms
    )
    restricted = Dpi(
        restricted_kb, dpi.positive_cases, dpi.negative_cases, dpi.requirements
    )
    engine = DiagnosisEngine(restricted)
    try:
        candidates = engine.all_minimal_diagnoses()
    except NoDiagnosisNeeded as exc:
        raise AlignmentError(f"aligned ontology is not faulty: {exc}")
    if not candidates:
        raise AlignmentError("no diagnosis within the non-reference alignment")
    return min(candidates, key=lambda d: (len(d.ids), tuple(sorted(d.ids))))
