"""Batch benchmarking plus the synthetic instance generators.

Two generators feed the property and scale suites:

* `random_kb` builds small random-formula KBs (for oracle-equivalence tests),
* `chain_clash_kb` builds k pairs of implication chains that converge on
  complementary literals, with a planted target diagnosis (one axiom per
  clash group).
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from dataclasses import dataclass

from .alignment import build_aligned_dpi, fix_target_diagnosis, load_alignment_csv
from .diagnosis import DiagnosisEngine, Dpi, NoDiagnosisNeeded
from .formulas import (
    Atom,
    Axiom,
    BinOp,
    CONJUNCTION,
    DISJUNCTION,
    IMPLICATION,
    FaultModel,
    KnowledgeBase,
    Not,
    parse_kb,
)
from .session import Session, SessionConfig, simulated_oracle
from .strategy import CautiousnessParams, STRATEGIES

FAITHFUL = "faithful"
ADVERSARIAL = "adversarial"


# -- generators -------------------------------------------------------------

def random_kb(seed: int, max_axioms: int = 10, max_atoms: int = 8,
              max_diagnoses: int = 8):
    """A random faulty KB with 2..max_diagnoses minimal diagnoses, or None
    for a dud seed.

    One random atom is asserted as background knowledge; axiom formulas are
    shallow random combinations of implication/conjunction/disjunction/negation.
    Seeds whose minimal diagnoses are not pairwise distinguishable by their
    repaired KBs' positive entailments are rejected, so that interactive
    discrimination down to a single diagnosis is possible in principle.
    """
    rng = random.Random(seed)
    n_atoms = rng.randint(3, max_atoms)
    atoms = [f"A{i}" for i in range(n_atoms)]
    n_axioms = rng.randint(3, max_axioms - 1)

    def leaf():
        a = Atom(rng.choice(atoms))
        return Not(a) if rng.random() < 0.3 else a

    def formula(depth: int):
        if depth == 0 or rng.random() < 0.4:
            return leaf()
        op = rng.choice((IMPLICATION, IMPLICATION, CONJUNCTION, DISJUNCTION))
        return BinOp(op, formula(depth - 1), formula(depth - 1))

    axioms = [Axiom(f"ax{i + 1}", formula(2)) for i in range(n_axioms)]
    root = rng.choice(atoms)
    axioms.append(Axiom("bg", Atom(root)))
    kb = KnowledgeBase(axioms, background_ids=frozenset({"bg"}))

    dpi = Dpi(kb)
    engine = DiagnosisEngine(dpi)
    if not engine.is_faulty(frozenset(kb.candidate_ids)):
        return None
    diagnoses = engine.all_minimal_diagnoses()
    if not 2 <= len(diagnoses) <= max_diagnoses:
        return None
    from .queries import QueryGenerator

    generator = QueryGenerator(engine)
    ents = [generator.entailments_of(d.ids) for d in diagnoses]
    if len(set(ents)) < len(ents):
        return None
    return dpi


def chain_clash_kb(
    seed: int,
    groups: int = 3,
    total_axioms: int = 100,
    target_prior: float = 0.4,
    decoy_prior: float = 0.01,
    prior_mode: str = FAITHFUL,
):
    """k clash groups of paired implication chains with a planted target.

    Each group contributes one minimal conflict (both chains in full); the
    planted target picks one axiom per group. Returns (Dpi, target_ids).
    """
    rng = random.Random(seed)
    per_group = total_axioms // groups
    extra = total_axioms - per_group * groups
    axioms: list[Axiom] = []
    background: set[str] = set()
    target: set[str] = set()
    for g in range(groups):
        n_g = per_group + (1 if g < extra else 0)
        len_a = max(1, n_g // 2)
        len_b = max(1, n_g - len_a)
        root = f"R{g}"
        bg_id = f"root{g}"
        axioms.append(Axiom(bg_id, Atom(root)))
        background.add(bg_id)
        group_ids: list[str] = []
        for chain, length, sign in (("a", len_a, True), ("b", len_b, False)):
            prev = root
            for i in range(length):
                last = i == length - 1
                head = f"P{g}" if last else f"{chain.upper()}{g}_{i}"
                rhs = Atom(head) if (sign or not last) else Not(Atom(head))
                ax_id = f"{chain}{g}_{i}"
                axioms.append(Axiom(ax_id, BinOp(IMPLICATION, Atom(prev), rhs)))
                group_ids.append(ax_id)
                prev = head
        target.add(rng.choice(group_ids))

    if prior_mode == FAITHFUL:
        good, bad = target_prior, decoy_prior
    elif prior_mode == ADVERSARIAL:
        good, bad = decoy_prior, target_prior
    else:
        raise ValueError(f"bad prior mode {prior_mode!r}")
    axioms = [
        Axiom(ax.id, ax.formula, None if ax.id in background else (good if ax.id in target else bad))
        for ax in axioms
    ]
    kb = KnowledgeBase(axioms, frozenset(background))
    return Dpi(kb), frozenset(target)


# -- benchmark --------------------------------------------------------------

@dataclass
class BenchRow:
    instance: str
    strategy: str
    queries: int | None
    debug_ms: float | None
    react_ms: float | None
    target_found: bool | None
    error: str = ""


def _session_config(dpi: Dpi, strategy: str, cfg: dict) -> SessionConfig:
    return SessionConfig(
        dpi=dpi,
        fault_model=FaultModel(),
        strategy=strategy,
        n=int(cfg.get("n", 9)),
        sigma=float(cfg.get("sigma", 85.0)),
        cautiousness=CautiousnessParams(
            c=float(cfg.get("c", 0.25)),
            c_min=float(cfg.get("c_min", 0.0)),
            c_max=float(cfg.get("c_max", 0.5)),
            epsilon=float(cfg.get("epsilon", 0.25)),
        ),
        stop_mode=cfg.get("stop", "singleton"),
    )


def _load_instance(spec: dict, cfg: dict):
    """Resolve one benchmark instance spec to (label, dpi, target_ids)."""
    label = spec["label"]
    if "kb" in spec:
        with open(spec["kb"], encoding="utf-8") as fh:
            kb = parse_kb(fh.read())
        dpi = Dpi(kb)
    elif "kb1" in spec:
        with open(spec["kb1"], encoding="utf-8") as fh:
            kb1 = parse_kb(fh.read())
        with open(spec["kb2"], encoding="utf-8") as fh:
            kb2 = parse_kb(fh.read())
        with open(spec["mapping"], encoding="utf-8") as fh:
            alignment = load_alignment_csv(fh.read())
        dpi = build_aligned_dpi(
            kb1, kb2, alignment,
            ontologies_in_background=bool(spec.get("ontologies_in_background", False)),
        )
        if "target" not in spec and "reference" in spec:
            with open(spec["reference"], encoding="utf-8") as fh:
                reference = load_alignment_csv(fh.read())
            if spec.get("target_policy") == "max-nonalignment":
                target = _max_nonalignment_target(dpi, alignment)
            else:
                target = fix_target_diagnosis(dpi, alignment, reference).ids
            return label, dpi, target
    elif "synthetic" in spec:
        syn = spec["synthetic"]
        dpi, target = chain_clash_kb(
            seed=int(syn.get("seed", 0)),
            groups=int(syn.get("groups", 3)),
            total_axioms=int(syn.get("total_axioms", 100)),
            prior_mode=syn.get("prior_mode", FAITHFUL),
        )
        if "target" not in spec:
            return label, dpi, target
    else:
        raise ValueError(f"instance {label!r}: need kb, kb1/kb2/mapping, or synthetic")
    target = frozenset(spec["target"])
    return label, dpi, target


def _max_nonalignment_target(dpi: Dpi, alignment):
    from .alignment import alignment_axiom_ids

    m_ids = set(alignment_axiom_ids(alignment))
    engine = DiagnosisEngine(dpi)
    pool = engine.leading_diagnoses(FaultModel(), 30)
    return max(
        pool, key=lambda d: (len(d.ids - m_ids), [c for c in sorted(d.ids)])
    ).ids


def run_benchmark(cfg: dict) -> tuple[list[BenchRow], str]:
    """Run every (instance, strategy) pair; returns rows plus the CSV text."""
    strategies = cfg.get("strategies", list(STRATEGIES))
    timing = bool(cfg.get("timing", True))
    rows: list[BenchRow] = []
    for spec in cfg["instances"]:
        try:
            label, dpi, target = _load_instance(spec, cfg)
        except Exception as exc:
            for strategy in strategies:
                rows.append(BenchRow(spec.get("label", "?"), strategy, None, None, None, None,
                                     error=str(exc)))
            continue
        for strategy in strategies:
            try:
                session = Session(_session_config(dpi, strategy, cfg))
                result = session.run_to_completion(simulated_oracle(target))
                reacts = [r.react_seconds for r in session.rounds] or [0.0]
                rows.append(BenchRow(
                    instance=label,
                    strategy=strategy,
                    queries=session.transcript()["metrics"]["queries"],
                    debug_ms=session.debug_seconds * 1000.0 if timing else 0.0,
                    react_ms=statistics.mean(reacts) * 1000.0 if timing else 0.0,
                    target_found=result.ids == target,
                ))
            except Exception as exc:
                rows.append(BenchRow(label, strategy, None, None, None, None, error=str(exc)))
    return rows, render_csv(rows, strategies)


def render_csv(rows: list[BenchRow], strategies) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["section", "instance", "strategy", "queries", "debug_ms", "react_ms",
                "target_found", "error"])
    for r in rows:
        w.writerow(["run", r.instance, r.strategy,
                    "" if r.queries is None else r.queries,
                    "" if r.debug_ms is None else f"{r.debug_ms:.3f}",
                    "" if r.react_ms is None else f"{r.react_ms:.3f}",
                    "" if r.target_found is None else str(r.target_found).lower(),
                    r.error])
    by_strategy: dict[str, list[BenchRow]] = {}
    for r in rows:
        if r.queries is not None:
            by_strategy.setdefault(r.strategy, []).append(r)
    for strategy in strategies:
        runs = by_strategy.get(strategy, [])
        if not runs:
            continue
        w.writerow(["aggregate", "", strategy,
                    f"{statistics.mean(r.queries for r in runs):.3f}",
                    f"{statistics.mean(r.debug_ms for r in runs):.3f}",
                    f"{statistics.mean(r.react_ms for r in runs):.3f}",
                    "", ""])
    # per-instance RIO vs. the better/worse of the other two strategies
    by_instance: dict[str, dict[str, int]] = {}
    for r in rows:
        if r.queries is not None:
            by_instance.setdefault(r.instance, {})[r.strategy] = r.queries
    for instance in sorted(by_instance):
        qs = by_instance[instance]
        if "rio" not in qs:
            continue
        others = [qs[s] for s in ("split", "entropy") if s in qs]
        if not others:
            continue
        w.writerow(["comparison", instance, "rio", qs["rio"],
                    f"min_other={min(others)}", f"max_other={max(others)}", "", ""])
    return out.getvalue()
