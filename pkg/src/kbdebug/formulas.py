"""Propositional axiom language: AST, parser, KB container, fault model.

KB file format (UTF-8, line oriented):

    # comment
    @coherent A B C
    @background ax3 ax4
    axiom ax1 [p=0.001] : PhD -> Researcher

Operators ``!``, ``&``, ``|``, ``->``, ``<->`` with precedence
``!`` > ``&`` > ``|`` > ``->`` > ``<->``; ``->`` is right-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

NEGATION = "negation"
CONJUNCTION = "conjunction"
DISJUNCTION = "disjunction"
IMPLICATION = "implication"
BICONDITIONAL = "biconditional"

#: The fixed construct set CT. A biconditional counts as one construct.
CONSTRUCT_TYPES = (NEGATION, CONJUNCTION, DISJUNCTION, IMPLICATION, BICONDITIONAL)

_OP_SYMBOL = {
    CONJUNCTION: "&",
    DISJUNCTION: "|",
    IMPLICATION: "->",
    BICONDITIONAL: "<->",
}


class KBError(Exception):
    """Base class for KB file problems."""


class KBSyntaxError(KBError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return f"!{_paren(self.arg, NEGATION)}"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of CONJUNCTION .. BICONDITIONAL
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        sym = _OP_SYMBOL[self.op]
        return f"{_paren(self.left, self.op)} {sym} {_paren(self.right, self.op)}"


Formula = Atom | Not | BinOp

_PRECEDENCE = {
    BICONDITIONAL: 0,
    IMPLICATION: 1,
    DISJUNCTION: 2,
    CONJUNCTION: 3,
    NEGATION: 4,
}


def _paren(f: Formula, parent_op: str) -> str:
    if isinstance(f, Atom):
        return f.name
    child_op = NEGATION if isinstance(f, Not) else f.op
    if _PRECEDENCE[child_op] <= _PRECEDENCE[parent_op]:
        return f"({f})"
    return str(f)


def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return atoms_of(f.arg)
    return atoms_of(f.left) | atoms_of(f.right)


def count_constructs(f: Formula) -> dict[str, int]:
    """Occurrences n(t) of each construct type; atoms are not counted."""
    counts: dict[str, int] = {}

    def walk(node: Formula) -> None:
        if isinstance(node, Atom):
            return
        if isinstance(node, Not):
            counts[NEGATION] = counts.get(NEGATION, 0) + 1
            walk(node.arg)
        else:
            counts[node.op] = counts.get(node.op, 0) + 1
            walk(node.left)
            walk(node.right)

    walk(f)
    return counts


@dataclass(frozen=True)
class Axiom:
    id: str
    formula: Formula
    explicit_prior: Optional[float] = None


@dataclass(frozen=True)
class FaultModel:
    """Prior fault probability p_t per construct type, all in (0, 1)."""

    construct_priors: dict[str, float] = field(
        default_factory=lambda: {t: 0.01 for t in CONSTRUCT_TYPES}
    )

    def __post_init__(self):
        for t in CONSTRUCT_TYPES:
            p = self.construct_priors.get(t)
            if p is None:
                raise ValueError(f"missing construct prior for {t}")
            if not 0.0 < p < 1.0:
                raise ValueError(f"construct prior for {t} must be in (0,1), got {p}")


def axiom_fault_probability(axiom: Axiom, fm: FaultModel) -> float:
    """p(ax) = 1 - prod_t (1 - p_t)^n(t), unless an explicit prior is set."""
    if axiom.explicit_prior is not None:
        return axiom.explicit_prior
    prod = 1.0
    for t, n in count_constructs(axiom.formula).items():
        prod *= (1.0 - fm.construct_priors[t]) ** n
    return 1.0 - prod


class KnowledgeBase:
    """Ordered axiom collection with background partition and coherency atoms.

    Immutable after construction; file order defines the global axiom order
    used for tie-breaking everywhere downstream.
    """

    def __init__(
        self,
        axioms: list[Axiom],
        background_ids: frozenset[str] = frozenset(),
        coherency_atoms: frozenset[str] = frozenset(),
    ):
        seen: set[str] = set()
        for ax in axioms:
            if ax.id in seen:
                raise KBError(f"duplicate axiom id {ax.id!r}")
            seen.add(ax.id)
        unknown = background_ids - seen
        if unknown:
            raise KBError(f"@background references unknown axiom ids: {sorted(unknown)}")
        self.axioms: tuple[Axiom, ...] = tuple(axioms)
        self.background_ids = frozenset(background_ids)
        self.by_id = {ax.id: ax for ax in self.axioms}
        self.order_index = {ax.id: i for i, ax in enumerate(self.axioms)}
        self.signature = frozenset().union(
            *(atoms_of(ax.formula) for ax in self.axioms)
        ) if self.axioms else frozenset()
        bad = coherency_atoms - self.signature
        if bad:
            raise KBError(f"@coherent references atoms outside the signature: {sorted(bad)}")
        self.coherency_atoms = frozenset(coherency_atoms)

    @property
    def candidate_ids(self) -> tuple[str, ...]:
        """Ids of O∖B in global order (the diagnosis search space)."""
        return tuple(ax.id for ax in self.axioms if ax.id not in self.background_ids)

    def sort_ids(self, ids) -> tuple[str, ...]:
        return tuple(sorted(ids, key=self.order_index.__getitem__))

    def serialize(self) -> str:
        lines = []
        if self.coherency_atoms:
            lines.append("@coherent " + " ".join(sorted(self.coherency_atoms)))
        if self.background_ids:
            lines.append("@background " + " ".join(self.sort_ids(self.background_ids)))
        for ax in self.axioms:
            prior = f" [p={ax.explicit_prior!r}]" if ax.explicit_prior is not None else ""
            lines.append(f"axiom {ax.id}{prior} : {ax.formula}")
        return "\n".join(lines) + ("\n" if lines else "")


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<iff><->)|(?P<imp>->)|(?P<and>&)"
    r"|(?P<or>\|)|(?P<not>!)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


class _FormulaParser:
    def __init__(self, text: str, line: int, col_offset: int):
        self.text = text
        self.line = line
        self.col_offset = col_offset
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                col = col_offset + len(text) - len(stripped) + 1
                raise KBSyntaxError(f"unexpected character {stripped[0]!r}", line, col)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), col_offset + m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def _peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _error_col(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][2]
        return self.col_offset + len(self.text) + 1

    def parse(self) -> Formula:
        f = self._iff()
        if self._peek() is not None:
            raise KBSyntaxError(
                f"unexpected token {self._peek()[1]!r}", self.line, self._error_col()
            )
        return f

    def _iff(self) -> Formula:
        left = self._imp()
        if self._peek() and self._peek()[0] == "iff":
            self.i += 1
            return BinOp(BICONDITIONAL, left, self._iff())
        return left

    def _imp(self) -> Formula:
        left = self._or()
        if self._peek() and self._peek()[0] == "imp":
            self.i += 1
            return BinOp(IMPLICATION, left, self._imp())
        return left

    def _or(self) -> Formula:
        left = self._and()
        while self._peek() and self._peek()[0] == "or":
            self.i += 1
            left = BinOp(DISJUNCTION, left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._unary()
        while self._peek() and self._peek()[0] == "and":
            self.i += 1
            left = BinOp(CONJUNCTION, left, self._unary())
        return left

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise KBSyntaxError("missing operand", self.line, self._error_col())
        kind, value, col = tok
        if kind == "not":
            self.i += 1
            return Not(self._unary())
        if kind == "lpar":
            self.i += 1
            f = self._iff()
            closing = self._peek()
            if closing is None or closing[0] != "rpar":
                raise KBSyntaxError("missing ')'", self.line, self._error_col())
            self.i += 1
            return f
        if kind == "ident":
            self.i += 1
            return Atom(value)
        raise KBSyntaxError(f"unexpected token {value!r}", self.line, col)


def parse_formula(text: str, line: int = 1, col_offset: int = 0) -> Formula:
    return _FormulaParser(text, line, col_offset).parse()


_AXIOM_RE = re.compile(
    r"axiom\s+(?P<id>[A-Za-z_][A-Za-z0-9_]*)\s*"
    r"(?:\[\s*p\s*=\s*(?P<prior>[0-9.eE+-]+)\s*\]\s*)?:(?P<body>.*)$"
)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse KB file content. Empty text yields an empty KB."""
    axioms: list[Axiom] = []
    background: set[str] = set()
    coherent: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("@coherent"):
            coherent.update(stripped[len("@coherent"):].split())
            continue
        if stripped.startswith("@background"):
            background.update(stripped[len("@background"):].split())
            continue
        m = _AXIOM_RE.match(stripped)
        if m is None:
            raise KBSyntaxError("expected 'axiom <id> [p=<float>] : <formula>'", lineno, indent + 1)
        ax_id = m.group("id")
        prior = None
        if m.group("prior") is not None:
            try:
                prior = float(m.group("prior"))
            except ValueError:
                raise KBSyntaxError(f"bad prior {m.group('prior')!r}", lineno, indent + 1)
            if not 0.0 < prior < 1.0:
                raise KBError(f"line {lineno}: prior for {ax_id!r} must be in (0,1), got {prior}")
        body = m.group("body")
        col_offset = indent + len(stripped) - len(body)
        formula = parse_formula(body, lineno, col_offset)
        if any(a.id == ax_id for a in axioms):
            raise KBError(f"line {lineno}: duplicate axiom id {ax_id!r}")
        axioms.append(Axiom(ax_id, formula, prior))
    return KnowledgeBase(axioms, frozenset(background), frozenset(coherent))
