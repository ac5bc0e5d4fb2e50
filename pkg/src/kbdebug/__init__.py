"""Interactive knowledge-base debugger.

Locates the faulty axiom set in an inconsistent/incoherent KB by asking a
minimal number of yes/no entailment questions, with split-in-half, entropy
and risk-optimized query selection.
"""

from .diagnosis import DiagnosisEngine, Diagnosis, Dpi, NoDiagnosisNeeded, diagnosis_priors
from .formulas import (
    Axiom,
    FaultModel,
    KBError,
    KBSyntaxError,
    KnowledgeBase,
    axiom_fault_probability,
    count_constructs,
    parse_kb,
)
from .queries import Partition, Query, QueryGenerator, elimination_rate, is_high_risk, query_cautiousness
from .reasoner import Literal, Reasoner, Requirements, ResourceLimitExceeded
from .session import Session, SessionConfig, SessionError, simulated_oracle, start_session
from .strategy import (
    BeliefState,
    CautiousnessParams,
    above_threshold,
    adjust_for_history,
    answer_probability,
    posterior_update,
    score_entropy,
    score_split,
    select_query,
    update_cautiousness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
