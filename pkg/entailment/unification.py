"""
Lexical unification: atoms unify when their predicates and constant
arguments are similar enough, with a score W accumulated over the match.
"""
import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterator, Optional, Tuple

from entailment.lexkb import LexKB
from entailment.logicform import Atom, Clause, Literal, Term, TermKind
from entailment.schemas import SimMeasure, UnifyConfig

logger = logging.getLogger(__name__)

Binding = Tuple[str, Term]


@dataclass(frozen=True)
class Substitution:
    """Idempotent variable bindings: no bound variable occurs in any bound value"""
    bindings: Dict[str, Term] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "Substitution":
        return cls({})

    def __len__(self) -> int:
        return len(self.bindings)

    def __contains__(self, name: str) -> bool:
        return name in self.bindings

    def apply_term(self, term: Term) -> Term:
        if term.is_variable:
            return self.bindings.get(term.name, term)
        return term

    def apply_atom(self, atom: Atom) -> Atom:
        return Atom(atom.predicate, tuple(self.apply_term(arg) for arg in atom.args))

    def bind(self, name: str, term: Term) -> "Substitution":
        value = self.apply_term(term)
        if value.is_variable and value.name == name:
            return self
        bound = Term.variable(name)
        bindings = {key: (value if existing == bound else existing) for key, existing in self.bindings.items()}
        bindings[name] = value
        return Substitution(bindings)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{name}->{value}" for name, value in sorted(self.bindings.items())) + "}"


@dataclass(frozen=True)
class UnifyOutcome:
    sigma: Substitution
    score: float


def unify_terms(t1: Term, t2: Term, kb: LexKB, measure: SimMeasure) -> Optional[Tuple[Optional[Binding], float]]:
    """
    Match two terms.

    Returns:
        (binding or None, score), or None when the terms cannot match.
        Word constants never bind; their score is the word similarity,
        to be checked against tau_step by the caller.
    """
    if t1 == t2:
        return None, 1.0
    if t1.is_variable:
        return (t1.name, t2), 1.0
    if t2.is_variable:
        return (t2.name, t1), 1.0
    if t1.kind is TermKind.WORD_CONST and t2.kind is TermKind.WORD_CONST:
        return None, kb.similarity(t1.name, t2.name, measure)
    return None


def _is_lexical(t1: Term, t2: Term) -> bool:
    return t1 != t2 and t1.kind is TermKind.WORD_CONST and t2.kind is TermKind.WORD_CONST


def _match_assignment(
    a1: Atom, a2: Atom, targets: Tuple[int, ...], kb: LexKB, config: UnifyConfig
) -> Optional[Tuple[Substitution, float]]:
    sigma = Substitution.empty()
    total = 0.0
    for source, target in enumerate(targets):
        left = sigma.apply_term(a1.args[source])
        right = sigma.apply_term(a2.args[target])
        matched = unify_terms(left, right, kb, config.measure)
        if matched is None:
            return None
        binding, score = matched
        if _is_lexical(left, right) and not score > config.tau_step:
            return None
        if binding is not None:
            sigma = sigma.bind(*binding)
        total += score
    return sigma, total


def is_crisp(config: UnifyConfig) -> bool:
    """tau_step 1 admits no lexical match, so unification is classical and positional"""
    return config.tau_step >= 1.0


def _assignments(a1: Atom, a2: Atom, config: UnifyConfig) -> Iterator[Tuple[int, ...]]:
    if is_crisp(config):
        if a1.arity == a2.arity:
            yield tuple(range(a1.arity))
        return
    yield from permutations(range(a2.arity), a1.arity)


def unify_atoms(a1: Atom, a2: Atom, kb: LexKB, config: UnifyConfig) -> Optional[UnifyOutcome]:
    """
    Lexically unify two atoms.

    Every argument of the smaller-arity atom is assigned to a distinct
    argument of the other, choosing the assignment with the highest term
    score (earliest assignment on ties). Surplus arguments of the larger
    atom are ignored. In crisp mode (tau_step 1) predicates must be
    identical and arguments match position by position.

    Returns:
        UnifyOutcome with W = predicate score + term scores, or None
    """
    if a1.arity > a2.arity:
        a1, a2 = a2, a1

    if a1.predicate == a2.predicate:
        predicate_score = 1.0
    elif is_crisp(config):
        return None
    else:
        predicate_score = kb.similarity(a1.predicate, a2.predicate, config.measure)
    if predicate_score < config.tau_step:
        return None

    best: Optional[Tuple[Substitution, float]] = None
    for targets in _assignments(a1, a2, config):
        matched = _match_assignment(a1, a2, targets, kb, config)
        if matched is not None and (best is None or matched[1] > best[1]):
            best = matched
    if best is None:
        return None

    sigma, term_score = best
    score = predicate_score + term_score
    if not score > config.tau_atom:
        return None
    logger.debug(f"Unified {a1} ~ {a2} with W={score:.4f} sigma={sigma}")
    return UnifyOutcome(sigma=sigma, score=score)


def apply_substitution(sigma: Substitution, clause: Clause) -> Clause:
    if not len(sigma):
        return clause
    return Clause(tuple(Literal(sigma.apply_atom(lit.atom), lit.negated) for lit in clause.literals))
