"""
Lexical resolution and the scored refutation search behind MRM entailment.
"""
import heapq
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from entailment.lexkb import LexKB
from entailment.logicform import Clause, Literal, LogicalForm, Term, clausify
from entailment.schemas import Method, ProofStatus, ProveConfig, UnifyConfig, Verdict
from entailment.unification import Substitution, apply_substitution, unify_atoms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResolutionStep:
    parents: Tuple[int, int]
    resolved_literals: Tuple[Literal, Literal]
    sigma: Substitution
    resolvent: Clause
    step_score: float


@dataclass(frozen=True)
class Derivation:
    steps: Tuple[ResolutionStep, ...]
    total_score: float
    final: Clause


@dataclass(frozen=True)
class RefutationResult:
    """Outcome of a refutation search; derivation is set only when status is PROVED"""
    status: ProofStatus
    derivation: Optional[Derivation]
    generated: int


def format_score(value: float) -> str:
    text = f"{value:.6f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def resolve_step(
    c1: Clause, c2: Clause, kb: LexKB, config: UnifyConfig, parent_ids: Tuple[int, int] = (0, 0)
) -> List[ResolutionStep]:
    """
    All lexical resolvents of two clauses that share no variables.

    One step per complementary literal pair whose atoms lexically unify;
    the resolvent is sigma(rest of c1) | sigma(rest of c2).
    """
    steps = []
    for i, left in enumerate(c1.literals):
        for j, right in enumerate(c2.literals):
            if left.negated == right.negated:
                continue
            outcome = unify_atoms(left.atom, right.atom, kb, config)
            if outcome is None:
                continue
            rest_left = apply_substitution(outcome.sigma, Clause(c1.literals[:i] + c1.literals[i + 1:]))
            rest_right = apply_substitution(outcome.sigma, Clause(c2.literals[:j] + c2.literals[j + 1:]))
            steps.append(
                ResolutionStep(
                    parents=parent_ids,
                    resolved_literals=(left, right),
                    sigma=outcome.sigma,
                    resolvent=Clause(rest_left.literals + rest_right.literals),
                    step_score=outcome.score,
                )
            )
    return steps


def _is_tautology(clause: Clause) -> bool:
    literals = set(clause.literals)
    return any(literal.complement() in literals for literal in literals if not literal.negated)


def _canonical_key(clause: Clause) -> FrozenSet[str]:
    # Clauses equal up to variable renaming share a key
    def shape(literal: Literal) -> str:
        args = ",".join("?" if arg.is_variable else arg.name for arg in literal.atom.args)
        return f"{'-' if literal.negated else ''}{literal.atom.predicate}({args})"

    ordered = sorted(clause.literals, key=lambda literal: (shape(literal), str(literal)))
    names: Dict[str, Term] = {}
    for literal in ordered:
        for name in literal.atom.variables():
            names.setdefault(name, Term.variable(f"v{len(names) + 1}"))
    return frozenset(str(literal) for literal in clause.rename(names).literals)


def _standardize(clause: Clause, clause_id: int) -> Clause:
    mapping = {name: Term.variable(f"{name.split('#', 1)[0]}#{clause_id}") for name in clause.variables()}
    return clause.rename(mapping)


def _standardize_inputs(clauses: Sequence[Clause]) -> List[Clause]:
    owners: Dict[str, Set[int]] = {}
    for clause_id, clause in enumerate(clauses, start=1):
        for name in clause.variables():
            owners.setdefault(name, set()).add(clause_id)
    renamed = []
    for clause_id, clause in enumerate(clauses, start=1):
        mapping = {
            name: Term.variable(f"{name}#{clause_id}") for name in clause.variables() if len(owners[name]) > 1
        }
        renamed.append(clause.rename(mapping) if mapping else clause)
    return renamed


def _initial_support(clauses: Sequence[Clause]) -> Set[int]:
    # The last clause alone is a complete support when the others are trivially satisfiable
    last = len(clauses)
    rest = clauses[:-1]
    if all(any(not lit.negated for lit in clause) for clause in rest) or all(
        any(lit.negated for lit in clause) for clause in rest
    ):
        return {last}
    return set(range(1, last + 1))


class _RefutationSearch:
    """
    Best-first given-clause loop; priority is the accumulated score of a clause's derivation.

    Resolvents, the empty clause included, wait in the queue, so a refutation
    is returned only once it is the best-scored clause left. A variant of a
    queued clause reached with a higher score retires the queued copy.
    """

    def __init__(self, clauses: Sequence[Clause], kb: LexKB, config: ProveConfig):
        self.kb = kb
        self.config = config
        self.clauses: Dict[int, Clause] = {}
        self.origin: Dict[int, ResolutionStep] = {}
        self.ancestry: Dict[int, FrozenSet[int]] = {}
        self.scores: Dict[int, float] = {}
        self.variants: Dict[FrozenSet[str], int] = {}
        self.retired: Set[int] = set()
        self.generated = 0

        for clause_id, clause in enumerate(_standardize_inputs(clauses), start=1):
            self.clauses[clause_id] = clause
            self.ancestry[clause_id] = frozenset()
            self.scores[clause_id] = 0.0
            self.variants.setdefault(_canonical_key(clause), clause_id)
        self.input_count = len(self.clauses)
        self.next_id = self.input_count + 1

        support = _initial_support(clauses)
        self.processed: Set[int] = {cid for cid in self.clauses if cid not in support}
        self.queue: List[Tuple[float, int]] = [(-0.0, cid) for cid in sorted(support)]
        heapq.heapify(self.queue)

    def score_of(self, steps: FrozenSet[int]) -> float:
        return sum(self.origin[cid].step_score for cid in sorted(steps))

    def run(self) -> RefutationResult:
        for clause_id, clause in self.clauses.items():
            if clause.is_empty:
                return RefutationResult(ProofStatus.PROVED, Derivation((), 0.0, clause), 0)

        while self.queue:
            _, given = heapq.heappop(self.queue)
            if given in self.retired:
                continue
            if self.clauses[given].is_empty:
                return RefutationResult(ProofStatus.PROVED, self._derivation(given), self.generated)

            partners = sorted(self.processed)
            self.processed.add(given)
            for partner in partners:
                if not self._resolve_pair(given, partner):
                    return self._budget_exhausted()

        logger.debug(f"Search saturated after {self.generated} resolvents")
        return RefutationResult(ProofStatus.SATURATED, None, self.generated)

    def _budget_exhausted(self) -> RefutationResult:
        logger.debug(f"Search budget of {self.config.max_steps} resolvents exhausted")
        return RefutationResult(ProofStatus.BUDGET, None, self.config.max_steps)

    def _resolve_pair(self, given: int, partner: int) -> bool:
        """Queue the resolvents of two clauses; False once the budget is spent"""
        steps = resolve_step(
            self.clauses[given], self.clauses[partner], self.kb, self.config.unify, parent_ids=(given, partner)
        )
        for step in steps:
            self.generated += 1
            if self.generated > self.config.max_steps:
                return False
            if len(step.resolvent) > self.config.max_clause_size or _is_tautology(step.resolvent):
                continue

            ancestry = self.ancestry[given] | self.ancestry[partner]
            score = self.score_of(ancestry) + step.step_score
            key = _canonical_key(step.resolvent)
            existing = self.variants.get(key)
            if existing is not None:
                # Inputs and already processed clauses stay; queued copies yield to better scores
                if existing <= self.input_count or existing in self.processed or score <= self.scores[existing]:
                    continue
                self.retired.add(existing)

            clause_id = self.next_id
            self.next_id += 1
            resolvent = _standardize(step.resolvent, clause_id)
            self.variants[key] = clause_id
            self.clauses[clause_id] = resolvent
            self.origin[clause_id] = ResolutionStep(
                step.parents, step.resolved_literals, step.sigma, resolvent, step.step_score
            )
            self.ancestry[clause_id] = ancestry | {clause_id}
            self.scores[clause_id] = score
            heapq.heappush(self.queue, (-score, clause_id))
        return True

    def _derivation(self, empty_id: int) -> Derivation:
        # Clause ids grow with generation, so id order is a valid step order
        steps = tuple(self.origin[cid] for cid in sorted(self.ancestry[empty_id]))
        total = sum(step.step_score for step in steps)
        return Derivation(steps=steps, total_score=total, final=self.clauses[empty_id])


def refute(clauses: Sequence[Clause], kb: LexKB, config: ProveConfig) -> RefutationResult:
    """
    Search for the empty clause by lexical resolution.

    Clauses are numbered c1..cN in input order; the last one (the negated
    hypothesis) seeds the set of support when the rest are trivially
    satisfiable, otherwise every input clause does.

    Returns:
        RefutationResult with status PROVED, SATURATED or BUDGET
    """
    if not clauses:
        raise ValueError("refute needs at least one clause")
    result = _RefutationSearch(clauses, kb, config).run()
    logger.debug(f"Refutation finished: {result.status.value} after {result.generated} resolvents")
    return result


def render_trace(derivation: Derivation) -> List[str]:
    lines = []
    for number, step in enumerate(derivation.steps, start=1):
        left, right = step.resolved_literals
        lines.append(
            f"step {number}: c{step.parents[0]} x c{step.parents[1]} on {left}~{right} "
            f"sim-score={format_score(step.step_score)} -> {step.resolvent}"
        )
    return lines


def entails_mrm(
    t_forms: Sequence[LogicalForm], h_form: LogicalForm, kb: LexKB, config: Optional[ProveConfig] = None
) -> Verdict:
    """
    Decide T => H by refuting T' together with neg(H').

    Entailed when a refutation exists and its total score exceeds tau_total.
    """
    config = config or ProveConfig()
    t_clauses, negated_h = clausify(t_forms, h_form, link_hypothesis=config.link_hypothesis)
    result = refute(t_clauses + [negated_h], kb, config)

    if result.status is ProofStatus.PROVED:
        score = result.derivation.total_score
        entailed = score > config.tau_total
        reason = "proved" if entailed else "threshold"
    else:
        score = 0.0
        entailed = False
        reason = result.status.value

    logger.info(f"MRM verdict: entailed={entailed} score={format_score(score)} reason={reason}")
    return Verdict(
        method=Method.MRM,
        entailed=entailed,
        score=score,
        threshold=config.tau_total,
        reason=reason,
        thresholds={
            "measure": config.unify.measure.value,
            "tau_step": config.unify.tau_step,
            "tau_atom": config.unify.tau_atom,
            "tau_total": config.tau_total,
            "max_steps": config.max_steps,
        },
        derivation=result.derivation,
    )
