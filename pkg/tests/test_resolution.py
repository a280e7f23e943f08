"""Tests for lexical resolution and MRM entailment."""
import random
import re
from itertools import product

import pytest

from entailment.logicform import Atom, Clause, Literal, Term, clausify, parse_logic_form
from entailment.resolution import entails_mrm, format_score, refute, render_trace, resolve_step
from entailment.schemas import ProofStatus, ProveConfig, SimMeasure, UnifyConfig
from entailment.unification import unify_atoms

GEORGE = ProveConfig(unify=UnifyConfig(tau_step=0.2, tau_atom=0.0, measure=SimMeasure.PATH))
CRISP = ProveConfig(unify=UnifyConfig(tau_step=1.0), max_steps=100000)


def lit(predicate, *args, negated=False):
    terms = tuple(Term.from_text(arg) for arg in args)
    return Literal(Atom(predicate, terms), negated)


def clause(*literals):
    return Clause(tuple(literals))


def truth_table_unsat(clauses, atoms):
    for values in product([False, True], repeat=len(atoms)):
        assignment = dict(zip(atoms, values))
        if all(any(assignment[l.atom] != l.negated for l in c) for c in clauses):
            return False
    return True


class TestResolveStep:
    """Tests for single resolution steps."""

    def test_unit_resolution(self, empty_kb):
        """Classical unit resolution."""
        steps = resolve_step(
            clause(lit("p", "sk1")), clause(lit("p", "x1", negated=True), lit("q", "x1", negated=True)),
            empty_kb, GEORGE.unify,
        )
        assert len(steps) == 1
        assert str(steps[0].resolvent) == "-q(sk1)"
        assert steps[0].step_score == 2.0

    def test_lexical_step(self, kb):
        """Uncle resolves against negated relative."""
        negated_relative = Literal(Atom("relative", (Term.variable("h_x2"),)), negated=True)
        steps = resolve_step(clause(lit("uncle", "sk1", "sk3")), clause(negated_relative), kb, GEORGE.unify)
        assert len(steps) == 1
        assert steps[0].resolvent.is_empty
        assert steps[0].step_score == pytest.approx(1.5)
        assert steps[0].sigma.bindings == {"h_x2": Term.skolem("sk1")}

    def test_no_complementary_pair(self, empty_kb):
        """Unrelated literals give no steps."""
        assert resolve_step(clause(lit("p", "a")), clause(lit("q", "b")), empty_kb, GEORGE.unify) == []

    def test_same_polarity_ignored(self, empty_kb):
        """Two positive literals never resolve."""
        assert resolve_step(clause(lit("p", "a")), clause(lit("p", "a")), empty_kb, GEORGE.unify) == []


class TestRefute:
    """Tests for the refutation search."""

    def test_single_step(self, empty_kb):
        """p(a) and -p(x1) refute in one step."""
        result = refute([clause(lit("p", "a")), clause(lit("p", "x1", negated=True))], empty_kb, GEORGE)
        assert result.status is ProofStatus.PROVED
        assert len(result.derivation.steps) == 1
        assert result.derivation.total_score == 2.0
        assert result.derivation.final.is_empty

    def test_saturated(self, empty_kb):
        """Unrelated clauses saturate."""
        result = refute([clause(lit("p", "a")), clause(lit("q", "b"))], empty_kb, GEORGE)
        assert result.status is ProofStatus.SATURATED
        assert result.derivation is None

    def test_empty_input(self, empty_kb):
        """At least one clause is required."""
        with pytest.raises(ValueError):
            refute([], empty_kb, GEORGE)

    def test_empty_clause_in_input(self, empty_kb):
        """An empty input clause is an immediate refutation."""
        result = refute([clause(lit("p", "a")), Clause()], empty_kb, GEORGE)
        assert result.status is ProofStatus.PROVED
        assert result.derivation.steps == ()

    def test_shared_input_variables_renamed(self, empty_kb):
        """Input clauses sharing variable names are standardized apart."""
        clauses = [
            clause(lit("p", "x1"), lit("q", "x1")),
            clause(lit("p", "x1", negated=True)),
            clause(lit("q", "a", negated=True)),
        ]
        assert refute(clauses, empty_kb, GEORGE).status is ProofStatus.PROVED

    def test_budget(self, kb, george_t, george_h):
        """Exhausting max_steps is reported separately."""
        t_clauses, negated = clausify([george_t], george_h)
        result = refute(t_clauses + [negated], kb, ProveConfig(unify=GEORGE.unify, max_steps=1))
        assert result.status is ProofStatus.BUDGET
        assert result.derivation is None

    def test_crisp_matches_truth_table(self, empty_kb):
        """With tau_step 1, refutation agrees with propositional unsatisfiability."""
        rng = random.Random(2024)
        a, b = Term.word("a"), Term.word("b")
        atoms = [
            Atom("p", (a,)), Atom("p", (a, b)), Atom("p", (b, a)),
            Atom("q", (b,)), Atom("r", (a, a)), Atom("s", (b, a)),
        ]
        for _ in range(500):
            clauses = [
                Clause(tuple(Literal(rng.choice(atoms), rng.random() < 0.5) for _ in range(rng.randint(1, 3))))
                for _ in range(rng.randint(1, 6))
            ]
            result = refute(clauses, empty_kb, CRISP)
            assert result.status is not ProofStatus.BUDGET
            assert (result.status is ProofStatus.PROVED) == truth_table_unsat(clauses, atoms)

    @pytest.mark.parametrize(
        "positive, negative",
        [(("p", "a", "b"), ("p", "b", "a")), (("p", "a", "b"), ("p", "a")), (("us", "a"), ("america", "a"))],
    )
    def test_crisp_distinct_propositions_satisfiable(self, kb, positive, negative):
        """With tau_step 1, different ground atoms do not clash."""
        clauses = [clause(lit(*positive)), clause(lit(*negative, negated=True))]
        assert refute(clauses, kb, CRISP).status is ProofStatus.SATURATED
        assert refute(clauses, kb, GEORGE).status is ProofStatus.PROVED

    def test_best_scored_partner_wins(self, kb):
        """A later, better-scored variant of a resolvent replaces the earlier one."""
        units = [clause(lit("location", "sk1", "sk2")), clause(lit("us", "sk2"))]
        negated = clause(lit("america", "x1", negated=True))
        for ordered in (units, units[::-1]):
            result = refute(ordered + [negated], kb, GEORGE)
            assert result.status is ProofStatus.PROVED
            assert len(result.derivation.steps) == 1
            assert result.derivation.total_score == pytest.approx(2.0)
            assert result.derivation.steps[0].resolved_literals[1].atom.predicate == "us"

    def test_set_of_support_matches_literal_support(self, kb):
        """On clausified sets a refutation exists iff every negated literal unifies with some unit."""
        rng = random.Random(99)
        predicates = ["uncle", "relative", "person", "man", "p"]
        constants = ["us", "america", "george", "sk1", "sk2"]
        for _ in range(300):
            units = [
                Clause((Literal(Atom(rng.choice(predicates), tuple(
                    Term.from_text(rng.choice(constants)) for _ in range(rng.randint(1, 2))
                ))),))
                for _ in range(rng.randint(1, 5))
            ]
            negated = []
            for position in range(rng.randint(1, 4)):
                args = tuple(
                    Term.variable(f"h{position}_x{i}") if rng.random() < 0.6 else Term.from_text(rng.choice(constants))
                    for i in range(rng.randint(1, 2))
                )
                negated.append(Literal(Atom(rng.choice(predicates), args), negated=True))
            negated_clause = Clause(tuple(negated))

            expected = all(
                any(unify_atoms(l.atom, u.literals[0].atom, kb, GEORGE.unify) is not None for u in units)
                for l in negated_clause
            )
            result = refute(units + [negated_clause], kb, GEORGE)
            assert (result.status is ProofStatus.PROVED) == expected

    def test_determinism(self, kb, george_t, george_h):
        """Identical inputs give identical derivations."""
        t_clauses, negated = clausify([george_t], george_h)
        first = refute(t_clauses + [negated], kb, GEORGE)
        second = refute(t_clauses + [negated], kb, GEORGE)
        assert render_trace(first.derivation) == render_trace(second.derivation)


class TestWorkedExample:
    """The George and Mike example end to end."""

    def test_eight_step_refutation(self, kb, george_t, george_h):
        """One resolution step per hypothesis literal."""
        verdict = entails_mrm([george_t], george_h, kb, GEORGE.model_copy(update={"tau_total": 10.0}))
        assert verdict.entailed
        assert verdict.reason == "proved"
        derivation = verdict.derivation
        assert len(derivation.steps) == 8
        assert derivation.final.is_empty
        assert derivation.total_score == pytest.approx(17.75)

    def test_inexact_steps(self, kb, george_t, george_h):
        """Relative/uncle, America/US and came/emigrated are lexical steps."""
        verdict = entails_mrm([george_t], george_h, kb, GEORGE)
        pairs = {
            (step.resolved_literals[0].atom.predicate, step.resolved_literals[1].atom.predicate): step.step_score
            for step in verdict.derivation.steps
        }
        assert pairs[("relative", "uncle")] == pytest.approx(1.5)
        assert pairs[("came", "emigrated")] == pytest.approx(1.25)
        assert pairs[("america", "us")] == pytest.approx(2.0)

    def test_score_additivity(self, kb, george_t, george_h):
        """Total score is the sum of step scores."""
        derivation = entails_mrm([george_t], george_h, kb, GEORGE).derivation
        assert derivation.total_score == sum(step.step_score for step in derivation.steps)

    def test_threshold_flips_once(self, kb, george_t, george_h):
        """Raising tau_total turns the verdict off exactly once."""
        verdicts = [
            entails_mrm([george_t], george_h, kb, GEORGE.model_copy(update={"tau_total": k * 0.25})).entailed
            for k in range(0, 81)
        ]
        flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
        assert verdicts[0] and not verdicts[-1]
        assert flips == 1
        assert verdicts.index(False) == 71

    def test_below_threshold(self, kb, george_t, george_h):
        """A refutation under tau_total is reported as threshold."""
        verdict = entails_mrm([george_t], george_h, kb, GEORGE.model_copy(update={"tau_total": 17.75}))
        assert not verdict.entailed
        assert verdict.reason == "threshold"
        assert verdict.derivation is not None

    def test_linked_hypothesis_saturates(self, kb, george_t, george_h):
        """Sharing hypothesis variables makes the example unprovable."""
        config = GEORGE.model_copy(update={"link_hypothesis": True, "max_steps": 200000})
        verdict = entails_mrm([george_t], george_h, kb, config)
        assert not verdict.entailed
        assert verdict.reason == "saturated"

    def test_trace_format(self, kb, george_t, george_h):
        """Trace lines follow the step format."""
        lines = render_trace(entails_mrm([george_t], george_h, kb, GEORGE).derivation)
        assert len(lines) == 8
        pattern = re.compile(r"^step \d+: c\d+ x c\d+ on -?\S+~-?\S+ sim-score=[0-9.]+ -> .+$")
        assert all(pattern.match(line) for line in lines)
        assert lines[0].startswith("step 1: c13 x c")
        assert lines[-1].endswith("-> []")


class TestEntailsMrm:
    """Tests for the MRM verdict."""

    def test_trivial_pair(self, empty_kb):
        """p(x1) entails p(x2) with score 2."""
        t, h = parse_logic_form("p(x1)"), parse_logic_form("p(x2)")
        verdict = entails_mrm([t], h, empty_kb, ProveConfig(tau_total=1.9))
        assert verdict.entailed
        assert verdict.score == 2.0

    def test_trivial_pair_over_threshold(self, empty_kb):
        """Score 2 does not pass tau_total 5."""
        t, h = parse_logic_form("p(x1)"), parse_logic_form("p(x2)")
        verdict = entails_mrm([t], h, empty_kb, ProveConfig(tau_total=5))
        assert not verdict.entailed
        assert verdict.reason == "threshold"

    def test_not_entailed(self, empty_kb):
        """Unrelated hypothesis saturates."""
        verdict = entails_mrm([parse_logic_form("p(x1)")], parse_logic_form("q(x1)"), empty_kb)
        assert not verdict.entailed
        assert verdict.reason == "saturated"
        assert verdict.score == 0.0

    def test_thresholds_echoed(self, empty_kb):
        """Configuration is echoed into the verdict."""
        verdict = entails_mrm([parse_logic_form("p(x1)")], parse_logic_form("p(x1)"), empty_kb, GEORGE)
        assert verdict.thresholds["tau_step"] == 0.2
        assert verdict.thresholds["measure"] == "path"


class TestFormatScore:
    """Tests for score formatting."""

    @pytest.mark.parametrize("value, text", [(0.5, "0.5"), (1.0, "1.0"), (17.75, "17.75"), (0.0, "0.0"), (1 / 3, "0.333333")])
    def test_format(self, value, text):
        """Trailing zeros are trimmed but one decimal stays."""
        assert format_score(value) == text
