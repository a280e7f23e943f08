"""Tests for lexical paths for entailment."""
from functools import reduce
from itertools import product

import pytest
from pydantic import ValidationError

from entailment.lexkb import load_kb
from entailment.logicform import Clause, lf_content_words
from entailment.lpe import (
    LpeEvidence, compose_relations, content_words, entails_lpe, find_all_lpe, find_lpe,
    matches_lpe_pattern, render_evidence,
)
from entailment.resolution import Derivation
from entailment.schemas import AnnotatedToken, LpeConfig, Method, SemEdge, SemRelation, TokenPos, Verdict

IS_A, ENTAIL, CAUSE_TO = SemRelation.IS_A, SemRelation.ENTAIL, SemRelation.CAUSE_TO


def _all_words(kb):
    return sorted({lemma for synset in kb.synsets.values() for lemma in synset.lemmas})


class TestComposition:
    """Tests for relation composition."""

    @pytest.mark.parametrize(
        "r1, r2, expected",
        [
            (IS_A, IS_A, IS_A),
            (IS_A, ENTAIL, ENTAIL),
            (ENTAIL, IS_A, ENTAIL),
            (ENTAIL, ENTAIL, ENTAIL),
            (IS_A, CAUSE_TO, CAUSE_TO),
            (CAUSE_TO, IS_A, CAUSE_TO),
            (CAUSE_TO, CAUSE_TO, CAUSE_TO),
            (CAUSE_TO, ENTAIL, ENTAIL),
            (ENTAIL, CAUSE_TO, ENTAIL),
        ],
    )
    def test_rules(self, r1, r2, expected):
        """Each composition rule holds."""
        assert compose_relations(r1, r2) is expected

    def test_is_max(self):
        """Composition is the max under IS_A < CAUSE_TO < ENTAIL."""
        for r1, r2 in product(SemRelation, repeat=2):
            assert compose_relations(r1, r2) is max(r1, r2, key=lambda r: r.rank)

    def test_fold_order_independent(self):
        """Left and right folds agree on every triple."""
        for r1, r2, r3 in product(SemRelation, repeat=3):
            left = compose_relations(compose_relations(r1, r2), r3)
            right = compose_relations(r1, compose_relations(r2, r3))
            assert left is right


class TestPattern:
    """Tests for the path-language recognizer."""

    @pytest.mark.parametrize(
        "relations, accepted",
        [
            ([], True),
            ([IS_A, IS_A, ENTAIL], True),
            ([ENTAIL, ENTAIL], True),
            ([ENTAIL, IS_A], False),
            ([IS_A, CAUSE_TO, IS_A, CAUSE_TO], True),
            ([CAUSE_TO, ENTAIL], False),
            ([IS_A, ENTAIL, CAUSE_TO], False),
        ],
    )
    def test_recognizer(self, relations, accepted):
        """Relation sequences are accepted or rejected."""
        assert matches_lpe_pattern(relations) is accepted


class TestFindLpe:
    """Tests for path search."""

    def test_snore_sleep(self, kb):
        """A single ENTAIL edge."""
        path = find_lpe(kb, "snore", "sleep", 6)
        assert path.synsets == ("v5", "v6")
        assert path.aggregate is ENTAIL

    def test_murder_die(self, kb):
        """IS_A then CAUSE_TO composes to CAUSE_TO."""
        path = find_lpe(kb, "murder", "die", 6)
        assert path.synsets == ("v9", "v7", "v8")
        assert path.relations == (IS_A, CAUSE_TO)
        assert path.aggregate is CAUSE_TO

    def test_uncle_relative(self, kb):
        """Hyponym to hypernym."""
        path = find_lpe(kb, "uncle", "relative", 6)
        assert path.synsets == ("n3", "n2")
        assert path.aggregate is IS_A

    def test_orientation(self, kb):
        """IS_A edges only lead upward."""
        assert find_lpe(kb, "relative", "uncle", 6) is None
        assert find_lpe(kb, "sleep", "snore", 6) is None

    def test_max_len(self, kb):
        """Paths longer than max_len are not found."""
        assert find_lpe(kb, "murder", "die", 1) is None
        assert find_lpe(kb, "uncle", "person", 1) is None
        assert find_lpe(kb, "uncle", "person", 2) is not None

    def test_unknown_words(self, kb):
        """Words outside the KB have no paths."""
        assert find_lpe(kb, "george", "person", 6) is None
        assert find_lpe(kb, "uncle", "george", 6) is None

    def test_every_path_matches_pattern(self, kb):
        """All paths found on the fixture are in the path language."""
        for w1, w2 in product(_all_words(kb), repeat=2):
            path = find_lpe(kb, w1, w2, 6)
            if path is not None:
                assert path.matches_pattern
                assert path.aggregate is reduce(compose_relations, path.relations)

    def test_transitivity(self, kb):
        """Chained paths imply a path within the combined length."""
        words = _all_words(kb)
        for a, b, c in product(words, repeat=3):
            first, second = find_lpe(kb, a, b, 3), find_lpe(kb, b, c, 3)
            if first is not None and second is not None:
                assert find_lpe(kb, a, c, 6) is not None

    def test_strict_pattern(self):
        """Strict mode rejects ENTAIL after CAUSE_TO."""
        kb = load_kb("s v1 v kill\ns v2 v die\ns v3 v stop\nr cause v1 v2\nr entail v2 v3\n")
        path = find_lpe(kb, "kill", "stop", 6)
        assert path.aggregate is ENTAIL
        assert not path.matches_pattern
        assert find_lpe(kb, "kill", "stop", 6, strict=True) is None
        assert find_lpe(kb, "kill", "die", 6, strict=True) is not None

    def test_find_all(self):
        """All simple paths, shortest first."""
        kb = load_kb(
            "s a n alpha\ns b n beta\ns c n gamma\ns d n delta\n"
            "r isa a b\nr isa b d\nr isa a c\nr isa c d\nr isa a d\n"
        )
        paths = find_all_lpe(kb, "alpha", "delta", 6)
        assert [p.synsets for p in paths] == [("a", "d"), ("a", "b", "d"), ("a", "c", "d")]
        assert [p.synsets for p in find_all_lpe(kb, "alpha", "delta", 1)] == [("a", "d")]


class TestContentWords:
    """Tests for open-class word extraction."""

    def test_filters_closed_class(self):
        """Only nouns, verbs, adjectives and adverbs remain."""
        tokens = [
            AnnotatedToken(index=1, lemma="george", pos=TokenPos.NOUN),
            AnnotatedToken(index=2, lemma="the", pos=TokenPos.ART),
            AnnotatedToken(index=3, lemma="come", pos=TokenPos.VERB),
        ]
        assert content_words(tokens) == ["george", "come"]

    def test_articles_only(self):
        """No content words in a closed-class list."""
        assert content_words([AnnotatedToken(index=1, lemma="the", pos=TokenPos.ART)]) == []


class TestEntailsLpe:
    """Tests for the LPE verdict."""

    def test_snore_sleep(self, kb):
        """One supported pair passes tau_pairs 0."""
        verdict = entails_lpe(["snore"], ["sleep"], kb, LpeConfig(tau_pairs=0))
        assert verdict.entailed
        assert verdict.score == 1

    def test_orientation(self, kb):
        """Reversed words are not supported."""
        verdict = entails_lpe(["sleep"], ["snore"], kb, LpeConfig(tau_pairs=0))
        assert not verdict.entailed
        assert verdict.score == 0

    def test_george_words(self, kb, george_t, george_h):
        """Uncle/relative and US/America support the hypothesis."""
        verdict = entails_lpe(lf_content_words(george_t), lf_content_words(george_h), kb, LpeConfig(tau_pairs=1))
        assert verdict.entailed
        assert verdict.score == 2
        pairs = {(e.source_word, e.target_word) for e in verdict.evidence}
        assert pairs == {("uncle", "relative"), ("us", "america")}

    def test_george_reversed(self, kb, george_t, george_h):
        """Swapping T and H loses the uncle/relative pair."""
        verdict = entails_lpe(lf_content_words(george_h), lf_content_words(george_t), kb, LpeConfig(tau_pairs=1))
        assert not verdict.entailed
        assert {(e.source_word, e.target_word) for e in verdict.evidence} == {("america", "us")}

    def test_shared_synsets_optional(self, kb):
        """Synonym pairs are not credited when disabled."""
        config = LpeConfig(count_shared_synsets=False)
        assert entails_lpe(["us"], ["america"], kb, config).score == 0
        assert entails_lpe(["us"], ["america"], kb).score == 1

    def test_duplicates_counted_once(self, kb):
        """Pairs are distinct ordered word pairs."""
        assert entails_lpe(["uncle", "uncle"], ["relative", "person"], kb).score == 2

    def test_monotone_under_edge_addition(self, kb):
        """Adding edges never lowers the count."""
        t_words, h_words = ["come", "murder", "man"], ["travel", "die", "relative", "person"]
        before = entails_lpe(t_words, h_words, kb).score
        bigger = kb.with_edges([SemEdge(source="n6", relation=IS_A, target="n2")])
        after = entails_lpe(t_words, h_words, bigger).score
        assert after >= before
        assert after == before + 1

    def test_threshold_flips_once(self, kb):
        """Raising tau_pairs turns the verdict off exactly once."""
        verdicts = [entails_lpe(["murder", "uncle", "us"], ["die", "relative", "america"], kb, LpeConfig(tau_pairs=k)).entailed for k in range(6)]
        assert verdicts == [True, True, True, False, False, False]

    def test_all_witnesses(self):
        """All-witness mode keeps every path."""
        kb = load_kb("s a n alpha\ns b n beta\ns d n delta\nr isa a b\nr isa b d\nr isa a d\n")
        verdict = entails_lpe(["alpha"], ["delta"], kb, LpeConfig(all_witnesses=True))
        assert len(verdict.evidence[0].paths) == 2


class TestRenderEvidence:
    """Tests for evidence lines."""

    def test_path(self, kb):
        """Paths render edge by edge with the aggregate."""
        evidence = entails_lpe(["murder"], ["die"], kb).evidence[0]
        assert render_evidence(evidence) == "pair murder -> die: v9 -[isa]-> v7 -[cause]-> v8 (aggregate=cause)"

    def test_same_concept(self):
        """Shared synsets render as the same concept."""
        evidence = LpeEvidence("us", "america", shared_synset="n5")
        assert render_evidence(evidence) == "pair us -> america: n5 (same concept)"


class TestVerdictEvidence:
    """Tests for the evidence carried by verdicts."""

    def _verdict(self, method, **kwargs):
        return Verdict(method=method, entailed=True, score=1.0, threshold=0.0, reason="count", **kwargs)

    def test_lpe_witnesses_accepted(self, kb):
        """LPE verdicts hold LpeEvidence items."""
        verdict = entails_lpe(["snore"], ["sleep"], kb)
        assert all(isinstance(item, LpeEvidence) for item in verdict.evidence)
        assert verdict.derivation is None

    def test_mrm_derivation_accepted(self):
        """MRM verdicts hold a Derivation."""
        derivation = Derivation(steps=(), total_score=0.0, final=Clause())
        assert self._verdict(Method.MRM, derivation=derivation).derivation is derivation

    @pytest.mark.parametrize("method, kwargs", [
        (Method.LPE, {"evidence": ("pair us -> america",)}),
        (Method.MRM, {"evidence": (LpeEvidence("us", "america", shared_synset="n5"),)}),
        (Method.MRM, {"derivation": {"steps": []}}),
        (Method.LPE, {"derivation": Derivation(steps=(), total_score=0.0, final=Clause())}),
    ])
    def test_mismatched_evidence_rejected(self, method, kwargs):
        """Evidence of the wrong type or for the other method fails validation."""
        with pytest.raises(ValidationError):
            self._verdict(method, **kwargs)
