"""
Lexical paths for entailment

A T-word w1 supports an H-word w2 when a directed path of IS_A, ENTAIL
and CAUSE_TO edges leads from a synset of w1 to a synset of w2. T entails
H when more than tau_pairs word pairs are supported.
"""
import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from entailment.lexkb import LexKB, normalize_word
from entailment.schemas import OPEN_CLASS, AnnotatedToken, LpeConfig, Method, SemRelation, Verdict

logger = logging.getLogger(__name__)

IS_A, ENTAIL, CAUSE_TO = SemRelation.IS_A, SemRelation.ENTAIL, SemRelation.CAUSE_TO

_COMPOSITION: Dict[Tuple[SemRelation, SemRelation], SemRelation] = {
    (IS_A, IS_A): IS_A,
    (IS_A, ENTAIL): ENTAIL,
    (ENTAIL, IS_A): ENTAIL,
    (ENTAIL, ENTAIL): ENTAIL,
    (IS_A, CAUSE_TO): CAUSE_TO,
    (CAUSE_TO, IS_A): CAUSE_TO,
    (CAUSE_TO, CAUSE_TO): CAUSE_TO,
    (CAUSE_TO, ENTAIL): ENTAIL,
    (ENTAIL, CAUSE_TO): ENTAIL,
}

_RELATION_LETTER = {IS_A: "I", ENTAIL: "E", CAUSE_TO: "C"}
_PATH_LANGUAGE = re.compile(r"I*E*|[IC]*")

# Pattern automaton: "i" only IS_A so far, "e" IS_A* ENTAIL+, "c" IS_A/CAUSE_TO mix with a CAUSE_TO
_PATTERN_START = "i"
_PATTERN_MOVES = {
    ("i", IS_A): "i",
    ("i", ENTAIL): "e",
    ("i", CAUSE_TO): "c",
    ("e", ENTAIL): "e",
    ("c", IS_A): "c",
    ("c", CAUSE_TO): "c",
}


def compose_relations(r1: SemRelation, r2: SemRelation) -> SemRelation:
    return _COMPOSITION[(r1, r2)]


def matches_lpe_pattern(relations: Iterable[SemRelation]) -> bool:
    """Relation sequence belongs to (IS_A)*(ENTAIL)* | ((IS_A)*(CAUSE_TO)*)*"""
    return _PATH_LANGUAGE.fullmatch("".join(_RELATION_LETTER[r] for r in relations)) is not None


@dataclass(frozen=True)
class LpePath:
    source_word: str
    target_word: str
    synsets: Tuple[str, ...]
    relations: Tuple[SemRelation, ...]

    def __post_init__(self):
        if not self.relations or len(self.relations) != len(self.synsets) - 1:
            raise ValueError("a lexical path needs one relation between each pair of consecutive synsets")

    @property
    def aggregate(self) -> SemRelation:
        return reduce(compose_relations, self.relations)

    @property
    def matches_pattern(self) -> bool:
        return matches_lpe_pattern(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def __str__(self) -> str:
        parts = [self.synsets[0]]
        for relation, synset in zip(self.relations, self.synsets[1:]):
            parts.append(f"-[{relation.value}]-> {synset}")
        return f"{' '.join(parts)} (aggregate={self.aggregate.value})"


@dataclass(frozen=True)
class LpeEvidence:
    """Witness for one supported word pair: paths, or the synset both words share"""
    source_word: str
    target_word: str
    paths: Tuple[LpePath, ...] = ()
    shared_synset: Optional[str] = None


def find_lpe(kb: LexKB, w1: str, w2: str, max_len: int, strict: bool = False) -> Optional[LpePath]:
    """
    Shortest directed path from a synset of w1 to a synset containing w2.

    Breadth-first over (synset, state) where state is the folded aggregate
    relation, or the pattern automaton state when strict.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    source_word, target_word = normalize_word(w1), normalize_word(w2)
    targets = kb.synsets_of(target_word)
    if not targets:
        return None

    Node = Tuple[str, Optional[str]]
    parents: Dict[Node, Tuple[Optional[Node], Optional[SemRelation]]] = {}
    frontier: Deque[Tuple[Node, int]] = deque()
    for synset_id in sorted(kb.synsets_of(source_word)):
        start = (synset_id, _PATTERN_START if strict else None)
        parents[start] = (None, None)
        frontier.append((start, 0))

    while frontier:
        node, length = frontier.popleft()
        if length == max_len:
            continue
        synset_id, state = node
        for edge in kb.edges_from(synset_id):
            if strict:
                next_state = _PATTERN_MOVES.get((state, edge.relation))
                if next_state is None:
                    continue
            else:
                next_state = edge.relation.value if state is None else compose_relations(
                    SemRelation(state), edge.relation
                ).value
            child = (edge.target, next_state)
            if child in parents:
                continue
            parents[child] = (node, edge.relation)
            if edge.target in targets:
                return _unwind(parents, child, source_word, target_word)
            frontier.append((child, length + 1))
    return None


def _unwind(parents, node, source_word: str, target_word: str) -> LpePath:
    synsets: List[str] = []
    relations: List[SemRelation] = []
    while node is not None:
        previous, relation = parents[node]
        synsets.append(node[0])
        if relation is not None:
            relations.append(relation)
        node = previous
    return LpePath(source_word, target_word, tuple(reversed(synsets)), tuple(reversed(relations)))


def find_all_lpe(kb: LexKB, w1: str, w2: str, max_len: int, strict: bool = False) -> List[LpePath]:
    """Every simple directed path of at most max_len edges from w1 to w2, shortest first"""
    source_word, target_word = normalize_word(w1), normalize_word(w2)
    graph = kb.graph
    paths = []
    for source in sorted(kb.synsets_of(source_word)):
        for target in sorted(kb.synsets_of(target_word)):
            if source == target:
                continue
            for edge_path in nx.all_simple_edge_paths(graph, source, target, cutoff=max_len):
                if not edge_path:
                    continue
                synsets = (edge_path[0][0],) + tuple(edge[1] for edge in edge_path)
                relations = tuple(SemRelation(edge[2]) for edge in edge_path)
                if strict and not matches_lpe_pattern(relations):
                    continue
                paths.append(LpePath(source_word, target_word, synsets, relations))
    paths.sort(key=lambda path: (len(path), path.synsets, [r.value for r in path.relations]))
    return paths


def content_words(tokens: Sequence[AnnotatedToken]) -> List[str]:
    """Lemmas of open-class tokens in sentence order"""
    return [token.lemma for token in tokens if token.pos in OPEN_CLASS]


def _pair_evidence(kb: LexKB, w1: str, w2: str, config: LpeConfig) -> Optional[LpeEvidence]:
    if config.count_shared_synsets:
        shared = kb.synsets_of(w1) & kb.synsets_of(w2)
        if shared:
            return LpeEvidence(w1, w2, shared_synset=min(shared))
    if config.all_witnesses:
        paths = tuple(find_all_lpe(kb, w1, w2, config.max_len, config.strict_pattern))
    else:
        path = find_lpe(kb, w1, w2, config.max_len, config.strict_pattern)
        paths = (path,) if path else ()
    return LpeEvidence(w1, w2, paths=paths) if paths else None


def entails_lpe(
    t_words: Sequence[str], h_words: Sequence[str], kb: LexKB, config: Optional[LpeConfig] = None
) -> Verdict:
    """
    Count distinct ordered (T-word, H-word) pairs with a lexical path and
    compare the count against tau_pairs.
    """
    config = config or LpeConfig()
    sources = list(dict.fromkeys(normalize_word(word) for word in t_words))
    targets = list(dict.fromkeys(normalize_word(word) for word in h_words))

    evidence = []
    for w1 in sources:
        for w2 in targets:
            found = _pair_evidence(kb, w1, w2, config)
            if found is not None:
                evidence.append(found)

    count = len(evidence)
    entailed = count > config.tau_pairs
    logger.info(f"LPE verdict: entailed={entailed} pairs={count} of {len(sources) * len(targets)}")
    return Verdict(
        method=Method.LPE,
        entailed=entailed,
        score=float(count),
        threshold=float(config.tau_pairs),
        reason="count",
        thresholds={
            "tau_pairs": config.tau_pairs,
            "max_len": config.max_len,
            "strict_pattern": config.strict_pattern,
        },
        evidence=tuple(evidence),
    )


def render_evidence(evidence: LpeEvidence) -> str:
    head = f"pair {evidence.source_word} -> {evidence.target_word}"
    if evidence.shared_synset is not None:
        return f"{head}: {evidence.shared_synset} (same concept)"
    return "\n".join(f"{head}: {path}" for path in evidence.paths)
