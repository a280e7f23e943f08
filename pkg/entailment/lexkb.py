"""
Lexical Knowledge Base

An immutable WordNet-style graph of synsets joined by IS_A, ENTAIL and
CAUSE_TO edges, with word similarity computed over the IS_A taxonomy of
each part of speech.
"""
import logging
import math
from collections import defaultdict
from itertools import product
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, TextIO, Tuple, Union

import networkx as nx
from pydantic import ValidationError

from entailment.errors import KBParseError, KBValidationError, UnknownSynsetError
from entailment.schemas import KBStats, Pos, SemEdge, SemRelation, SimMeasure, Synset

logger = logging.getLogger(__name__)

_POS_CODES = {pos.value: pos for pos in Pos}
_RELATION_CODES = {relation.value: relation for relation in SemRelation}


def _edge_key(edge: SemEdge) -> Tuple[str, str, str]:
    return (edge.source, edge.relation.value, edge.target)


def normalize_word(word: str) -> str:
    """Lowercase a word and join multiword expressions with underscores"""
    return "_".join(word.strip().lower().split())


class LexKB:
    """Read-only semantic graph; safe to share between threads once built"""

    def __init__(self, synsets: Iterable[Synset], edges: Iterable[SemEdge]):
        self._synsets: Dict[str, Synset] = {}
        for synset in synsets:
            if synset.id in self._synsets:
                raise KBValidationError(f"duplicate synset id: {synset.id}")
            self._synsets[synset.id] = synset

        self._edges: Tuple[SemEdge, ...] = tuple(sorted(set(edges), key=_edge_key))
        self._validate_edges()

        self._graph = nx.MultiDiGraph()
        self._graph.add_nodes_from(sorted(self._synsets))
        for edge in self._edges:
            self._graph.add_edge(edge.source, edge.target, key=edge.relation.value, relation=edge.relation)
        self._check_acyclic()

        lemma_index: Dict[Tuple[str, Pos], set] = defaultdict(set)
        for synset in self._synsets.values():
            for lemma in synset.lemmas:
                lemma_index[(lemma, synset.pos)].add(synset.id)
        self._lemma_index = {key: frozenset(ids) for key, ids in lemma_index.items()}

        outgoing: Dict[str, List[SemEdge]] = defaultdict(list)
        for edge in self._edges:
            outgoing[edge.source].append(edge)
        self._outgoing = {source: tuple(edges) for source, edges in outgoing.items()}

        # IS_A edges point from hyponym to hypernym
        self._isa = nx.DiGraph()
        self._isa.add_nodes_from(self._synsets)
        self._isa.add_edges_from(
            (edge.source, edge.target) for edge in self._edges if edge.relation is SemRelation.IS_A
        )
        self._taxonomies: Dict[Pos, nx.Graph] = {}
        for pos in Pos:
            nodes = [sid for sid, synset in self._synsets.items() if synset.pos is pos]
            self._taxonomies[pos] = self._isa.subgraph(nodes).to_undirected(as_view=False)

        self._depths = self._compute_depths()
        self._max_depth = {
            pos: max((self._depths[sid] for sid in graph.nodes), default=0)
            for pos, graph in self._taxonomies.items()
        }
        self._ancestors: Dict[str, FrozenSet[str]] = {}
        self._similarity_cache: Dict[Tuple[str, str, SimMeasure, Optional[Pos]], float] = {}

    # ------------------------------------------------------------------
    # Construction helpers
    # ------------------------------------------------------------------

    def _validate_edges(self) -> None:
        for edge in self._edges:
            for endpoint in (edge.source, edge.target):
                if endpoint not in self._synsets:
                    raise KBValidationError(
                        f"edge {edge.relation.value} {edge.source} {edge.target} references unknown synset {endpoint}"
                    )
            source_pos = self._synsets[edge.source].pos
            target_pos = self._synsets[edge.target].pos
            if edge.relation is SemRelation.IS_A:
                if source_pos is not target_pos:
                    raise KBValidationError(
                        f"isa edge {edge.source} -> {edge.target} joins different parts of speech"
                    )
            elif source_pos is not Pos.VERB or target_pos is not Pos.VERB:
                raise KBValidationError(
                    f"{edge.relation.value} edge {edge.source} -> {edge.target} must connect verb synsets"
                )

    def _check_acyclic(self) -> None:
        if nx.is_directed_acyclic_graph(self._graph):
            return
        cycle = nx.find_cycle(self._graph)
        rendered = " -> ".join([cycle[0][0]] + [step[1] for step in cycle])
        raise KBValidationError(f"relation cycle: {rendered}")

    def _compute_depths(self) -> Dict[str, int]:
        # Longest hypernym chain; parents come after children in topological order
        depths: Dict[str, int] = {}
        for sid in reversed(list(nx.topological_sort(self._isa))):
            parents = list(self._isa.successors(sid))
            depths[sid] = 1 + max((depths[parent] for parent in parents), default=0)
        return depths

    def with_edges(self, extra: Iterable[SemEdge]) -> "LexKB":
        """New validated KB with additional edges"""
        return LexKB(self._synsets.values(), self._edges + tuple(extra))

    # ------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------

    @property
    def synsets(self) -> Mapping[str, Synset]:
        return MappingProxyType(self._synsets)

    @property
    def edges(self) -> Tuple[SemEdge, ...]:
        return self._edges

    @property
    def graph(self) -> nx.MultiDiGraph:
        """Read-only view of the relation graph, edges keyed by relation code"""
        return self._graph.copy(as_view=True)

    def synset(self, synset_id: str) -> Synset:
        try:
            return self._synsets[synset_id]
        except KeyError:
            raise UnknownSynsetError(synset_id) from None

    def synsets_of(self, lemma: str, pos: Optional[Pos] = None) -> FrozenSet[str]:
        """All synsets listing lemma, optionally restricted to one POS; empty when unknown"""
        word = normalize_word(lemma)
        if pos is not None:
            return self._lemma_index.get((word, pos), frozenset())
        found: set = set()
        for each_pos in Pos:
            found |= self._lemma_index.get((word, each_pos), frozenset())
        return frozenset(found)

    def contains_word(self, lemma: str) -> bool:
        return bool(self.synsets_of(lemma))

    def edges_from(self, synset_id: str) -> Tuple[SemEdge, ...]:
        self.synset(synset_id)
        return self._outgoing.get(synset_id, ())

    def depth(self, synset_id: str) -> int:
        self.synset(synset_id)
        return self._depths[synset_id]

    def max_depth(self, pos: Pos) -> int:
        return self._max_depth[pos]

    def ancestors(self, synset_id: str) -> FrozenSet[str]:
        """IS_A ancestors of a synset, the synset itself included"""
        self.synset(synset_id)
        if synset_id not in self._ancestors:
            self._ancestors[synset_id] = frozenset(nx.descendants(self._isa, synset_id)) | {synset_id}
        return self._ancestors[synset_id]

    def lowest_common_subsumer(self, s1: str, s2: str) -> Optional[str]:
        if self.synset(s1).pos is not self.synset(s2).pos:
            return None
        common = sorted(self.ancestors(s1) & self.ancestors(s2))
        if not common:
            return None
        return max(common, key=lambda sid: self._depths[sid])

    def isa_path_length(self, s1: str, s2: str) -> Optional[int]:
        """Edge count of the shortest undirected IS_A path; None when disconnected"""
        pos = self.synset(s1).pos
        if self.synset(s2).pos is not pos:
            return None
        if s1 == s2:
            return 0
        try:
            return nx.shortest_path_length(self._taxonomies[pos], s1, s2)
        except nx.NetworkXNoPath:
            return None

    # ------------------------------------------------------------------
    # Similarity
    # ------------------------------------------------------------------

    def synset_similarity(self, s1: str, s2: str, measure: SimMeasure) -> float:
        pos = self.synset(s1).pos
        if self.synset(s2).pos is not pos:
            return 0.0

        if measure is SimMeasure.WUP:
            lcs = self.lowest_common_subsumer(s1, s2)
            if lcs is None:
                return 0.0
            return 2.0 * self._depths[lcs] / (self._depths[s1] + self._depths[s2])

        length = self.isa_path_length(s1, s2)
        if length is None:
            return 0.0
        if measure is SimMeasure.PATH:
            return 1.0 / (1.0 + length)

        # LCH, normalized by its maximum ln(2D)
        scale = 2.0 * self._max_depth[pos]
        score = math.log(scale / (length + 1)) / math.log(scale)
        return min(1.0, max(0.0, score))

    def similarity(self, w1: str, w2: str, measure: SimMeasure, pos: Optional[Pos] = None) -> float:
        """Best score over same-POS synset pairs; 1.0 for shared synsets, 0.0 for unknown words"""
        first, second = sorted((normalize_word(w1), normalize_word(w2)))
        key = (first, second, measure, pos)
        cached = self._similarity_cache.get(key)
        if cached is not None:
            return cached

        left = self.synsets_of(first, pos)
        right = self.synsets_of(second, pos)
        if not left or not right:
            score = 0.0
        elif left & right:
            score = 1.0
        else:
            score = max(
                (self.synset_similarity(a, b, measure) for a, b in product(sorted(left), sorted(right))),
                default=0.0,
            )
        self._similarity_cache[key] = score
        return score

    def stats(self) -> KBStats:
        by_pos = {pos.name.lower(): 0 for pos in Pos}
        for synset in self._synsets.values():
            by_pos[synset.pos.name.lower()] += 1
        by_relation = {relation.value: 0 for relation in SemRelation}
        for edge in self._edges:
            by_relation[edge.relation.value] += 1
        return KBStats(
            synsets=len(self._synsets),
            edges=len(self._edges),
            synsets_by_pos=by_pos,
            edges_by_relation=by_relation,
            max_depth={pos.name.lower(): depth for pos, depth in self._max_depth.items()},
        )


def load_kb(source: Union[TextIO, str]) -> LexKB:
    """
    Parse and validate a knowledge base.

    Records, one per line, '#' starting a comment:
        s <id> <n|v|a|r> <lemma1,lemma2,...>
        r <isa|entail|cause> <from-id> <to-id>

    Args:
        source: open text stream or the file contents as a string

    Returns:
        Validated LexKB
    """
    lines = source.splitlines() if isinstance(source, str) else source
    synsets: Dict[str, Synset] = {}
    edges: List[SemEdge] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]

        if kind == "s":
            if len(fields) != 4:
                raise KBParseError(line_no, f"synset record needs 4 fields, got {len(fields)}")
            _, synset_id, pos_code, lemma_field = fields
            if pos_code not in _POS_CODES:
                raise KBParseError(line_no, f"unknown part of speech '{pos_code}'")
            if synset_id in synsets:
                raise KBParseError(line_no, f"duplicate synset id '{synset_id}'")
            try:
                synsets[synset_id] = Synset(
                    id=synset_id, pos=_POS_CODES[pos_code], lemmas=tuple(lemma_field.split(","))
                )
            except ValidationError as e:
                raise KBParseError(line_no, f"invalid synset '{synset_id}': {e.errors()[0]['msg']}") from None

        elif kind == "r":
            if len(fields) != 4:
                raise KBParseError(line_no, f"relation record needs 4 fields, got {len(fields)}")
            _, relation_code, source_id, target_id = fields
            if relation_code not in _RELATION_CODES:
                raise KBParseError(line_no, f"unknown relation '{relation_code}'")
            edges.append(SemEdge(source=source_id, relation=_RELATION_CODES[relation_code], target=target_id))

        else:
            raise KBParseError(line_no, f"unknown record kind '{kind}'")

    kb = LexKB(synsets.values(), edges)
    logger.info(f"Loaded KB: {len(kb.synsets)} synsets, {len(kb.edges)} edges")
    return kb
