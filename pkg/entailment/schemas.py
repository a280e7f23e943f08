from pydantic import BaseModel, Field, ConfigDict, field_validator, model_validator
from typing import Dict, Any, Optional, List, Tuple
from enum import Enum


class Pos(str, Enum):
    NOUN = "n"
    VERB = "v"
    ADJ = "a"
    ADV = "r"


class SemRelation(str, Enum):
    IS_A = "isa"
    ENTAIL = "entail"
    CAUSE_TO = "cause"

    @property
    def rank(self) -> int:
        """Position in the total order IS_A < CAUSE_TO < ENTAIL"""
        return _RELATION_RANK[self]


_RELATION_RANK = {SemRelation.IS_A: 0, SemRelation.CAUSE_TO: 1, SemRelation.ENTAIL: 2}


class SimMeasure(str, Enum):
    PATH = "path"
    WUP = "wup"
    LCH = "lch"


# ============================================================================
# Knowledge Base Schemas
# ============================================================================

class Synset(BaseModel):
    """A concept: synonymous lemmas sharing one part of speech"""
    model_config = ConfigDict(extra='forbid', frozen=True)
    id: str = Field(..., min_length=1, description="Opaque synset identifier, e.g. n3")
    pos: Pos = Field(..., description="Part of speech shared by every lemma")
    lemmas: Tuple[str, ...] = Field(..., description="Lowercase lemmas, order as listed in the source")

    @field_validator("lemmas")
    @classmethod
    def _normalize_lemmas(cls, lemmas: Tuple[str, ...]) -> Tuple[str, ...]:
        cleaned = tuple(dict.fromkeys(lemma.strip().lower() for lemma in lemmas if lemma.strip()))
        if not cleaned:
            raise ValueError("synset needs at least one lemma")
        return cleaned


class SemEdge(BaseModel):
    """Directed semantic relation between two synsets"""
    model_config = ConfigDict(extra='forbid', frozen=True)
    source: str
    relation: SemRelation
    target: str


class KBStats(BaseModel):
    model_config = ConfigDict(extra='forbid')
    synsets: int
    edges: int
    synsets_by_pos: Dict[str, int]
    edges_by_relation: Dict[str, int]
    max_depth: Dict[str, int] = Field(..., description="Deepest IS_A level per POS, roots at depth 1")


# ============================================================================
# Annotated Sentence Schemas
# ============================================================================

class TokenPos(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJ = "adj"
    ADV = "adv"
    PREP = "prep"
    CONJ = "conj"
    ART = "art"
    OTHER = "other"


OPEN_CLASS = frozenset({TokenPos.NOUN, TokenPos.VERB, TokenPos.ADJ, TokenPos.ADV})


class Role(str, Enum):
    SUBJ = "subj"
    DOBJ = "dobj"
    IOBJ = "iobj"
    NONE = "none"


class Transitivity(str, Enum):
    INTRANS = "intrans"
    TRANS = "trans"
    DITRANS = "ditrans"


class AnnotatedToken(BaseModel):
    """One token of a POS-tagged, dependency-annotated sentence"""
    model_config = ConfigDict(extra='forbid', frozen=True)
    index: int = Field(..., ge=1, description="1-based position in the sentence")
    lemma: str = Field(..., min_length=1)
    pos: TokenPos
    role: Role = Field(default=Role.NONE, description="Grammatical role relative to the head verb")
    head: Optional[int] = Field(default=None, description="Modified token, or governing verb for role-bearing tokens")
    transitivity: Optional[Transitivity] = Field(default=None, description="Verb frame; verbs only")

    @field_validator("lemma")
    @classmethod
    def _lower_lemma(cls, lemma: str) -> str:
        return lemma.strip().lower()


class VerbStyle(str, Enum):
    EVENT = "event"
    ARGUMENTS = "arguments"


class DeriveConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')
    verb_style: VerbStyle = Field(
        default=VerbStyle.EVENT,
        description="event: verb(e) with the subject carried by Agent; arguments: verb(e, subj, dobj, iobj) plus Agent",
    )


# ============================================================================
# Engine Configuration Schemas
# ============================================================================

class UnifyConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')
    tau_step: float = Field(default=0.2, ge=0.0, le=1.0, description="Threshold for each similarity comparison")
    tau_atom: float = Field(default=0.0, ge=0.0, description="Atom-level score W must exceed this")
    measure: SimMeasure = Field(default=SimMeasure.PATH, description="Word similarity measure")


class ProveConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')
    unify: UnifyConfig = Field(default_factory=UnifyConfig)
    tau_total: float = Field(default=0.0, ge=0.0, description="Derivation score must exceed this")
    max_steps: int = Field(default=10000, ge=1, description="Budget of generated resolvents")
    max_clause_size: int = Field(default=32, ge=1, description="Resolvents with more literals are dropped")
    link_hypothesis: bool = Field(
        default=False,
        description="Share hypothesis variables across the negated clause instead of standardizing them per literal",
    )


class LpeConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')
    tau_pairs: int = Field(default=0, ge=0, description="Pair count must exceed this")
    max_len: int = Field(default=6, ge=1, description="Maximum edges in a lexical path")
    count_shared_synsets: bool = Field(default=True, description="Credit word pairs sharing a synset")
    all_witnesses: bool = Field(default=False, description="Report every simple path, not only the shortest")
    strict_pattern: bool = Field(default=False, description="Only accept paths matching the LPE path language")


# ============================================================================
# Verdict Schemas
# ============================================================================

class Method(str, Enum):
    MRM = "mrm"
    LPE = "lpe"


class ProofStatus(str, Enum):
    PROVED = "proved"
    SATURATED = "saturated"
    BUDGET = "budget"


class Verdict(BaseModel):
    """Entailment decision of one method for one (T, H) pair"""
    model_config = ConfigDict(extra='forbid', frozen=True)
    method: Method
    entailed: bool
    score: float = Field(..., description="MRM: derivation score; LPE: witnessed pair count")
    threshold: float = Field(..., description="Governing threshold the score must exceed")
    reason: str = Field(..., description="proved, threshold, saturated, budget or count")
    thresholds: Dict[str, Any] = Field(default_factory=dict, description="Configuration echoed into reports")
    derivation: Optional[Any] = Field(default=None, description="entailment.resolution.Derivation, MRM only")
    evidence: Tuple[Any, ...] = Field(default=(), description="entailment.lpe.LpeEvidence witnesses, LPE only")

    @model_validator(mode="after")
    def _evidence_matches_method(self) -> "Verdict":
        # Both modules import this one, so the checks resolve their types lazily
        from entailment.lpe import LpeEvidence
        from entailment.resolution import Derivation

        if self.derivation is not None:
            if self.method is not Method.MRM:
                raise ValueError("only MRM verdicts carry a derivation")
            if not isinstance(self.derivation, Derivation):
                raise ValueError(f"derivation must be a Derivation, got {type(self.derivation).__name__}")
        if self.evidence:
            if self.method is not Method.LPE:
                raise ValueError("only LPE verdicts carry witness pairs")
            for item in self.evidence:
                if not isinstance(item, LpeEvidence):
                    raise ValueError(f"evidence items must be LpeEvidence, got {type(item).__name__}")
        return self


# ============================================================================
# Corpus Evaluation Schemas
# ============================================================================

class SourceKind(str, Enum):
    LOGIC_FORM = "lf"
    ANNOTATED = "ann"


class CorpusPair(BaseModel):
    model_config = ConfigDict(extra='forbid')
    id: str = Field(..., min_length=1)
    t_source: str
    t_kind: SourceKind
    h_source: str
    h_kind: SourceKind
    gold: Optional[bool] = Field(default=None, description="Gold entailment label when present")


class EvalRow(BaseModel):
    model_config = ConfigDict(extra='forbid')
    id: str
    gold: Optional[bool] = None
    skipped: bool = False
    error: Optional[str] = None
    mrm_entailed: Optional[bool] = None
    mrm_score: Optional[float] = None
    mrm_status: Optional[ProofStatus] = None
    lpe_entailed: Optional[bool] = None
    lpe_count: Optional[int] = None


class SweepRow(BaseModel):
    model_config = ConfigDict(extra='forbid')
    parameter: str
    value: float
    mrm_entailed: int
    lpe_entailed: int
    mrm_accuracy: Optional[float] = None
    lpe_accuracy: Optional[float] = None
    agreement: Optional[float] = None


class EvalReport(BaseModel):
    model_config = ConfigDict(extra='forbid')
    rows: List[EvalRow]
    pairs: int
    skipped: int
    mrm_accuracy: Optional[float] = None
    lpe_accuracy: Optional[float] = None
    agreement: Optional[float] = Field(default=None, description="Fraction of evaluated pairs where both methods agree")
    sweep: List[SweepRow] = Field(default_factory=list)
