"""
Corpus Processing Service - pair blocks and T/H sources, all in memory
"""
import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from entailment.errors import CorpusFormatError
from entailment.logicform import LogicalForm, derive_logic_form, lf_content_words, parse_annotated, parse_logic_forms
from entailment.lpe import content_words
from entailment.schemas import CorpusPair, DeriveConfig, SourceKind

logger = logging.getLogger(__name__)

_KEY_LINE = re.compile(r"^(id|gold|t-lf|h-lf|t-ann|h-ann)\s*:\s*(.*)$")
_GOLD_VALUES = {"yes": True, "true": True, "no": False, "false": False}

Block = List[Tuple[int, str]]


@dataclass(frozen=True)
class PreparedText:
    """Logic forms of a T or H source together with its content words"""
    forms: Tuple[LogicalForm, ...]
    words: Tuple[str, ...]


class CorpusProcessor:
    """Parse corpus files and turn T/H sources into logic forms and word lists"""

    @staticmethod
    def sniff_kind(text: str) -> SourceKind:
        """Logic-form text always contains '('; annotated token blocks never do"""
        return SourceKind.LOGIC_FORM if "(" in text else SourceKind.ANNOTATED

    @staticmethod
    def prepare(
        text: str, kind: Optional[SourceKind] = None, derive_config: Optional[DeriveConfig] = None
    ) -> PreparedText:
        kind = kind or CorpusProcessor.sniff_kind(text)
        if kind is SourceKind.LOGIC_FORM:
            forms = parse_logic_forms(text)
            words = [word for form in forms for word in lf_content_words(form)]
        else:
            sentences = parse_annotated(text)
            forms = [derive_logic_form(tokens, derive_config) for tokens in sentences]
            words = [word for tokens in sentences for word in content_words(tokens)]
        if not forms:
            raise CorpusFormatError("source contains no sentences")
        return PreparedText(tuple(forms), tuple(words))

    @staticmethod
    def prepare_hypothesis(
        text: str, kind: Optional[SourceKind] = None, derive_config: Optional[DeriveConfig] = None
    ) -> PreparedText:
        prepared = CorpusProcessor.prepare(text, kind, derive_config)
        if len(prepared.forms) != 1:
            raise CorpusFormatError(f"hypothesis must be a single sentence, got {len(prepared.forms)}")
        return prepared

    @staticmethod
    def split_blocks(text: str) -> List[Block]:
        """Blank-line separated blocks of (line number, line); comment lines dropped"""
        blocks: List[Block] = []
        current: Block = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("#"):
                continue
            if not line:
                if current:
                    blocks.append(current)
                    current = []
                continue
            current.append((line_no, line))
        if current:
            blocks.append(current)
        logger.info(f"Corpus split into {len(blocks)} blocks")
        return blocks

    @staticmethod
    def parse_block(block: Block) -> CorpusPair:
        """
        Parse one pair block:
            id: <id>
            gold: yes|no            (optional)
            t-lf: <logic form>      or  t-ann: followed by token lines
            h-lf: <logic form>      or  h-ann: followed by token lines
        """
        fields = {}
        open_field: Optional[str] = None

        for line_no, line in block:
            match = _KEY_LINE.match(line)
            if match:
                key, value = match.groups()
                if key in fields:
                    raise CorpusFormatError(f"line {line_no}: duplicate '{key}' entry")
                if key.endswith("-ann"):
                    if value:
                        raise CorpusFormatError(f"line {line_no}: token lines must follow '{key}:' on new lines")
                    fields[key] = []
                    open_field = key
                else:
                    fields[key] = value
                    open_field = None
            elif open_field is not None:
                fields[open_field].append(line)
            else:
                raise CorpusFormatError(f"line {line_no}: unexpected line '{line}'")

        first_line = block[0][0]
        if not fields.get("id"):
            raise CorpusFormatError(f"line {first_line}: pair block without an id")

        gold = None
        if "gold" in fields:
            gold_text = fields["gold"].lower()
            if gold_text not in _GOLD_VALUES:
                raise CorpusFormatError(f"pair {fields['id']}: gold must be yes or no, got '{fields['gold']}'")
            gold = _GOLD_VALUES[gold_text]

        sides = {}
        for side in ("t", "h"):
            lf_key, ann_key = f"{side}-lf", f"{side}-ann"
            if (lf_key in fields) == (ann_key in fields):
                raise CorpusFormatError(f"pair {fields['id']}: expected exactly one of {lf_key} or {ann_key}")
            if lf_key in fields:
                sides[side] = (fields[lf_key], SourceKind.LOGIC_FORM)
            else:
                sides[side] = ("\n".join(fields[ann_key]), SourceKind.ANNOTATED)

        return CorpusPair(
            id=fields["id"],
            t_source=sides["t"][0],
            t_kind=sides["t"][1],
            h_source=sides["h"][0],
            h_kind=sides["h"][1],
            gold=gold,
        )
