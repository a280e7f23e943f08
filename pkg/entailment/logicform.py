"""
Logic forms: terms, atoms, clauses, the textual logic-form syntax,
derivation of logic forms from annotated sentences, and clausification
of a (T, H) pair for refutation.
"""
import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from itertools import count
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from entailment.errors import AnnotationFormatError, DerivationError, LogicFormSyntaxError
from entailment.schemas import (
    AnnotatedToken, DeriveConfig, Role, TokenPos, Transitivity, VerbStyle,
)

logger = logging.getLogger(__name__)

VARIABLE_PATTERN = re.compile(r"[xe][0-9]+")
SKOLEM_PATTERN = re.compile(r"sk([0-9]+)")
ROLE_PREDICATES = frozenset({"agent", "location", "time"})
AGENT = "agent"


class TermKind(str, Enum):
    VARIABLE = "variable"
    WORD_CONST = "word"
    SKOLEM_CONST = "skolem"


@dataclass(frozen=True)
class Term:
    kind: TermKind
    name: str

    @classmethod
    def variable(cls, name: str) -> "Term":
        return cls(TermKind.VARIABLE, name)

    @classmethod
    def word(cls, name: str) -> "Term":
        return cls(TermKind.WORD_CONST, name)

    @classmethod
    def skolem(cls, name: str) -> "Term":
        return cls(TermKind.SKOLEM_CONST, name)

    @classmethod
    def from_text(cls, text: str) -> "Term":
        """Classify a term by its spelling: x1/e1 variables, sk1 skolems, anything else a word"""
        name = text.lower()
        if VARIABLE_PATTERN.fullmatch(name):
            return cls.variable(name)
        if SKOLEM_PATTERN.fullmatch(name):
            return cls.skolem(name)
        return cls.word(name)

    @property
    def is_variable(self) -> bool:
        return self.kind is TermKind.VARIABLE

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        if not self.predicate:
            raise ValueError("atom predicate must be non-empty")
        if not self.args:
            raise ValueError(f"atom {self.predicate} needs at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(arg.name for arg in self.args if arg.is_variable))

    def rename(self, mapping: Dict[str, Term]) -> "Atom":
        return Atom(self.predicate, tuple(mapping.get(arg.name, arg) if arg.is_variable else arg for arg in self.args))

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(arg.name for arg in self.args)})"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def __str__(self) -> str:
        return f"-{self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True, eq=False)
class Clause:
    """Disjunction of literals with set semantics; literal order is kept for stable tie-breaking"""
    literals: Tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(dict.fromkeys(self.literals)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Clause):
            return NotImplemented
        return frozenset(self.literals) == frozenset(other.literals)

    def __hash__(self) -> int:
        return hash(frozenset(self.literals))

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> Tuple[str, ...]:
        names: Dict[str, None] = {}
        for literal in self.literals:
            for name in literal.atom.variables():
                names[name] = None
        return tuple(names)

    def rename(self, mapping: Dict[str, Term]) -> "Clause":
        return Clause(tuple(Literal(lit.atom.rename(mapping), lit.negated) for lit in self.literals))

    def __str__(self) -> str:
        return render_clause(self)


@dataclass(frozen=True)
class LogicalForm:
    """Implicitly existentially quantified conjunction of atoms"""
    atoms: Tuple[Atom, ...]

    def variables(self) -> Tuple[str, ...]:
        names: Dict[str, None] = {}
        for atom in self.atoms:
            for name in atom.variables():
                names[name] = None
        return tuple(names)

    def __str__(self) -> str:
        return render_logic_form(self)


# ============================================================================
# Rendering
# ============================================================================

def render_logic_form(form: LogicalForm) -> str:
    return " & ".join(str(atom) for atom in form.atoms)


def render_literal(literal: Literal) -> str:
    return str(literal)


def render_clause(clause: Clause) -> str:
    if clause.is_empty:
        return "[]"
    return " | ".join(str(literal) for literal in clause.literals)


# ============================================================================
# Logic form parser
#   form := atom ('&' atom)*
#   atom := IDENT '(' term (',' term)* ')'
# ============================================================================

_TOKEN = re.compile(r"(?P<ident>[A-Za-z0-9_][A-Za-z0-9_\-]*)|(?P<punct>[(),&∧])")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(text, position)
        if not match:
            raise LogicFormSyntaxError(position, f"unexpected character {text[position]!r}")
        kind = "ident" if match.group("ident") else "punct"
        value = match.group(0)
        if value == "∧":
            value = "&"
        tokens.append((kind, value, position))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _position(self) -> int:
        token = self._peek()
        return token[2] if token else len(self.text)

    def _expect(self, value: str, context: str) -> None:
        token = self._peek()
        if token is None or token[1] != value:
            found = repr(token[1]) if token else "end of input"
            raise LogicFormSyntaxError(self._position(), f"expected '{value}' {context}, found {found}")
        self.index += 1

    def _ident(self, context: str) -> str:
        token = self._peek()
        if token is None or token[0] != "ident":
            found = repr(token[1]) if token else "end of input"
            raise LogicFormSyntaxError(self._position(), f"expected {context}, found {found}")
        self.index += 1
        return token[1]

    def parse_form(self) -> LogicalForm:
        if not self.tokens:
            raise LogicFormSyntaxError(0, "empty logic form")
        atoms = [self._atom("predicate")]
        while self._peek() is not None:
            self._expect("&", "between atoms")
            atoms.append(self._atom("atom after '&'"))
        return LogicalForm(tuple(atoms))

    def _atom(self, context: str) -> Atom:
        predicate = self._ident(context).lower()
        self._expect("(", f"after predicate '{predicate}'")
        args = [Term.from_text(self._ident("term"))]
        while self._peek() is not None and self._peek()[1] == ",":
            self.index += 1
            args.append(Term.from_text(self._ident("term after ','")))
        self._expect(")", f"to close '{predicate}'")
        return Atom(predicate, tuple(args))


def parse_logic_form(text: str) -> LogicalForm:
    """
    Parse textual logic form, e.g. "George(x1) & came(e1) & Agent(x1,e1)".

    Names are lowercased; x<n>/e<n> are variables, sk<n> skolem constants,
    every other term a word constant.
    """
    return _Parser(text).parse_form()


def parse_logic_forms(text: str) -> List[LogicalForm]:
    """One logic form per non-blank line; '#' starts a comment"""
    forms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            forms.append(parse_logic_form(line))
    return forms


def lf_content_words(form: LogicalForm) -> List[str]:
    """Predicate names standing for words, role predicates excluded"""
    return [atom.predicate for atom in form.atoms if atom.predicate not in ROLE_PREDICATES]


# ============================================================================
# Annotated sentences
# ============================================================================

def _optional_field(value: str) -> Optional[str]:
    return None if value in ("-", "") else value


def parse_annotated(text: str) -> List[List[AnnotatedToken]]:
    """
    Parse annotated sentences, one token per line:
        index  lemma  pos  role  head  transitivity
    Fields are tab or whitespace separated, '-' marks an absent field.
    A blank line or an index restarting at 1 starts a new sentence.
    """
    sentences: List[List[AnnotatedToken]] = []
    current: List[AnnotatedToken] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if current:
                sentences.append(current)
                current = []
            continue
        fields = [field.strip() for field in (line.split("\t") if "\t" in line else line.split())]
        if not 3 <= len(fields) <= 6:
            raise AnnotationFormatError(line_no, f"expected 3 to 6 fields, got {len(fields)}")
        fields += ["-"] * (6 - len(fields))
        index_text, lemma, pos_text, role_text, head_text, transitivity_text = fields

        try:
            index = int(index_text)
            head = _optional_field(head_text)
            role = _optional_field(role_text)
            transitivity = _optional_field(transitivity_text)
            token = AnnotatedToken(
                index=index,
                lemma=lemma,
                pos=TokenPos(pos_text.lower()),
                role=Role(role.lower()) if role else Role.NONE,
                head=int(head) if head is not None else None,
                transitivity=Transitivity(transitivity.lower()) if transitivity else None,
            )
        except (ValueError, ValidationError) as e:
            message = e.errors()[0]["msg"] if isinstance(e, ValidationError) else str(e)
            raise AnnotationFormatError(line_no, message) from None

        if token.index == 1 and current:
            sentences.append(current)
            current = []
        current.append(token)

    if current:
        sentences.append(current)
    return sentences


# ============================================================================
# Logic form derivation
# ============================================================================

def _check_tokens(tokens: Sequence[AnnotatedToken]) -> Dict[int, AnnotatedToken]:
    by_index: Dict[int, AnnotatedToken] = {}
    for token in tokens:
        if token.index in by_index:
            raise DerivationError("duplicate token index", token.index)
        by_index[token.index] = token

    for token in tokens:
        if token.head is not None and token.head not in by_index:
            raise DerivationError(f"dangling head reference {token.head}", token.index)
        if token.transitivity is not None and token.pos is not TokenPos.VERB:
            raise DerivationError("transitivity given for a non-verb", token.index)
        if token.role is not Role.NONE:
            if token.head is None or by_index[token.head].pos is not TokenPos.VERB:
                raise DerivationError(f"role {token.role.value} needs a verb head", token.index)
            if token.pos is not TokenPos.NOUN:
                raise DerivationError(f"role {token.role.value} must be filled by a noun", token.index)
    return by_index


def derive_logic_form(tokens: Sequence[AnnotatedToken], config: Optional[DeriveConfig] = None) -> LogicalForm:
    """
    Translate one annotated sentence into a logic form.

    Nouns get entity variables x<k>, verbs event variables e<k>; modifiers,
    prepositions and conjunctions share the variable of the token they
    modify; subjects add agent(x, e); articles and other closed-class
    tokens produce nothing.
    """
    config = config or DeriveConfig()
    by_index = _check_tokens(tokens)

    variables: Dict[int, Term] = {}
    nouns = verbs = 0
    for token in tokens:
        if token.pos is TokenPos.NOUN:
            nouns += 1
            variables[token.index] = Term.variable(f"x{nouns}")
        elif token.pos is TokenPos.VERB:
            verbs += 1
            variables[token.index] = Term.variable(f"e{verbs}")
    fresh_entities = count(nouns + 1)

    dependents: Dict[Tuple[int, Role], List[int]] = defaultdict(list)
    for token in tokens:
        if token.role is not Role.NONE:
            dependents[(token.head, token.role)].append(token.index)

    atoms: List[Atom] = []
    for token in tokens:
        if token.pos in (TokenPos.ART, TokenPos.OTHER):
            continue
        if token.pos is TokenPos.NOUN:
            atoms.append(Atom(token.lemma, (variables[token.index],)))
        elif token.pos is TokenPos.VERB:
            atoms.extend(_verb_atoms(token, variables, dependents, fresh_entities, config.verb_style))
        else:
            target = _modified_variable(token, by_index, variables)
            atoms.append(Atom(token.lemma, (target,)))

    form = LogicalForm(tuple(atoms))
    logger.debug(f"Derived logic form: {form}")
    return form


def _verb_atoms(
    token: AnnotatedToken,
    variables: Dict[int, Term],
    dependents: Dict[Tuple[int, Role], List[int]],
    fresh_entities: Iterator[int],
    style: VerbStyle,
) -> List[Atom]:
    subjects = dependents.get((token.index, Role.SUBJ), [])
    direct = dependents.get((token.index, Role.DOBJ), [])
    indirect = dependents.get((token.index, Role.IOBJ), [])

    transitivity = token.transitivity
    if transitivity is None:
        transitivity = Transitivity.DITRANS if indirect else Transitivity.TRANS if direct else Transitivity.INTRANS
    if len(direct) > 1 or len(indirect) > 1:
        raise DerivationError("verb has more than one direct or indirect object", token.index)
    if transitivity is Transitivity.INTRANS and (direct or indirect):
        raise DerivationError("intransitive verb has an object", token.index)
    if transitivity is Transitivity.TRANS and indirect:
        raise DerivationError("transitive verb has an indirect object", token.index)

    def slot(indices: List[int]) -> Term:
        return variables[indices[0]] if indices else Term.variable(f"x{next(fresh_entities)}")

    event = variables[token.index]
    args = [event]
    if style is VerbStyle.ARGUMENTS:
        args.append(slot(subjects))
    if transitivity in (Transitivity.TRANS, Transitivity.DITRANS):
        args.append(slot(direct))
    if transitivity is Transitivity.DITRANS:
        args.append(slot(indirect))

    atoms = [Atom(token.lemma, tuple(args))]
    atoms.extend(Atom(AGENT, (variables[index], event)) for index in subjects)
    return atoms


def _modified_variable(
    token: AnnotatedToken, by_index: Dict[int, AnnotatedToken], variables: Dict[int, Term]
) -> Term:
    # Follow head links until a noun or verb supplies the shared argument
    seen = {token.index}
    current = token
    while current.head is not None and current.head not in seen:
        seen.add(current.head)
        current = by_index[current.head]
        if current.index in variables:
            return variables[current.index]
    raise DerivationError(f"{token.pos.value} '{token.lemma}' does not modify a noun or verb", token.index)


# ============================================================================
# Clausification
# ============================================================================

def _fresh_skolems(forms: Sequence[LogicalForm]) -> Iterator[Term]:
    used = {
        arg.name
        for form in forms
        for atom in form.atoms
        for arg in atom.args
        if arg.kind is TermKind.SKOLEM_CONST
    }
    for number in count(1):
        name = f"sk{number}"
        if name not in used:
            yield Term.skolem(name)


def clausify(
    t_forms: Sequence[LogicalForm], h_form: LogicalForm, link_hypothesis: bool = False
) -> Tuple[List[Clause], Clause]:
    """
    Clause set for refuting T' and neg(H').

    Each T variable becomes a fresh skolem constant and each T atom a positive
    unit clause. neg(H) is one clause of negated literals whose variables are
    renamed apart from T: per literal (h<i>_<var>) by default, or shared
    across the clause (h_<var>) with link_hypothesis.

    Returns:
        (T unit clauses, negated hypothesis clause)
    """
    skolems = _fresh_skolems(list(t_forms) + [h_form])
    t_clauses: List[Clause] = []
    for form in t_forms:
        mapping = {name: next(skolems) for name in form.variables()}
        t_clauses.extend(Clause((Literal(atom.rename(mapping)),)) for atom in form.atoms)

    negated: List[Literal] = []
    for position, atom in enumerate(h_form.atoms, start=1):
        prefix = "h_" if link_hypothesis else f"h{position}_"
        mapping = {name: Term.variable(f"{prefix}{name}") for name in atom.variables()}
        negated.append(Literal(atom.rename(mapping), negated=True))

    logger.debug(f"Clausified {len(t_clauses)} T units and a {len(negated)}-literal negated hypothesis")
    return t_clauses, Clause(tuple(negated))
