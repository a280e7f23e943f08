"""
Error types raised by the entailment engine
"""
from typing import Optional


class EntailmentError(Exception):
    """Base class for every error the engine raises on bad input"""


class KBParseError(EntailmentError):
    """Malformed line in a knowledge base file"""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class KBValidationError(EntailmentError):
    """Knowledge base is well-formed but violates a structural invariant"""


class UnknownSynsetError(EntailmentError, KeyError):
    """Synset id not present in the knowledge base"""

    def __init__(self, synset_id: str):
        self.synset_id = synset_id
        super().__init__(f"unknown synset: {synset_id}")

    def __str__(self) -> str:
        return self.args[0]


class LogicFormSyntaxError(EntailmentError):
    """Logic form text does not match the grammar"""

    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"position {position}: {message}")


class AnnotationFormatError(EntailmentError):
    """Malformed line in an annotated-sentence block"""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DerivationError(EntailmentError):
    """Annotated tokens cannot be translated into a logic form"""

    def __init__(self, message: str, token_index: Optional[int] = None):
        self.token_index = token_index
        prefix = f"token {token_index}: " if token_index is not None else ""
        super().__init__(f"{prefix}{message}")


class CorpusFormatError(EntailmentError):
    """Malformed pair block in a corpus file"""


class UsageError(EntailmentError):
    """Invalid command-line invocation"""
