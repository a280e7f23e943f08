"""
Command-line surface: similarity queries, logic-form derivation, MRM proofs,
LPE queries, corpus evaluation and KB statistics.

Exit status: 0 success or entailed, 1 valid run with a negative verdict,
2 usage or input error.
"""
import argparse
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from pydantic import ValidationError

from cli.services.corpus_processor import CorpusProcessor
from cli.services.pipeline import EvalPipeline, parse_sweep
from cli.services.report_writer import ReportWriter
from cli.services.settings import EntailSettings, get_settings
from entailment.errors import EntailmentError, UsageError
from entailment.lexkb import LexKB, load_kb
from entailment.logicform import derive_logic_form, parse_annotated, render_logic_form
from entailment.lpe import entails_lpe
from entailment.resolution import entails_mrm
from entailment.schemas import DeriveConfig, LpeConfig, Pos, ProveConfig, SimMeasure, UnifyConfig, VerbStyle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


class _HelpRequested(Exception):
    def __init__(self, text: str):
        self.text = text


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that reports problems as exceptions instead of exiting the process"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")

    def print_help(self, file=None):
        raise _HelpRequested(self.format_help())


def _build_parser() -> argparse.ArgumentParser:
    kb_flags = _ArgumentParser(add_help=False)
    kb_flags.add_argument("--kb", help="Knowledge base file (default: $ENTAIL_KB)")

    derive_flags = _ArgumentParser(add_help=False)
    derive_flags.add_argument("--verb-style", choices=[s.value for s in VerbStyle], default=VerbStyle.EVENT.value)

    prove_flags = _ArgumentParser(add_help=False)
    prove_flags.add_argument("--measure", choices=[m.value for m in SimMeasure])
    prove_flags.add_argument("--tau-step", type=float)
    prove_flags.add_argument("--tau-atom", type=float)
    prove_flags.add_argument("--tau-total", type=float)
    prove_flags.add_argument("--max-steps", type=int)
    prove_flags.add_argument("--max-clause-size", type=int)
    prove_flags.add_argument("--link-h", action="store_true", help="Share hypothesis variables across the negated clause")

    lpe_flags = _ArgumentParser(add_help=False)
    lpe_flags.add_argument("--tau-pairs", type=int)
    lpe_flags.add_argument("--max-len", type=int)
    lpe_flags.add_argument("--strict-pattern", action="store_true", help="Only accept paths in the LPE path language")
    lpe_flags.add_argument("--all-witnesses", action="store_true", help="Report every path, not only the shortest")
    lpe_flags.add_argument("--no-shared-synsets", action="store_true", help="Do not credit words sharing a synset")

    parser = _ArgumentParser(prog="entail", description="Lexical textual entailment")
    parser.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("sim", parents=[kb_flags], help="Word similarity")
    sim.add_argument("--measure", choices=[m.value for m in SimMeasure])
    sim.add_argument("--pos", choices=[p.value for p in Pos])
    sim.add_argument("w1")
    sim.add_argument("w2")

    derive = commands.add_parser("derive", parents=[derive_flags], help="Logic forms of annotated sentences")
    derive.add_argument("--ann", required=True, help="Annotated sentence file")

    prove = commands.add_parser("prove", parents=[kb_flags, prove_flags, derive_flags], help="MRM entailment")
    prove.add_argument("--t", required=True, help="Text file: logic forms or annotated sentences")
    prove.add_argument("--h", required=True, help="Hypothesis file: one logic form or annotated sentence")
    prove.add_argument("--trace", action="store_true", help="Append the derivation trace")

    lpe = commands.add_parser("lpe", parents=[kb_flags, lpe_flags, derive_flags], help="LPE entailment")
    lpe.add_argument("--t-words", nargs="+")
    lpe.add_argument("--h-words", nargs="+")
    lpe.add_argument("--t", help="Text file")
    lpe.add_argument("--h", help="Hypothesis file")

    evaluate = commands.add_parser(
        "eval", parents=[kb_flags, prove_flags, lpe_flags, derive_flags], help="Evaluate a corpus with both methods"
    )
    evaluate.add_argument("--corpus", required=True)
    evaluate.add_argument("--sweep", help="tau-total=a:b:step or tau-pairs=a:b:step")
    evaluate.add_argument("--workers", type=int)
    evaluate.add_argument("--log-dir", help="Write a per-run log file into this directory")

    commands.add_parser("kb-info", parents=[kb_flags], help="Knowledge base statistics")
    return parser


# ============================================================================
# Configuration from flags
# ============================================================================

def _given(args: argparse.Namespace, **names: str) -> Dict[str, Any]:
    """Flag values that were actually passed, keyed by config field name"""
    return {field: getattr(args, attr) for field, attr in names.items() if getattr(args, attr, None) is not None}


def _load_kb(args: argparse.Namespace, settings: EntailSettings) -> LexKB:
    path = args.kb or settings.kb
    if not path:
        raise UsageError("no knowledge base: pass --kb or set ENTAIL_KB")
    with open(path, encoding="utf-8") as handle:
        return load_kb(handle)


def _measure(args: argparse.Namespace, settings: EntailSettings) -> SimMeasure:
    return SimMeasure(args.measure) if args.measure else settings.measure


def _prove_config(args: argparse.Namespace, settings: EntailSettings) -> ProveConfig:
    unify = UnifyConfig(measure=_measure(args, settings), **_given(args, tau_step="tau_step", tau_atom="tau_atom"))
    return ProveConfig(
        unify=unify,
        link_hypothesis=args.link_h,
        **_given(args, tau_total="tau_total", max_steps="max_steps", max_clause_size="max_clause_size"),
    )


def _lpe_config(args: argparse.Namespace) -> LpeConfig:
    return LpeConfig(
        strict_pattern=args.strict_pattern,
        all_witnesses=args.all_witnesses,
        count_shared_synsets=not args.no_shared_synsets,
        **_given(args, tau_pairs="tau_pairs", max_len="max_len"),
    )


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


# ============================================================================
# Subcommands
# ============================================================================

def _cmd_sim(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    kb = _load_kb(args, settings)
    measure = _measure(args, settings)
    score = kb.similarity(args.w1, args.w2, measure, Pos(args.pos) if args.pos else None)
    return EXIT_OK, ReportWriter.similarity(args.w1, args.w2, measure.value, score)


def _cmd_derive(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    config = DeriveConfig(verb_style=VerbStyle(args.verb_style))
    sentences = parse_annotated(_read(args.ann))
    return EXIT_OK, "\n".join(render_logic_form(derive_logic_form(tokens, config)) for tokens in sentences)


def _cmd_prove(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    kb = _load_kb(args, settings)
    config = _prove_config(args, settings)
    derive_config = DeriveConfig(verb_style=VerbStyle(args.verb_style))
    text = CorpusProcessor.prepare(_read(args.t), derive_config=derive_config)
    hypothesis = CorpusProcessor.prepare_hypothesis(_read(args.h), derive_config=derive_config)

    verdict = entails_mrm(list(text.forms), hypothesis.forms[0], kb, config)
    return (EXIT_OK if verdict.entailed else EXIT_NEGATIVE), ReportWriter.verdict(verdict, trace=args.trace)


def _cmd_lpe(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    kb = _load_kb(args, settings)
    config = _lpe_config(args)
    if args.t_words and args.h_words:
        t_words, h_words = args.t_words, args.h_words
    elif args.t and args.h:
        derive_config = DeriveConfig(verb_style=VerbStyle(args.verb_style))
        t_words = CorpusProcessor.prepare(_read(args.t), derive_config=derive_config).words
        h_words = CorpusProcessor.prepare(_read(args.h), derive_config=derive_config).words
    else:
        raise UsageError("lpe needs --t-words and --h-words, or --t and --h")

    verdict = entails_lpe(t_words, h_words, kb, config)
    return (EXIT_OK if verdict.entailed else EXIT_NEGATIVE), ReportWriter.verdict(verdict)


def _cmd_eval(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    kb = _load_kb(args, settings)
    sweep = parse_sweep(args.sweep) if args.sweep else None
    workers = args.workers if args.workers is not None else settings.workers
    if workers < 1:
        raise UsageError("--workers must be at least 1")

    pipeline = EvalPipeline(
        kb,
        prove_config=_prove_config(args, settings),
        lpe_config=_lpe_config(args),
        derive_config=DeriveConfig(verb_style=VerbStyle(args.verb_style)),
        workers=workers,
    )
    report = pipeline.run(_read(args.corpus), sweep=sweep, log_dir=args.log_dir)
    return EXIT_OK, ReportWriter.evaluation(report)


def _cmd_kb_info(args: argparse.Namespace, settings: EntailSettings) -> Tuple[int, str]:
    return EXIT_OK, ReportWriter.kb_stats(_load_kb(args, settings).stats())


_COMMANDS: Dict[str, Callable[[argparse.Namespace, EntailSettings], Tuple[int, str]]] = {
    "sim": _cmd_sim,
    "derive": _cmd_derive,
    "prove": _cmd_prove,
    "lpe": _cmd_lpe,
    "eval": _cmd_eval,
    "kb-info": _cmd_kb_info,
}


def run_command(argv: Sequence[str], settings: Optional[EntailSettings] = None) -> Tuple[int, str]:
    """
    Run one subcommand.

    Args:
        argv: arguments without the program name
        settings: environment defaults; read from ENTAIL_* when omitted

    Returns:
        (exit status, report text)
    """
    command = "entail"
    try:
        args = _build_parser().parse_args(list(argv))
        command = args.command
        if args.verbose:
            logging.getLogger().setLevel(logging.INFO)
        settings = settings or get_settings()
        return _COMMANDS[command](args, settings)
    except _HelpRequested as e:
        return EXIT_OK, e.text.rstrip("\n")
    except ValidationError as e:
        message = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        logger.error(f"{command} failed: {message}")
        return EXIT_ERROR, f"error: {message}"
    except (EntailmentError, OSError) as e:
        logger.error(f"{command} failed: {e}")
        return EXIT_ERROR, f"error: {e}"
    except Exception as e:
        logger.error(f"Unexpected error in {command}: {str(e)}", exc_info=True)
        return EXIT_ERROR, f"error: {e}"
