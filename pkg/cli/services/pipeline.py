"""
Corpus evaluation pipeline - runs MRM and LPE over every pair and aggregates
"""
import logging
import math
import uuid
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd

from cli.services.corpus_processor import Block, CorpusProcessor
from cli.services.logging_config import RunLogger, setup_run_logger
from entailment.errors import EntailmentError, UsageError
from entailment.lexkb import LexKB
from entailment.lpe import entails_lpe
from entailment.resolution import entails_mrm
from entailment.schemas import (
    CorpusPair, DeriveConfig, EvalReport, EvalRow, LpeConfig, ProofStatus, ProveConfig, SweepRow,
)

logger = logging.getLogger(__name__)

SWEEP_PARAMETERS = ("tau-total", "tau-pairs")


def parse_sweep(sweep: str) -> Tuple[str, List[float]]:
    """
    Parse "tau-total=a:b:step" or "tau-pairs=a:b:step" into the swept values a, a+step, ... <= b
    """
    name, _, bounds = sweep.partition("=")
    name = name.strip()
    if name not in SWEEP_PARAMETERS:
        raise UsageError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMETERS)}, got '{name}'")
    try:
        start, stop, step = (float(part) for part in bounds.split(":"))
    except ValueError:
        raise UsageError(f"sweep range must be a:b:step, got '{bounds}'") from None
    if step <= 0 or stop < start:
        raise UsageError("sweep needs a positive step and a <= b")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return name, [round(start + k * step, 10) for k in range(count)]


def _rate(hits: pd.Series) -> Optional[float]:
    return float(hits.mean()) if len(hits) else None


class EvalPipeline:
    """Evaluate a corpus of (T, H) pairs with both entailment methods"""

    def __init__(
        self,
        kb: LexKB,
        prove_config: Optional[ProveConfig] = None,
        lpe_config: Optional[LpeConfig] = None,
        derive_config: Optional[DeriveConfig] = None,
        workers: int = 4,
    ):
        self.kb = kb
        self.prove_config = prove_config or ProveConfig()
        self.lpe_config = lpe_config or LpeConfig()
        self.derive_config = derive_config or DeriveConfig()
        self.workers = workers
        self.corpus_processor = CorpusProcessor()
        self.run_logger: Optional[RunLogger] = None

    def run(
        self,
        corpus_text: str,
        sweep: Optional[Tuple[str, List[float]]] = None,
        log_dir: Optional[Union[str, Path]] = None,
    ) -> EvalReport:
        """Evaluate every pair; rows come back in corpus order"""
        if log_dir is not None:
            self.run_logger = setup_run_logger(uuid.uuid4().hex[:8], log_dir)
            run_log = self.run_logger.logger
        else:
            run_log = logger

        try:
            blocks = self.corpus_processor.split_blocks(corpus_text)
            run_log.info(f"Evaluation started: {len(blocks)} pairs, {self.workers} workers")
            rows = self._evaluate_blocks(blocks, run_log)
            report = self.aggregate(rows, sweep)
            run_log.info(
                f"Evaluation complete: {report.pairs} pairs, {report.skipped} skipped, agreement={report.agreement}"
            )
            return report
        finally:
            if self.run_logger:
                self.run_logger.cleanup()
                self.run_logger = None

    def _evaluate_blocks(self, blocks: List[Block], run_log: logging.Logger) -> List[EvalRow]:
        rows: Dict[int, EvalRow] = {}
        pending: Dict[int, CorpusPair] = {}
        seen_ids = set()

        for position, block in enumerate(blocks):
            try:
                pair = self.corpus_processor.parse_block(block)
            except EntailmentError as e:
                run_log.warning(f"Skipping block {position + 1}: {e}")
                rows[position] = EvalRow(id=f"#{position + 1}", skipped=True, error=str(e))
                continue
            if pair.id in seen_ids:
                run_log.warning(f"Skipping block {position + 1}: duplicate id '{pair.id}'")
                rows[position] = EvalRow(id=pair.id, gold=pair.gold, skipped=True, error="duplicate id")
                continue
            seen_ids.add(pair.id)
            pending[position] = pair

        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(self.evaluate_pair, pair): position for position, pair in pending.items()}
            for future in as_completed(futures):
                position = futures[future]
                row = future.result()
                if row.skipped:
                    run_log.warning(f"Skipping pair '{row.id}': {row.error}")
                else:
                    run_log.info(f"Pair '{row.id}': mrm={row.mrm_entailed} lpe={row.lpe_entailed}")
                rows[position] = row

        return [rows[position] for position in sorted(rows)]

    def evaluate_pair(self, pair: CorpusPair) -> EvalRow:
        try:
            text = self.corpus_processor.prepare(pair.t_source, pair.t_kind, self.derive_config)
            hypothesis = self.corpus_processor.prepare_hypothesis(pair.h_source, pair.h_kind, self.derive_config)
            mrm = entails_mrm(list(text.forms), hypothesis.forms[0], self.kb, self.prove_config)
            lpe = entails_lpe(text.words, hypothesis.words, self.kb, self.lpe_config)
        except EntailmentError as e:
            return EvalRow(id=pair.id, gold=pair.gold, skipped=True, error=str(e))

        return EvalRow(
            id=pair.id,
            gold=pair.gold,
            mrm_entailed=mrm.entailed,
            mrm_score=mrm.score,
            mrm_status=ProofStatus.PROVED if mrm.derivation is not None else ProofStatus(mrm.reason),
            lpe_entailed=lpe.entailed,
            lpe_count=int(lpe.score),
        )

    def aggregate(self, rows: List[EvalRow], sweep: Optional[Tuple[str, List[float]]] = None) -> EvalReport:
        frame = pd.DataFrame([row.model_dump() for row in rows], columns=list(EvalRow.model_fields))
        evaluated = frame[~frame["skipped"].astype(bool)]
        mrm_accuracy, lpe_accuracy, agreement = self._rates(
            evaluated, evaluated["mrm_entailed"], evaluated["lpe_entailed"]
        )

        sweep_rows = []
        if sweep is not None:
            name, values = sweep
            for value in values:
                sweep_rows.append(self._sweep_row(evaluated, name, value))

        return EvalReport(
            rows=rows,
            pairs=len(rows),
            skipped=int(len(frame) - len(evaluated)),
            mrm_accuracy=mrm_accuracy,
            lpe_accuracy=lpe_accuracy,
            agreement=agreement,
            sweep=sweep_rows,
        )

    @staticmethod
    def _rates(
        evaluated: pd.DataFrame, mrm: pd.Series, lpe: pd.Series
    ) -> Tuple[Optional[float], Optional[float], Optional[float]]:
        mrm = mrm.astype(bool)
        lpe = lpe.astype(bool)
        labelled = evaluated["gold"].notna()
        gold = evaluated.loc[labelled, "gold"].astype(bool)
        return (
            _rate(mrm[labelled] == gold),
            _rate(lpe[labelled] == gold),
            _rate(mrm == lpe),
        )

    def _sweep_row(self, evaluated: pd.DataFrame, name: str, value: float) -> SweepRow:
        # Scores and counts are already computed; only the threshold moves
        if name == "tau-total":
            proved = evaluated["mrm_status"] == ProofStatus.PROVED
            mrm = proved & (evaluated["mrm_score"].astype(float) > value)
            lpe = evaluated["lpe_entailed"].astype(bool)
        else:
            mrm = evaluated["mrm_entailed"].astype(bool)
            lpe = evaluated["lpe_count"].astype(float) > value
        mrm_accuracy, lpe_accuracy, agreement = self._rates(evaluated, mrm, lpe)
        return SweepRow(
            parameter=name,
            value=value,
            mrm_entailed=int(mrm.sum()),
            lpe_entailed=int(lpe.sum()),
            mrm_accuracy=mrm_accuracy,
            lpe_accuracy=lpe_accuracy,
            agreement=agreement,
        )
