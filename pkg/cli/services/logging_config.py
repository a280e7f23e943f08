"""
Logging Configuration for Corpus Evaluation

Creates a separate log file for each eval run with timestamp.
"""
import logging
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_root_logging(level: Union[str, int] = logging.WARNING) -> None:
    """Console logging on stderr; stdout is reserved for reports"""
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


class RunLogger:
    """Manages logging for individual evaluation runs"""

    def __init__(self, run_id: str, log_dir: Union[str, Path] = "logs"):
        self.run_id = run_id
        self.log_dir = Path(log_dir)
        self.log_file: Optional[Path] = None
        self.file_handler: Optional[logging.FileHandler] = None
        self.logger: Optional[logging.Logger] = None

    def setup(self) -> logging.Logger:
        self.log_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.log_file = self.log_dir / f"eval_{timestamp}_{self.run_id}.log"

        self.logger = logging.getLogger(f"eval_{self.run_id}")
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False
        self.logger.handlers.clear()

        self.file_handler = logging.FileHandler(self.log_file, encoding="utf-8")
        self.file_handler.setLevel(logging.INFO)
        self.file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        self.logger.addHandler(self.file_handler)

        self.logger.info(f"=== Run started: {self.run_id} ===")
        self.logger.info(f"Log file: {self.log_file}")
        return self.logger

    def cleanup(self) -> None:
        if self.logger:
            self.logger.info(f"=== Run completed: {self.run_id} ===")
            for handler in self.logger.handlers[:]:
                handler.close()
                self.logger.removeHandler(handler)


def setup_run_logger(run_id: str, log_dir: Union[str, Path] = "logs") -> RunLogger:
    """
    Setup a logger for a specific eval run

    Args:
        run_id: Unique identifier for this run
        log_dir: Directory receiving the log file

    Returns:
        RunLogger instance
    """
    run_logger = RunLogger(run_id, log_dir)
    run_logger.setup()
    return run_logger
