"""
Result writer - CSV persistence for run and sweep tables
"""
import logging
import sys
from pathlib import Path
from typing import Optional, TextIO

import pandas as pd

from models.run_result import NO_TRAFFIC

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.8g'
ABORT_MARKER = '# sweep aborted'


def frame_to_csv(frame: pd.DataFrame) -> str:
    """Render a table with the fixed float format; missing fairness becomes 'no-traffic'"""
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep=NO_TRAFFIC, lineterminator='\n')


def summary_path_for(out_path: Path) -> Path:
    """results.csv -> results.summary.csv"""
    return out_path.with_name(f"{out_path.stem}.summary{out_path.suffix or '.csv'}")


class ResultWriter:
    """Writes result tables to a file (atomically) or to a stream"""

    def __init__(self, out_path: Optional[str] = None, stream: Optional[TextIO] = None):
        """
        Initialize ResultWriter

        Args:
            out_path: Destination CSV; None writes to the stream
            stream: Output stream when no path is given (stdout by default)
        """
        self.out_path = Path(out_path) if out_path else None
        self.stream = stream if stream is not None else sys.stdout

    def write(self, frame: pd.DataFrame, summary: Optional[pd.DataFrame] = None,
              abort_message: Optional[str] = None) -> bool:
        """
        Write a results table, its optional summary, and an abort marker

        Args:
            frame: Rows in CSV column order
            summary: Per-point summary table
            abort_message: When set, a trailing comment line flags the table as partial

        Returns:
            True if successful, False otherwise
        """
        text = frame_to_csv(frame)
        if abort_message:
            text += f"{ABORT_MARKER}: {abort_message}\n"

        if self.out_path is None:
            if summary is not None:
                text += '\n' + frame_to_csv(summary)
            return self.write_text(text)

        if not self.write_text(text):
            return False
        if summary is not None:
            return self.write_text(frame_to_csv(summary), summary_path_for(self.out_path))
        return True

    def write_text(self, text: str, path: Optional[Path] = None) -> bool:
        """
        Write already-rendered text to a path or the configured destination

        Returns:
            True if successful, False otherwise
        """
        target = path or self.out_path
        if target is None:
            self.stream.write(text)
            self.stream.flush()
            return True
        try:
            self._write_atomic(target, text)
            logger.info(f"Wrote {target}")
            return True
        except OSError as e:
            logger.error(f"Error writing results to {target}: {e}")
            return False

    @staticmethod
    def _write_atomic(path: Path, text: str):
        """Write to a temporary sibling, then rename over the target"""
        path.parent.mkdir(parents=True, exist_ok=True)
        temp_path = path.with_suffix(path.suffix + '.tmp')
        try:
            with open(temp_path, 'w', newline='') as f:
                f.write(text)
            temp_path.replace(path)
        except OSError:
            if temp_path.exists():
                temp_path.unlink()
            raise
