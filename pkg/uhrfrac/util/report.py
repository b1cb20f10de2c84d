# -*- coding: utf-8 -*-
"""Write CSV tables and run reports of uhrfrac commands."""

import csv
import logging
import os
from dataclasses import dataclass, field

__all__ = ('CSVRecorder', 'RunReport', 'ReportWriteError', 'format_real')

log = logging.getLogger(__name__)


class ReportWriteError(OSError):
    pass


def format_real(value):
    """Return value with 17 significant digits (round-trips a double)."""
    return "%.17g" % value


class CSVRecorder(object):
    def __init__(self, filename, columns):
        """Create a recorder for a CSV table with the given column names.

        Rows are kept in memory by record() and written by save(), so a
        failed command never leaves a half-written table behind.

        """
        self.filename = filename
        self.columns = tuple(columns)
        self._rows = []

    def record(self, *values):
        """Add one row of reals."""
        if len(values) != len(self.columns):
            raise ValueError("%i values for columns %s" % (
                len(values), ", ".join(self.columns)))
        self._rows.append(tuple(format_real(v) for v in values))

    def record_columns(self, *columns):
        for row in zip(*columns):
            self.record(*row)

    def __len__(self):
        return len(self._rows)

    def save(self):
        try:
            with open(self.filename, "w", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(self.columns)
                writer.writerows(self._rows)
        except OSError as e:
            raise ReportWriteError("cannot write %s: %s" % (
                self.filename, e.strerror or e))
        log.info("wrote %s (%i rows)", self.filename, len(self._rows))
        return self.filename


@dataclass
class RunReport(object):
    """Summary of one command run, saved as report.txt."""
    scenario: str
    command: str
    certificate: list = field(default_factory=list)
    solve: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    envelope: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    SECTIONS = ("certificate", "solve", "residuals", "envelope", "outputs")

    def text(self):
        lines = ["scenario: %s" % self.scenario, "command: %s" % self.command]
        for name in self.SECTIONS:
            items = getattr(self, name)
            if items:
                lines.append("")
                lines.append("[%s]" % name)
                lines.extend(items)
        return "\n".join(lines) + "\n"

    def save(self, directory):
        path = os.path.join(directory, "report.txt")
        self.outputs.append(path)
        try:
            with open(path, "w") as f:
                f.write(self.text())
        except OSError as e:
            raise ReportWriteError("cannot write %s: %s" % (
                path, e.strerror or e))
        return path
