__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import csv
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = ['RunReport', 'to_jsonable', 'write_report', 'write_trace', 'write_history', 'read_report']

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    """
    Result of one configured run. The JSON payload holds the config echo, results and checks; the wall
    time is kept apart so identical configs give identical report files
    """
    mode: str
    config: dict
    results: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    error: dict = None
    wall_time: float = 0.0
    trace_rows: list = field(default_factory=list)
    history: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_dict(self):
        return {'mode': self.mode, 'config': self.config, 'results': self.results, 'checks': self.checks,
                'passed': self.passed, 'error': self.error}


def to_jsonable(value):
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_trace(path, rows):
    """
    :param path: csv file
    :param rows: (t, node, coordinates, f, field norm) tuples
    """
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['t', 'node', 'coords', 'f', 'grad_norm'])
        for t, node, coords, value, norm in rows:
            writer.writerow([repr(float(t)), int(node), ' '.join(repr(float(x)) for x in coords),
                             repr(float(value)), repr(float(norm))])


def write_history(path, history):
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['iteration', 'sup'])
        for iteration, value in history:
            writer.writerow([int(iteration), repr(float(value))])


def write_report(report: RunReport, out_dir) -> str:
    """Write report.json, trace.csv, history.csv and timing.json under out_dir and return the report path"""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, 'report.json')
    with open(path, 'w') as fh:
        json.dump(to_jsonable(report.to_dict()), fh, sort_keys=True, indent=2)
        fh.write('\n')
    write_trace(os.path.join(out_dir, 'trace.csv'), report.trace_rows)
    write_history(os.path.join(out_dir, 'history.csv'), report.history)
    with open(os.path.join(out_dir, 'timing.json'), 'w') as fh:
        json.dump({'wall_time': report.wall_time}, fh)
    logger.info('Report written to %s', path)
    return path


def read_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
