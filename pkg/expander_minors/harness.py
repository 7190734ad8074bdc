"""
Experiment Harness
Expands a JSON experiment config into (instance, seed) cells, runs generation,
hypothesis gating, the minor engine and witness verification for each cell,
and streams ResultRow records to CSV or JSON in grid order.
"""
import csv
import io
import json
import logging
import math
import multiprocessing as mp
import os
import time
from typing import Iterable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from tqdm import tqdm

from .errors import ConfigError, MinorsError
from .generators import FAMILIES, GenSpec
from .minor_engine import SUCCESS, compute_params, find_minor, normalize_mode, verify_witness
from .spectral import gate_theorem_hypotheses
from .walks import RngStream

logger = logging.getLogger(__name__)

CSV_HEADER = ['instance', 'family', 'n', 'd', 'seed', 'mode', 'outcome', 'reason', 'order',
              'target_r', 'iterations', 'route', 'ratio', 'error', 'wall_time_s']
TIMING_COLUMNS = ('wall_time_s',)
ERROR = 'error'


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    schema_version: Literal[1] = 1
    families: List[str] = Field(min_length=1)
    n_values: List[int] = []
    d_values: List[int] = []
    a: Optional[int] = None
    b: Optional[int] = None
    eps: float = Field(0.4, gt=0, lt=0.5)
    mode: str = 'sparse'
    profile: Literal['desk', 'literal'] = 'desk'
    C: Optional[float] = Field(None, gt=0)
    K: Optional[float] = Field(None, gt=0)
    seeds: int = Field(1, ge=1)
    base_seed: int = 0
    budget_s: float = Field(60.0, gt=0)
    max_iter: Optional[int] = Field(None, ge=1)
    output: Optional[str] = None
    format: Literal['csv', 'json'] = 'csv'

    @model_validator(mode='after')
    def check_grid(self):
        unknown = [family for family in self.families if family not in FAMILIES]
        if unknown:
            raise ValueError(f'unknown families {unknown}; expected one of {list(FAMILIES)}')
        normalize_mode(self.mode)
        if not self.cells():
            raise ValueError('instance grid is empty')
        return self

    def overrides(self):
        return {key: value for key, value in (('C', self.C), ('K', self.K)) if value is not None}

    def cells(self) -> List[GenSpec]:
        """Instance grid in a fixed order: family, then n, then d"""
        cells = []
        for family in self.families:
            if family == 'regular':
                cells += [GenSpec('regular', n=n, d=d) for n in self.n_values for d in self.d_values]
            elif family == 'gnp':
                cells += [GenSpec('gnp', n=n, d=d, p=d / (n - 1)) for n in self.n_values for d in self.d_values
                          if n > 1]
            elif family in ('cycle', 'complete'):
                cells += [GenSpec(family, n=n) for n in self.n_values]
            elif family == 'complete-bipartite':
                if self.a is not None and self.b is not None:
                    cells.append(GenSpec(family, a=self.a, b=self.b))
            else:
                cells.append(GenSpec(family))
        return cells


class ResultRow(BaseModel):
    instance: str
    family: str
    n: int
    d: int
    seed: int
    mode: str
    outcome: str
    reason: Optional[str] = None
    order: int = 0
    target_r: Optional[int] = None
    iterations: int = 0
    route: Optional[str] = None
    ratio: Optional[float] = None
    error: Optional[str] = None
    wall_time_s: float = 0.0

    @property
    def key(self):
        return self.instance, self.seed


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as f:
            return ExperimentConfig.model_validate_json(f.read())
    except OSError as e:
        raise ConfigError(f'cannot read config {path}: {e}')
    except ValidationError as e:
        raise ConfigError(f'invalid config {path}: {e}')


def _ratio(order, n, d):
    if d < 2 or n < 1:
        return None
    return round(order / math.sqrt(n * d / math.log(d)), 6)


def run_cell(task) -> ResultRow:
    """One (instance, seed) cell; MinorsError is recorded in the row"""
    config, index, spec, seed = task
    spec = GenSpec(spec.family, n=spec.n, d=spec.d, p=spec.p, a=spec.a, b=spec.b, seed=seed)
    mode = normalize_mode(config.mode)
    started = time.monotonic()
    row = dict(instance=spec.label, family=spec.family, n=spec.n or 0, d=spec.d or 0, seed=seed,
               mode=mode, outcome=ERROR)
    try:
        graph = spec.generate(stream=index)
        row.update(n=graph.n, d=graph.max_degree)
        params = compute_params(graph.n, graph.max_degree, config.eps, mode, config.profile,
                                **config.overrides())
        row['target_r'] = params.r
        row['route'] = gate_theorem_hypotheses(graph, config.eps).route
        report = find_minor(graph, params, RngStream(seed, index, (1,)),
                            max_iter=config.max_iter, deadline=config.budget_s)
        if report.outcome == SUCCESS and not verify_witness(graph, report.witness).valid:
            raise MinorsError('witness failed re-verification')
        row.update(outcome=report.outcome, reason=report.reason, order=report.order,
                   iterations=report.iterations, ratio=_ratio(report.order, graph.n, graph.max_degree))
    except MinorsError as e:
        logger.error(f'cell {spec.label} seed {seed}: {e}')
        row.update(error=f'{type(e).__name__}: {e}')
    row['wall_time_s'] = round(time.monotonic() - started, 3)
    result = ResultRow(**row)
    logger.info(f'cell {result.instance} seed {seed}: {result.outcome} order {result.order}/{result.target_r}')
    return result


def tasks_for(config: ExperimentConfig, skip=frozenset()):
    tasks = []
    for index, spec in enumerate(config.cells()):
        for offset in range(config.seeds):
            seed = config.base_seed + offset
            if (spec.label, seed) not in skip:
                tasks.append((config, index, spec, seed))
    return tasks


def run_experiment(config: ExperimentConfig, jobs=1, sink=None, skip=frozenset(), progress=False) -> List[ResultRow]:
    """
    Run every cell and return rows in grid order. `sink(row)` is called as each
    row arrives (still in grid order) so output can be flushed incrementally;
    cells whose (instance, seed) key is in `skip` are not run.
    """
    tasks = tasks_for(config, skip)
    logger.info(f'experiment: {len(tasks)} cells, {jobs} jobs')
    rows = []
    pool = mp.Pool(jobs) if jobs > 1 else None
    try:
        results = pool.imap(run_cell, tasks) if pool else map(run_cell, tasks)
        for row in tqdm(results, total=len(tasks), disable=not progress, desc='cells'):
            rows.append(row)
            if sink is not None:
                sink(row)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return rows


def _csv_value(value):
    return '' if value is None else value


def emit(rows: Iterable[ResultRow], stream, fmt='csv'):
    """Write rows as CSV (fixed header) or a JSON array"""
    rows = list(rows)
    if fmt == 'csv':
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_csv_value(data[column]) for column in CSV_HEADER])
    elif fmt == 'json':
        stream.write(json.dumps([row.model_dump() for row in rows], indent=2) + '\n')
    else:
        raise ConfigError(f'unknown output format {fmt!r}')


def emit_text(rows, fmt='csv') -> str:
    buffer = io.StringIO()
    emit(rows, buffer, fmt)
    return buffer.getvalue()


class CsvSink:
    """Appends rows to a CSV file as they arrive, writing the header once"""

    def __init__(self, path):
        self.path = path
        fresh = not os.path.exists(path) or os.path.getsize(path) == 0
        self.file = open(path, 'a', newline='')
        self.writer = csv.writer(self.file, lineterminator='\n')
        if fresh:
            self.writer.writerow(CSV_HEADER)
            self.file.flush()

    def __call__(self, row: ResultRow):
        data = row.model_dump()
        self.writer.writerow([_csv_value(data[column]) for column in CSV_HEADER])
        self.file.flush()

    def close(self):
        self.file.close()


def parse_csv(text) -> List[ResultRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ConfigError(f'unexpected CSV header {reader.fieldnames}')
    return [ResultRow(**{key: (value if value != '' else None) for key, value in record.items()})
            for record in reader]


def completed_keys(path):
    """(instance, seed) keys already present in a results CSV"""
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        return frozenset()
    with open(path, newline='') as f:
        return frozenset(row.key for row in parse_csv(f.read()))


def strip_timing(text) -> str:
    """CSV text with the timing columns blanked, for determinism comparisons"""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return ''
    drop = [rows[0].index(column) for column in TIMING_COLUMNS if column in rows[0]]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    for row in rows:
        writer.writerow([value for i, value in enumerate(row) if i not in drop])
    return out.getvalue()


__all__ = [
    'CSV_HEADER', 'ExperimentConfig', 'ResultRow', 'load_config', 'run_cell', 'tasks_for',
    'run_experiment', 'emit', 'emit_text', 'CsvSink', 'parse_csv', 'completed_keys', 'strip_timing',
]
