import math
import sys
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, conint
from tqdm import tqdm

from .records import LabeledRecord
from .sampler import record_seed, sample_behavior
from ..enums import LpStatus, RejectReason, SdpStatus
from ..errors import GenerationAbortedError, SolverError
from ..npa import MomentStructure, bound_guessing_probability, build_moment_structure, q2_membership
from ..optimization import SdpSolver, find_optimal_bell_inequality, find_pr_box, get_solver
from ..polytope import BellInequality, generate_facets, read_facets, spanning_vertices
from ..scenario import Behavior, Scenario, enumerate_vertices
from ..settings import get_settings

__all__ = ['SamplerConfig', 'GenerationSummary', 'label_behavior', 'generate_record', 'generate_dataset',
           'split_dataset', 'FAILURE_RATE_LIMIT']

FAILURE_RATE_LIMIT = 0.05
MIN_ATTEMPTS_BEFORE_ABORT = 100


class SamplerConfig(BaseModel):
    scenario: Scenario
    n_samples: conint(ge=1)
    master_seed: conint(ge=0, lt=2 ** 64)
    facets_file: Optional[Path] = None
    q2_filter: bool = True
    guessed_setting: conint(ge=1) = 1
    npa_level: conint(ge=1, le=2) = 2
    max_attempts: conint(ge=1) = 1000

    def echo(self):
        d = self.dict()
        d['scenario'] = self.scenario.to_list()
        d['facets_file'] = None if self.facets_file is None else str(self.facets_file)
        return d


class GenerationSummary(BaseModel):
    attempts: int = 0
    accepted: int = 0
    q2_filter: bool = True
    rejections: Dict[RejectReason, int] = {}

    @property
    def failures(self) -> int:
        return self.rejections.get(RejectReason.SOLVER_FAILURE, 0)

    @property
    def q2_acceptance_rate(self) -> Optional[float]:
        if not self.q2_filter or self.attempts == 0:
            return None
        return 1 - self.rejections.get(RejectReason.NOT_Q2, 0) / self.attempts

    def add(self, attempts: int, rejections: Dict[RejectReason, int], accepted: int = 1):
        self.attempts += attempts
        self.accepted += accepted
        for reason, count in rejections.items():
            self.rejections[reason] = self.rejections.get(reason, 0) + count

    def to_dict(self):
        return dict(attempts=self.attempts, accepted=self.accepted,
                    rejections={reason.value: count for reason, count in sorted(self.rejections.items())},
                    q2_acceptance_rate=self.q2_acceptance_rate)


class _Context:
    """Everything a worker needs that does not change between records."""
    def __init__(self, config: SamplerConfig):
        self.config = config
        if config.facets_file is not None:
            self.facets = read_facets(config.facets_file)
        else:
            self.facets = generate_facets(config.scenario)
        if not self.facets or any(f.scenario != config.scenario for f in self.facets):
            raise ValueError(f'the facet list does not match scenario {config.scenario}')
        self.vertices = enumerate_vertices(config.scenario)
        self.structure: MomentStructure = build_moment_structure(config.scenario, config.npa_level)
        self.solver: SdpSolver = get_solver()
        self._sources: Dict[int, Tuple[BellInequality, list, Behavior]] = {}

    def source(self, facet_index: int):
        """The facet, its spanning vertices and its PR box, computed once per facet."""
        if facet_index not in self._sources:
            facet = self.facets[facet_index]
            self._sources[facet_index] = (facet, spanning_vertices(facet, self.vertices), find_pr_box(facet))
        return self._sources[facet_index]


def label_behavior(behavior: Behavior, context: '_Context') -> Union[Tuple[BellInequality, float, float],
                                                                      RejectReason]:
    """
    Two-step labeling: optimal separating inequality by LP, then the guessing-probability bound at the behavior's
    value of that inequality. Returns (inequality, bell value, p_guess) or the reason the behavior is rejected.
    """
    config = context.config
    if config.q2_filter:
        try:
            if not q2_membership(behavior, context.structure, context.solver):
                return RejectReason.NOT_Q2
        except SolverError:
            return RejectReason.SOLVER_FAILURE

    lp = find_optimal_bell_inequality(behavior)
    if lp.status is LpStatus.LOCAL_BEHAVIOR:
        return RejectReason.LOCAL
    if lp.status is not LpStatus.OPTIMAL:
        return RejectReason.SOLVER_FAILURE
    ineq = lp.inequality
    bell_value = ineq.value(behavior)

    bound = bound_guessing_probability(bell_value, ineq, config.guessed_setting, context.structure, context.solver)
    if bound.status is SdpStatus.INFEASIBLE:
        return RejectReason.INFEASIBLE
    if not bound.status.solved:
        return RejectReason.SOLVER_FAILURE
    if bound.p_guess >= 1 - get_settings().TRIVIAL_GUESS_TOL:
        return RejectReason.TRIVIAL_GUESS
    return ineq, bell_value, bound.p_guess


def generate_record(index: int, context: '_Context') -> Tuple[LabeledRecord, int, Dict[RejectReason, int]]:
    """Record `index`, reproducible from the master seed and the index alone."""
    config = context.config
    seed = record_seed(config.master_seed, index)
    rng = np.random.default_rng(seed)
    facet, spanning, pr_box = context.source(index % len(context.facets))
    rejections = Counter()
    for attempt in range(1, config.max_attempts + 1):
        behavior = sample_behavior(facet, spanning, pr_box, rng)
        label = label_behavior(behavior, context)
        if isinstance(label, RejectReason):
            rejections[label] += 1
            continue
        ineq, bell_value, p_guess = label
        record = LabeledRecord(behavior=behavior, h=ineq.h, c=ineq.c, bell_value=bell_value, p_guess=p_guess,
                               facet_class=facet.facet_class, seed=seed)
        return record, attempt, dict(rejections)
    raise SolverError(f'record {index}: no acceptable behavior in {config.max_attempts} attempts '
                      f'(rejections: {dict(rejections)})')


_WORKER_CONTEXT: Optional[_Context] = None


def _init_worker(config: SamplerConfig, settings: dict):
    global _WORKER_CONTEXT
    get_settings.set(**settings)
    _WORKER_CONTEXT = _Context(config)


def _worker_record(index: int):
    return generate_record(index, _WORKER_CONTEXT)


def generate_dataset(config: SamplerConfig, n_workers: int = None,
                     progress: bool = True) -> Tuple[List[LabeledRecord], GenerationSummary]:
    """
    Exactly `n_samples` labeled records in index order. Facets are cycled round-robin; record i only depends on
    (master_seed, i), so the result does not depend on the number of workers.
    """
    n_workers = get_settings().N_WORKERS if n_workers is None else n_workers
    summary = GenerationSummary(q2_filter=config.q2_filter)
    records = []
    indices = range(config.n_samples)

    def consume(results):
        if progress:
            results = tqdm(results, total=config.n_samples, desc=f'Sample {config.scenario}', unit='record',
                           file=sys.stdout, leave=False)
        for record, attempts, rejections in results:
            records.append(record)
            summary.add(attempts, rejections)
            if summary.attempts >= MIN_ATTEMPTS_BEFORE_ABORT and \
                    summary.failures > FAILURE_RATE_LIMIT * summary.attempts:
                raise GenerationAbortedError(summary.failures, summary.attempts, FAILURE_RATE_LIMIT)

    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers, initializer=_init_worker,
                                 initargs=(config, get_settings().dict())) as executor:
            consume(executor.map(_worker_record, indices, chunksize=16))
    else:
        context = _Context(config)
        consume(generate_record(i, context) for i in indices)

    if summary.q2_acceptance_rate is not None:
        warnings.warn(f'Q2 filter accepted {summary.q2_acceptance_rate:.1%} of {summary.attempts} sampled behaviors.')
    return records, summary


def split_dataset(records: List[LabeledRecord], train_fraction: float = 0.8,
                  seed: int = 0) -> Tuple[List[LabeledRecord], List[LabeledRecord]]:
    """Seeded shuffle, then the first floor(train_fraction·N) records are for training and validation."""
    if len(records) < 10:
        raise ValueError(f'at least 10 records are needed for a split, got {len(records)}')
    if not 0 < train_fraction < 1:
        raise ValueError(f'train fraction {train_fraction} outside (0, 1)')
    order = np.random.default_rng(seed).permutation(len(records))
    n_train = math.floor(round(train_fraction * len(records), 9))
    return [records[i] for i in order[:n_train]], [records[i] for i in order[n_train:]]
