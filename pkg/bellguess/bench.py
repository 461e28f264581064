import json
import platform
import sys
import time
from typing import Callable, Dict, List

import numpy as np
from pydantic import BaseModel, validator
from tqdm import tqdm

from .dataset import LabeledRecord
from .enums import LpStatus
from .npa import bound_guessing_probability, build_moment_structure
from .optimization import find_optimal_bell_inequality, get_solver
from .surrogate import Network

__all__ = ['BenchReport', 'bench_pguess', 'bench_bell_lp', 'hardware_note']

PROTOCOL = ('per-sample wall time (time.perf_counter), single thread; model loading, moment-structure and vertex '
            'enumeration excluded; one untimed warm-up call per path')


class BenchReport(BaseModel):
    method: str
    n_samples: int
    solver_mean_s: float
    solver_median_s: float
    nn_mean_s: float
    nn_median_s: float
    speed_up: float
    n_solver_failures: int = 0
    hardware: str
    protocol: str = PROTOCOL
    config: Dict = {}

    @validator('solver_mean_s', 'solver_median_s', 'nn_mean_s', 'nn_median_s')
    def check_positive(cls, v):
        if v <= 0:
            raise ValueError('timings must be positive')
        return v

    def to_json(self, **kwargs) -> str:
        return self.json(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> 'BenchReport':
        return cls(**json.loads(text))


def hardware_note() -> str:
    return f'{platform.platform()}; {platform.processor() or platform.machine()}; python {platform.python_version()}; ' \
           f'numpy {np.__version__}'


def _time(function: Callable, inputs: List, desc: str, progress: bool):
    times, failures = [], 0
    function(inputs[0])
    if progress:
        inputs = tqdm(inputs, desc=desc, unit='sample', file=sys.stdout, leave=False)
    for item in inputs:
        start = time.perf_counter()
        ok = function(item)
        elapsed = time.perf_counter() - start
        if ok is False:
            failures += 1
        else:
            times.append(elapsed)
    return np.array(times), failures


def _report(method, solver_times, nn_times, failures, n, config) -> BenchReport:
    if len(solver_times) == 0:
        raise RuntimeError(f'every solver call failed while benchmarking {method}')
    return BenchReport(method=method, n_samples=n, solver_mean_s=float(solver_times.mean()),
                       solver_median_s=float(np.median(solver_times)), nn_mean_s=float(nn_times.mean()),
                       nn_median_s=float(np.median(nn_times)),
                       speed_up=float(solver_times.mean() / nn_times.mean()), n_solver_failures=failures,
                       hardware=hardware_note(), config=config)


def _check(records: List[LabeledRecord], n: int):
    if not 1 <= n <= len(records):
        raise ValueError(f'cannot benchmark {n} samples out of {len(records)} records')
    return [r.behavior for r in records[:n]]


def bench_pguess(records: List[LabeledRecord], network: Network, n: int, guessed_setting: int = 1,
                 progress: bool = True) -> BenchReport:
    """Two-step labeling (LP then SDP) against one forward pass, on the same n behaviors."""
    behaviors = _check(records, n)
    structure = build_moment_structure(behaviors[0].scenario, 2)
    solver = get_solver()

    def label(behavior):
        lp = find_optimal_bell_inequality(behavior)
        if lp.status is not LpStatus.OPTIMAL:
            return False
        ineq = lp.inequality
        return bound_guessing_probability(ineq.value(behavior), ineq, guessed_setting, structure,
                                          solver).status.solved

    solver_times, failures = _time(label, behaviors, 'Bench LP+SDP', progress)
    nn_times, _ = _time(lambda b: network.predict(b.p), behaviors, 'Bench network', progress)
    return _report('pguess', solver_times, nn_times, failures, n,
                   dict(model=network.kind.value, guessed_setting=guessed_setting))


def bench_bell_lp(records: List[LabeledRecord], network: Network, n: int, progress: bool = True) -> BenchReport:
    """Separating LP against one forward pass, on the same n behaviors."""
    behaviors = _check(records, n)
    solver_times, failures = _time(lambda b: find_optimal_bell_inequality(b).status is LpStatus.OPTIMAL,
                                   behaviors, 'Bench LP', progress)
    nn_times, _ = _time(lambda b: network.predict(b.p), behaviors, 'Bench network', progress)
    return _report('bell_lp', solver_times, nn_times, failures, n, dict(model=network.kind.value))
