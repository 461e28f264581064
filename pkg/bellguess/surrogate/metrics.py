import json
import sys
from typing import List, Optional

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from .network import Network
from ..dataset import LabeledRecord, stack
from ..npa import MomentStructure, bound_guessing_probability, build_moment_structure
from ..optimization import SdpSolver, get_solver
from ..polytope import BellInequality, classical_bound
from ..settings import get_settings

__all__ = ['MetricsReport', 'evaluate_predictions', 'evaluate', 'resolve_guessing_probability']


class MetricsReport(BaseModel):
    n_test: int
    mae_pg: float
    mse_pg: float
    mae_h: Optional[float] = None
    mse_h: Optional[float] = None
    frac_pg_lt_1: Optional[float] = None
    mae_pg_via_predicted_ineq: Optional[float] = None
    mse_pg_via_predicted_ineq: Optional[float] = None
    n_resolve_failures: int = 0

    def to_json(self, **kwargs) -> str:
        return self.json(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> 'MetricsReport':
        return cls(**json.loads(text))


def resolve_guessing_probability(record: LabeledRecord, h: np.ndarray, guessed_setting: int = 1,
                                 structure: MomentStructure = None, solver: SdpSolver = None) -> Optional[float]:
    """
    Guessing-probability bound of the record's behavior when the (predicted) coefficients `h` are used as Bell
    inequality; the classical bound of `h` is recomputed by brute force. None if the SDP fails.
    """
    scenario = record.scenario
    c = classical_bound(h, scenario)
    bell_value = record.behavior.value(h)
    if bell_value <= c:
        return 1.
    ineq = BellInequality(scenario=scenario, h=h, c=c)
    bound = bound_guessing_probability(bell_value, ineq, guessed_setting, structure, solver)
    return bound.p_guess if bound.status.solved else None


def evaluate_predictions(records: List[LabeledRecord], pred_pg: np.ndarray, pred_h: np.ndarray = None,
                         resolve: bool = True, guessed_setting: int = 1, progress: bool = False) -> MetricsReport:
    """
    Errors of predicted guessing probabilities and, if given, predicted Bell coefficients (averaged over all m²k²
    coefficients and samples). With `resolve`, the SDP is solved again with every predicted inequality.
    """
    if not records:
        raise ValueError('cannot evaluate on an empty test set')
    _, h, p_guess = stack(records)
    pred_pg = np.asarray(pred_pg, dtype=np.float64).reshape(-1)
    residual = pred_pg - p_guess
    report = dict(n_test=len(records), mae_pg=float(np.mean(np.abs(residual))), mse_pg=float(np.mean(residual ** 2)))
    if pred_h is None:
        return MetricsReport(**report)

    pred_h = np.asarray(pred_h, dtype=np.float64)
    report.update(mae_h=float(np.mean(np.abs(pred_h - h))), mse_h=float(np.mean((pred_h - h) ** 2)))
    if not resolve:
        return MetricsReport(**report)

    structure = build_moment_structure(records[0].scenario, 2)
    solver = get_solver()
    resolved, labels = [], []
    items = zip(records, pred_h)
    if progress:
        items = tqdm(items, total=len(records), desc='Re-solve with predicted inequalities', unit='sample',
                     file=sys.stdout, leave=False)
    for record, coefficients in items:
        value = resolve_guessing_probability(record, coefficients, guessed_setting, structure, solver)
        if value is not None:
            resolved.append(value)
            labels.append(record.p_guess)
    resolved, labels = np.array(resolved), np.array(labels)
    report['n_resolve_failures'] = len(records) - len(resolved)
    if len(resolved):
        report.update(frac_pg_lt_1=float(np.mean(resolved < 1 - get_settings().TRIVIAL_GUESS_TOL)),
                      mae_pg_via_predicted_ineq=float(np.mean(np.abs(resolved - labels))),
                      mse_pg_via_predicted_ineq=float(np.mean((resolved - labels) ** 2)))
    return MetricsReport(**report)


def evaluate(network: Network, records: List[LabeledRecord], resolve: bool = True,
             progress: bool = False) -> MetricsReport:
    p, _, _ = stack(records)
    pred_h, pred_pg = network.predict(p)
    return evaluate_predictions(records, pred_pg, pred_h, resolve=resolve, progress=progress)
