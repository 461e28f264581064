import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, validator

from ..enums import FacetClass
from ..pydantic_utils import FrozenConfig, readonly
from ..scenario import Behavior, Scenario

__all__ = ['LabeledRecord', 'DatasetHeader', 'write_dataset', 'read_dataset', 'dataset_hash', 'stack',
           'FORMAT_VERSION', 'CANONICALIZATION']

FORMAT_VERSION = '1.0'
CANONICALIZATION = 'projection onto the local-polytope direction space, max|h|=1, 12 decimals, c=max_v h.v'
P_GUESS_SLACK = 1e-6  # solver noise below the 1/k floor


class LabeledRecord(BaseModel):
    """A sampled nonlocal behavior with its optimal separating inequality (h, c) and guessing-probability bound."""
    class Config(FrozenConfig):
        pass

    behavior: Behavior
    h: np.ndarray
    c: float
    bell_value: float
    p_guess: float
    facet_class: FacetClass
    seed: int

    @validator('h', pre=True)
    def to_readonly_array(cls, v):
        return readonly(v)

    @validator('bell_value')
    def check_violation(cls, v, values):
        if 'c' in values and not v > values['c']:
            raise ValueError(f'bell value {v} does not violate the classical bound {values["c"]}')
        return v

    @validator('p_guess')
    def check_guessing_range(cls, v, values):
        if 'behavior' in values:
            k = values['behavior'].scenario.k
            if not 1 / k - P_GUESS_SLACK <= v <= 1:
                raise ValueError(f'guessing probability {v} outside [1/{k}, 1]')
        return v

    @property
    def scenario(self) -> Scenario:
        return self.behavior.scenario

    def to_dict(self) -> Dict[str, Any]:
        return dict(scenario=self.scenario.to_list(), p=self.behavior.p.tolist(), h=self.h.tolist(), c=self.c,
                    bell_value=self.bell_value, p_guess=self.p_guess, facet_class=self.facet_class.value,
                    seed=self.seed)

    @classmethod
    def from_dict(cls, d: Dict[str, Any], validate: bool = True) -> 'LabeledRecord':
        scenario = Scenario(m=d['scenario'][0], k=d['scenario'][1])
        func = cls if validate else cls.construct
        bfunc = Behavior if validate else Behavior.construct
        behavior = bfunc(scenario=scenario, p=readonly(d['p']))
        return func(behavior=behavior, h=readonly(d['h']), c=d['c'], bell_value=d['bell_value'],
                    p_guess=d['p_guess'], facet_class=FacetClass(d['facet_class']), seed=d['seed'])


class DatasetHeader(BaseModel):
    format_version: str = FORMAT_VERSION
    master_seed: int
    config: Dict[str, Any]
    canonicalization: str = CANONICALIZATION
    summary: Optional[Dict[str, Any]] = None


def write_dataset(filename: Union[str, Path], header: DatasetHeader, records: Iterable[LabeledRecord]):
    """JSON lines: the header first, then one record per line in index order."""
    with open(filename, 'w') as f:
        f.write(json.dumps(dict(header=header.dict()), sort_keys=True) + '\n')
        for record in records:
            f.write(json.dumps(record.to_dict()) + '\n')


def read_dataset(filename: Union[str, Path], validate: bool = True) -> Tuple[Optional[DatasetHeader],
                                                                             List[LabeledRecord]]:
    if not Path(filename).is_file():
        raise FileNotFoundError("File {} not found".format(filename))
    header, records = None, []
    with open(filename, 'r') as f:
        for line in f:
            if not line.strip():
                continue
            d = json.loads(line)
            if 'header' in d:
                header = DatasetHeader(**d['header'])
            else:
                records.append(LabeledRecord.from_dict(d, validate=validate))
    return header, records


def dataset_hash(filename: Union[str, Path]) -> str:
    sha = hashlib.sha256()
    with open(filename, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            sha.update(chunk)
    return sha.hexdigest()


def stack(records: List[LabeledRecord]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Behavior matrix, coefficient matrix and guessing-probability vector of a list of records."""
    p = np.array([r.behavior.p for r in records])
    h = np.array([r.h for r in records])
    p_guess = np.array([r.p_guess for r in records])
    return p, h, p_guess
