"""
End-to-end run: facets -> sampling and labeling -> split -> training of the three models -> evaluation ->
benchmarks. Configured by a key-value text file, one `key = value` per line, `#` starts a comment:

    scenario = 2,2
    n_samples = 1000
    seed = 7
    epochs = 10
    models = pguess, nn1, nn2

Every artifact carries the sha256 hash of the validated configuration.
"""
import hashlib
import json
from pathlib import Path
from typing import Dict, List, Union

import parse
from pydantic import BaseModel, confloat, conint, validator

from .bench import bench_bell_lp, bench_pguess
from .dataset import DatasetHeader, SamplerConfig, dataset_hash, generate_dataset, split_dataset, write_dataset
from .enums import ModelKind, ScheduleVariant
from .errors import PipelineStageError
from .polytope import generate_facets, write_facets
from .scenario import Scenario
from .surrogate import Network, NetworkSpec, TrainConfig, evaluate, train

__all__ = ['PipelineConfig', 'parse_config', 'load_config', 'config_hash', 'run_pipeline']


class PipelineConfig(BaseModel):
    scenario: Scenario
    n_samples: conint(ge=10) = 1000
    seed: conint(ge=0) = 0
    q2_filter: bool = True
    train_fraction: confloat(gt=0, lt=1) = 0.8
    epochs: conint(ge=1) = 100
    batch_size: conint(ge=1) = 128
    base_lr: confloat(gt=0) = 1e-3
    schedule: ScheduleVariant = ScheduleVariant.EVERY_TENTH
    validation_fraction: confloat(ge=0, lt=1) = 0.125
    models: List[ModelKind] = [ModelKind.PGUESS, ModelKind.NN1, ModelKind.NN2]
    resolve: bool = True
    bench_samples: conint(ge=0) = 100
    n_workers: conint(ge=1) = 1

    @validator('scenario', pre=True)
    def parse_scenario(cls, v):
        return Scenario.from_string(v) if isinstance(v, str) else v

    @validator('models', pre=True)
    def split_models(cls, v):
        return [m.strip() for m in v.split(',') if m.strip()] if isinstance(v, str) else v

    def echo(self) -> Dict:
        d = json.loads(self.json())
        d['scenario'] = self.scenario.to_list()
        return d


def parse_config(text: str) -> PipelineConfig:
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        result = parse.parse('{key}={value}', line)
        if result is None:
            raise ValueError(f'config line {number}: expected "key = value", got {line!r}')
        values[result['key'].strip()] = result['value'].strip()
    return PipelineConfig(**values)


def load_config(filename: Union[str, Path]) -> PipelineConfig:
    if not Path(filename).is_file():
        raise FileNotFoundError("File {} not found".format(filename))
    with open(filename, 'r') as f:
        return parse_config(f.read())


def config_hash(config: PipelineConfig) -> str:
    return hashlib.sha256(json.dumps(config.echo(), sort_keys=True).encode()).hexdigest()


def _write_json(path: Path, content: Dict):
    with open(path, 'w') as f:
        json.dump(content, f, indent=2, sort_keys=True)


def run_pipeline(config: Union[PipelineConfig, str, Path], out_dir: Union[str, Path],
                 progress: bool = False) -> Dict[str, str]:
    """Runs every stage and returns the manifest {artifact name: path}, which is also written to manifest.json."""
    if not isinstance(config, PipelineConfig):
        config = load_config(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = dict(config_hash=config_hash(config), config=config.echo())
    manifest: Dict[str, str] = {}
    stage = 'facets'
    try:
        facets = generate_facets(config.scenario)
        manifest['facets'] = str(out_dir / 'facets.jsonl')
        write_facets(manifest['facets'], facets)

        stage = 'sample'
        sampler = SamplerConfig(scenario=config.scenario, n_samples=config.n_samples, master_seed=config.seed,
                                facets_file=manifest['facets'], q2_filter=config.q2_filter)
        records, summary = generate_dataset(sampler, n_workers=config.n_workers, progress=progress)
        echo = {**sampler.echo(), **stamp}
        echo['facets_file'] = 'facets.jsonl'

        stage = 'split'
        train_val, test = split_dataset(records, config.train_fraction, seed=config.seed)
        for name, subset in (('dataset', records), ('train', train_val), ('test', test)):
            manifest[name] = str(out_dir / f'{name}.jsonl')
            write_dataset(manifest[name], DatasetHeader(master_seed=config.seed, config=echo,
                                                        summary=summary.to_dict()), subset)
        data_hash = dataset_hash(manifest['dataset'])

        networks = {}
        train_config = TrainConfig(epochs=config.epochs, base_lr=config.base_lr, schedule=config.schedule,
                                   batch_size=config.batch_size, seed=config.seed,
                                   validation_fraction=config.validation_fraction)
        for kind in config.models:
            stage = f'train:{kind.value}'
            network = Network.initialize(NetworkSpec.for_model(kind, config.scenario), seed=config.seed)
            history = train(network, train_val, train_config, progress=progress)
            manifest[f'model:{kind.value}'] = str(out_dir / f'model_{kind.value}.h5')
            network.to_hdf5(manifest[f'model:{kind.value}'],
                            metadata=dict(dataset_hash=data_hash, loss_history=history.dict(), **stamp))
            networks[kind] = network

        stage = 'eval'
        report = dict(stamp)
        for kind, network in networks.items():
            report[kind.value] = evaluate(network, test, resolve=config.resolve).dict()
        manifest['report'] = str(out_dir / 'report.json')
        _write_json(Path(manifest['report']), report)

        if config.bench_samples:
            n = min(config.bench_samples, len(test))
            if ModelKind.PGUESS in networks:
                stage = 'bench:pguess'
                bench = bench_pguess(test, networks[ModelKind.PGUESS], n, progress=progress)
                manifest['bench:pguess'] = str(out_dir / 'bench_pguess.json')
                _write_json(Path(manifest['bench:pguess']), {**bench.dict(), **stamp})
            joint = [kind for kind in (ModelKind.NN2, ModelKind.NN1) if kind in networks]
            if joint:
                stage = 'bench:bell_lp'
                bench = bench_bell_lp(test, networks[joint[0]], n, progress=progress)
                manifest['bench:bell_lp'] = str(out_dir / 'bench_bell_lp.json')
                _write_json(Path(manifest['bench:bell_lp']), {**bench.dict(), **stamp})
    except Exception as e:
        raise PipelineStageError(stage, manifest) from e

    _write_json(out_dir / 'manifest.json', dict(artifacts=manifest, **stamp))
    return manifest
