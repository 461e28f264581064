import json
from pathlib import Path
from typing import Optional

import typer

from .bench import bench_bell_lp, bench_pguess
from .dataset import DatasetHeader, SamplerConfig, generate_dataset, read_dataset, dataset_hash, write_dataset
from .enums import ModelKind, ScheduleVariant
from .errors import InvalidBehaviorError
from .npa import bound_guessing_probability, build_moment_structure, guessing_problem, q2_problem
from .optimization import find_optimal_bell_inequality
from .pipeline import run_pipeline
from .polytope import BellInequality, canonical_chsh, generate_facets, write_facets
from .scenario import Behavior, Scenario, enumerate_vertices
from .settings import get_settings
from .surrogate import Network, NetworkSpec, TrainConfig, evaluate, train

app = typer.Typer(help='Bell-scenario toolkit: facets, separating LPs, NPA guessing-probability bounds and '
                       'neural-network surrogates.')
npa_app = typer.Typer(help='NPA relaxations.')
app.add_typer(npa_app, name='npa')

state = dict(seed=0, out_dir=Path('.'))


def _out(path: Path) -> Path:
    path = Path(path)
    if not path.is_absolute():
        path = state['out_dir'] / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _scenario(text: str) -> Scenario:
    try:
        return Scenario.from_string(text)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from e


def _read_json(path: Path):
    with open(path, 'r') as f:
        return json.load(f)


def _read_behavior(path: Path) -> Behavior:
    d = _read_json(path)
    return Behavior(scenario=Scenario(m=d['scenario'][0], k=d['scenario'][1]), p=d['p'])


def _success(message: str):
    typer.echo(typer.style(message, fg=typer.colors.GREEN, bold=True), err=True)


@app.callback()
def main(seed: int = typer.Option(0, help='Seed used by commands that do not get their own.'),
         threads: Optional[int] = typer.Option(None, help='Worker processes for dataset generation.'),
         out_dir: Path = typer.Option(Path('.'), help='Directory that relative output paths refer to.')):
    state['seed'] = seed
    state['out_dir'] = out_dir
    get_settings.set(N_WORKERS=threads)


@app.command('vertices')
def vertices(scenario: str = typer.Option('2,2', help='Scenario "m,k".'),
             out: Optional[Path] = typer.Option(None, help='JSONL file; printed if omitted.')):
    """Enumerates the deterministic local vertices."""
    lines = [json.dumps(dict(alice=list(v.alice_map), bob=list(v.bob_map), p=v.behavior.p.tolist()))
             for v in enumerate_vertices(_scenario(scenario))]
    if out is None:
        typer.echo('\n'.join(lines))
    else:
        with open(_out(out), 'w') as f:
            f.write('\n'.join(lines) + '\n')
        _success(f'Wrote {len(lines)} vertices to {_out(out)}')


@app.command('facets')
def facets(scenario: str = typer.Option('2,2'), out: Path = typer.Option(Path('facets.jsonl'))):
    """Generates all facet Bell inequalities of [2,2] or [3,2]."""
    result = generate_facets(_scenario(scenario), progress=True)
    write_facets(_out(out), result)
    _success(f'Wrote {len(result)} facets to {_out(out)}')


@app.command('separate')
def separate(behavior: Path = typer.Option(..., exists=True, readable=True, dir_okay=False,
                                           help='JSON {"scenario": [m, k], "p": [...]}')):
    """Optimal separating Bell inequality of a behavior."""
    try:
        solution = find_optimal_bell_inequality(_read_behavior(behavior))
    except InvalidBehaviorError as e:
        raise typer.BadParameter(str(e), param_hint='--behavior') from e
    typer.echo(json.dumps(solution.to_dict()))


@app.command('pguess')
def pguess(ineq: Path = typer.Option(..., exists=True, readable=True, dir_okay=False,
                                     help='JSON {"scenario", "h", "c"}'),
           value: float = typer.Option(..., help='Observed Bell value.'),
           setting: int = typer.Option(1, help="Alice's setting Eve guesses.")):
    """Guessing-probability bound at a given Bell value."""
    inequality = BellInequality.from_dict(_read_json(ineq))
    typer.echo(json.dumps(bound_guessing_probability(value, inequality, setting).to_dict()))


@app.command('sample')
def sample(scenario: str = typer.Option('2,2'), n: int = typer.Option(1000, help='Number of records.'),
           seed: Optional[int] = typer.Option(None, help='Master seed (defaults to the global --seed).'),
           facets_file: Optional[Path] = typer.Option(None, '--facets', exists=True, dir_okay=False),
           q2_filter: bool = typer.Option(True),
           out: Path = typer.Option(Path('data.jsonl'))):
    """Samples and labels a dataset."""
    seed = state['seed'] if seed is None else seed
    config = SamplerConfig(scenario=_scenario(scenario), n_samples=n, master_seed=seed, facets_file=facets_file,
                           q2_filter=q2_filter)
    records, summary = generate_dataset(config)
    write_dataset(_out(out), DatasetHeader(master_seed=seed, config=config.echo(), summary=summary.to_dict()),
                  records)
    _success(f'Wrote {len(records)} records to {_out(out)} ({summary.attempts} attempts, rejections: '
             f'{summary.to_dict()["rejections"]})')


@app.command('train')
def train_command(data: Path = typer.Option(..., exists=True, dir_okay=False),
                  model: ModelKind = typer.Option(ModelKind.PGUESS),
                  out: Path = typer.Option(Path('model.h5')),
                  epochs: int = typer.Option(100), batch_size: int = typer.Option(128),
                  lr: float = typer.Option(1e-3), schedule: ScheduleVariant = typer.Option(ScheduleVariant.EVERY_TENTH),
                  validation_fraction: float = typer.Option(0.125)):
    """Trains a surrogate model on a dataset."""
    _, records = read_dataset(data)
    config = TrainConfig(epochs=epochs, batch_size=batch_size, base_lr=lr, schedule=schedule, seed=state['seed'],
                         validation_fraction=validation_fraction)
    network = Network.initialize(NetworkSpec.for_model(model, records[0].scenario), seed=state['seed'])
    history = train(network, records, config)
    network.to_hdf5(_out(out), metadata=dict(dataset_hash=dataset_hash(data), loss_history=history.dict()))
    _success(f'Trained {model.value}: final loss {history.train_loss[-1]:.3e}; saved to {_out(out)}')


@app.command('predict')
def predict(model: Path = typer.Option(..., exists=True, dir_okay=False),
            behavior: Path = typer.Option(..., exists=True, dir_okay=False)):
    """Predicts the guessing probability (and Bell coefficients) of a behavior."""
    network = Network.from_hdf5(model)
    h, p_guess = network.predict(_read_behavior(behavior).p)
    output = dict(p_guess=float(p_guess[0]))
    if h is not None:
        output['h'] = h[0].tolist()
    typer.echo(json.dumps(output))


@app.command('eval')
def eval_command(model: Path = typer.Option(..., exists=True, dir_okay=False),
                 data: Path = typer.Option(..., exists=True, dir_okay=False),
                 report: Path = typer.Option(Path('report.json')),
                 resolve: bool = typer.Option(True, help='Re-solve the SDP with predicted inequalities.')):
    """Evaluates a model on a test set."""
    _, records = read_dataset(data)
    metrics = evaluate(Network.from_hdf5(model), records, resolve=resolve, progress=True)
    with open(_out(report), 'w') as f:
        f.write(metrics.to_json(indent=2))
    typer.echo(metrics.to_json())


@app.command('bench')
def bench(model: Path = typer.Option(..., exists=True, dir_okay=False),
          data: Path = typer.Option(..., exists=True, dir_okay=False),
          n: int = typer.Option(100), method: str = typer.Option('pguess', help='pguess (LP+SDP) or bell_lp.'),
          report: Path = typer.Option(Path('bench.json'))):
    """Per-sample runtime of the solvers against the network."""
    _, records = read_dataset(data)
    network = Network.from_hdf5(model)
    if method == 'pguess':
        result = bench_pguess(records, network, n)
    elif method == 'bell_lp':
        result = bench_bell_lp(records, network, n)
    else:
        raise typer.BadParameter(f'unknown method {method!r}; use pguess or bell_lp')
    with open(_out(report), 'w') as f:
        f.write(result.to_json(indent=2))
    _success(f'{method}: solver {result.solver_mean_s * 1e3:.3f} ms, network {result.nn_mean_s * 1e6:.1f} µs per '
             f'sample, speed-up {result.speed_up:.0f}x')


@app.command('pipeline')
def pipeline(config: Path = typer.Argument(..., exists=True, readable=True, dir_okay=False)):
    """Runs facets, sampling, training, evaluation and benchmarks from a key-value config file."""
    manifest = run_pipeline(config, state['out_dir'], progress=True)
    typer.echo(json.dumps(manifest, indent=2))


@npa_app.command('export')
def npa_export(scenario: str = typer.Option('2,2'), problem: str = typer.Option('guess', help='guess or q2'),
               level: int = typer.Option(2), fmt: str = typer.Option('sdpa', '--format'),
               ineq: Optional[Path] = typer.Option(None, exists=True, dir_okay=False,
                                                   help='Inequality for `guess` (default: CH).'),
               value: float = typer.Option(0.2, help='Bell value for `guess`.'),
               behavior: Optional[Path] = typer.Option(None, exists=True, dir_okay=False,
                                                       help='Behavior for `q2` (default: uniform).'),
               out: Optional[Path] = typer.Option(None)):
    """Writes a guessing-probability or Q2-membership SDP in SDPA sparse format."""
    if fmt.lower() != 'sdpa':
        raise typer.BadParameter(f'unsupported format {fmt!r}; only sdpa is available')
    parsed = _scenario(scenario)
    structure = build_moment_structure(parsed, level)
    if problem == 'guess':
        inequality = canonical_chsh(parsed) if ineq is None else BellInequality.from_dict(_read_json(ineq))
        sdp = guessing_problem(inequality, value, structure)
        comment = f'guessing probability, scenario {parsed}, NPA level {level}, Bell value {value}'
    elif problem == 'q2':
        b = Behavior.uniform(parsed) if behavior is None else _read_behavior(behavior)
        sdp = q2_problem(b, structure)
        comment = f'Q{level} membership (maximize 1 + smallest eigenvalue), scenario {parsed}'
    else:
        raise typer.BadParameter(f'unknown problem {problem!r}; use guess or q2')
    if out is None:
        typer.echo(sdp.to_sdpa_string(comment=comment), nl=False)
    else:
        sdp.to_sdpa(_out(out), comment=comment)
        _success(f'Wrote {sdp.n_constraints} constraints over blocks {list(sdp.block_sizes)} to {_out(out)}')


@app.command('version')
def version():
    """Prints the package version."""
    from . import __version__
    typer.echo(__version__)


if __name__ == "__main__":
    app()
