import numpy as np
import pytest

from bellguess import (Activation, Dense, FacetClass, LabeledRecord, LayerSpec, MetricsReport, ModelKind, Network,
                       NetworkSpec, ScheduleVariant, TrainConfig, activate, bound_guessing_probability,
                       canonical_form, evaluate, evaluate_predictions, isotropic_behavior, learning_rate,
                       numerical_gradient, train, BellInequality)
from bellguess import get_settings
from bellguess.errors import DimensionMismatchError, TrainingDivergedError


def _records(pr_box, ch, n, p_guess=None, seed=0):
    rng = np.random.default_rng(seed)
    h, c = canonical_form(ch.h, ch.scenario)
    records = []
    for v in rng.uniform(0.6, 0.7, size=n):
        behavior = isotropic_behavior(pr_box, v)
        target = 0.5 + 0.5 * (0.7 - v) if p_guess is None else p_guess
        records.append(LabeledRecord(behavior=behavior, h=h, c=c, bell_value=behavior.value(h), p_guess=target,
                                     facet_class=FacetClass.CHSH, seed=0))
    return records


def _small_network(kind, scenario, seed=0):
    return Network.initialize(NetworkSpec.for_model(kind, scenario, trunk=(6, 5), branch=(4,)), seed=seed)


def test_activations():
    z = np.array([[0., -2., 3.]])
    assert activate(z, Activation.SIGMOID)[0, 0] == 0.5
    np.testing.assert_array_equal(activate(z, Activation.RELU), [[0., 0., 3.]])
    out = activate(z, Activation.LINEAR_SIGMOID)
    np.testing.assert_array_equal(out[0, :2], [0., -2.])
    assert 0.5 < out[0, 2] < 1


def test_hand_built_network():
    spec = NetworkSpec(kind=ModelKind.PGUESS, input_width=2, trunk=[LayerSpec(width=2)],
                       heads=[[LayerSpec(width=1, activation=Activation.LINEAR)]])
    trunk = [Dense(np.eye(2), np.zeros(2), Activation.RELU)]
    heads = [[Dense(np.ones((2, 1)), np.array([0.5]), Activation.LINEAR)]]
    network = Network(spec, trunk, heads)
    np.testing.assert_allclose(network.forward(np.array([[1., 2.], [-1., 2.]])), [[3.5], [2.5]])
    assert network.n_parameters == 9
    with pytest.raises(DimensionMismatchError):
        network.forward(np.zeros(3))


@pytest.mark.parametrize('kind', list(ModelKind))
def test_architectures(s22, kind):
    spec = NetworkSpec.for_model(kind, s22)
    assert spec.input_width == 16
    assert spec.output_width == (1 if kind is ModelKind.PGUESS else 17)
    network = Network.initialize(spec, seed=1)
    h, p_guess = network.predict(np.full(16, 1 / 4))
    assert p_guess.shape == (1,) and 0 < p_guess[0] < 1
    assert (h is None) == (kind is ModelKind.PGUESS)


@pytest.mark.parametrize('kind', list(ModelKind))
def test_gradients_match_finite_differences(s22, pr_box, ch, kind):
    network = _small_network(kind, s22, seed=2)
    records = _records(pr_box, ch, 5)
    rng = np.random.default_rng(4)
    x = np.array([r.behavior.p for r in records]) + rng.normal(0, 0.1, size=(5, 16))
    h = np.array([r.h for r in records]) if kind.predicts_inequality else None
    p_guess = np.array([r.p_guess for r in records])
    _, grads = network.loss_and_gradients(x, h, p_guess)
    analytic = np.concatenate([g.reshape(-1) for g in grads])
    indices = rng.choice(network.n_parameters, size=40, replace=False)
    numeric = numerical_gradient(network, x, h, p_guess, indices)
    np.testing.assert_allclose(analytic[indices], numeric, rtol=1e-4, atol=1e-8)


def test_learning_rate_schedule():
    config = TrainConfig(base_lr=1.)
    assert learning_rate(1, config) == 1.
    assert learning_rate(60, config) == 1.
    assert learning_rate(61, config) == pytest.approx(0.1)
    assert learning_rate(100, config) == pytest.approx(1e-4)
    assert learning_rate(101, config) == pytest.approx(1e-5)
    config = TrainConfig(base_lr=1., schedule=ScheduleVariant.AFTER_FIFTY)
    assert learning_rate(50, config) == 1.
    assert learning_rate(51, config) == pytest.approx(0.1)
    assert learning_rate(91, config) == pytest.approx(1e-5)


def test_training_learns_a_constant(s22, pr_box, ch):
    records = _records(pr_box, ch, 64, p_guess=0.7)
    network = _small_network(ModelKind.PGUESS, s22)
    config = TrainConfig(epochs=100, base_lr=1e-2, batch_size=8, schedule=ScheduleVariant.AFTER_FIFTY)
    history = train(network, records, config, progress=False)
    assert len(history.train_loss) == len(history.val_loss) == len(history.learning_rate) == 100
    assert history.train_loss[-1] < 0.1 * history.train_loss[0]
    held_out = _records(pr_box, ch, 32, p_guess=0.7, seed=1)
    _, predicted = network.predict(np.array([r.behavior.p for r in held_out]))
    assert np.abs(predicted - 0.7).max() < 1e-3


def test_training_is_deterministic(s22, pr_box, ch):
    records = _records(pr_box, ch, 20)
    config = TrainConfig(epochs=3, batch_size=8, seed=5)
    first, second = _small_network(ModelKind.NN2, s22), _small_network(ModelKind.NN2, s22)
    train(first, records, config, progress=False)
    train(second, records, config, progress=False)
    np.testing.assert_array_equal(first.get_flat(), second.get_flat())


def test_training_detects_divergence(s22, pr_box, ch):
    records = [r.copy(update=dict(p_guess=float('nan'))) for r in _records(pr_box, ch, 8)]
    with pytest.raises(TrainingDivergedError):
        train(_small_network(ModelKind.PGUESS, s22), records, TrainConfig(epochs=1), progress=False)


def test_hdf5_round_trip(tmp_path, s22):
    network = _small_network(ModelKind.NN1, s22, seed=9)
    network.to_hdf5(tmp_path / 'model.h5', metadata=dict(dataset_hash='abc'))
    loaded = Network.from_hdf5(tmp_path / 'model.h5')
    assert loaded.kind is ModelKind.NN1
    assert loaded.seed == 9
    assert loaded.metadata['dataset_hash'] == 'abc'
    x = np.random.default_rng(0).uniform(size=(3, 16))
    np.testing.assert_array_equal(loaded.forward(x), network.forward(x))
    with pytest.raises(FileNotFoundError):
        Network.from_hdf5(tmp_path / 'missing.h5')


@pytest.mark.parametrize('kind', list(ModelKind))
def test_predict_matches_forward(s22, kind):
    network = _small_network(kind, s22, seed=3)
    x = np.random.default_rng(1).uniform(size=(5, 16))
    out = network.forward(x)
    h, p_guess = network.predict(x)
    np.testing.assert_allclose(p_guess, out[:, -1], rtol=1e-5, atol=1e-6)
    if kind.predicts_inequality:
        np.testing.assert_allclose(h, out[:, :-1], rtol=1e-5, atol=1e-6)
    get_settings.set(INFERENCE_DTYPE='float64')
    try:
        h, p_guess = network.compile().predict(x)
        np.testing.assert_allclose(p_guess, out[:, -1], rtol=1e-12)
    finally:
        get_settings.set(INFERENCE_DTYPE='float32')
        network.compile()
    with pytest.raises(DimensionMismatchError):
        network.predict(np.zeros(3))


def test_predict_with_heads_of_different_depth(s22):
    spec = NetworkSpec(kind=ModelKind.NN2, input_width=16, trunk=[LayerSpec(width=6)],
                       heads=[[LayerSpec(width=4), LayerSpec(width=16, activation=Activation.LINEAR)],
                              [LayerSpec(width=1, activation=Activation.SIGMOID)]])
    network = Network.initialize(spec, seed=4)
    x = np.random.default_rng(2).uniform(size=(3, 16))
    h, p_guess = network.predict(x)
    np.testing.assert_allclose(np.column_stack([h, p_guess]), network.forward(x), rtol=1e-5, atol=1e-6)


def test_predict_follows_training(s22, pr_box, ch):
    records = _records(pr_box, ch, 16)
    network = _small_network(ModelKind.NN1, s22)
    x = np.array([r.behavior.p for r in records])
    before = network.predict(x)[1]
    train(network, records, TrainConfig(epochs=2, base_lr=1e-2, batch_size=4), progress=False)
    after = network.predict(x)[1]
    assert not np.allclose(before, after)
    np.testing.assert_allclose(after, network.forward(x)[:, -1], rtol=1e-5, atol=1e-6)


def test_prediction_errors(pr_box, ch):
    records = _records(pr_box, ch, 4, p_guess=0.5)
    h = np.array([r.h for r in records])
    report = evaluate_predictions(records, np.full(4, 0.6), h, resolve=False)
    assert report.mae_pg == pytest.approx(0.1)
    assert report.mse_pg == pytest.approx(0.01)
    assert report.mae_h == 0. and report.mse_h == 0.
    assert report.mae_pg_via_predicted_ineq is None
    assert MetricsReport.from_json(report.to_json()) == report


def test_resolving_with_exact_inequalities(s22, pr_box, ch):
    h, c = canonical_form(ch.h, s22)
    ineq = BellInequality(scenario=s22, h=h, c=c)
    records = []
    for record in _records(pr_box, ch, 3):
        bound = bound_guessing_probability(record.bell_value, ineq)
        records.append(record.copy(update=dict(p_guess=bound.p_guess)))
    labels = np.array([r.p_guess for r in records])
    report = evaluate_predictions(records, labels, np.array([r.h for r in records]), resolve=True)
    assert report.n_resolve_failures == 0
    assert report.frac_pg_lt_1 == 1.
    assert report.mae_pg_via_predicted_ineq == pytest.approx(0., abs=1e-6)
    # coefficients that the behavior does not violate give the trivial bound
    zero = evaluate_predictions(records, labels, np.zeros((3, 16)), resolve=True)
    assert zero.frac_pg_lt_1 == 0.


def test_evaluate_network(s22, pr_box, ch):
    records = _records(pr_box, ch, 4)
    report = evaluate(_small_network(ModelKind.PGUESS, s22), records)
    assert report.n_test == 4 and report.mae_h is None


@pytest.mark.slow
def test_loss_decreases_on_generated_data(s22, generated_22):
    network = Network.initialize(NetworkSpec.for_model(ModelKind.PGUESS, s22), seed=0)
    history = train(network, generated_22, TrainConfig(epochs=100, batch_size=16), progress=False)
    assert history.train_loss[99] <= history.train_loss[0]
    assert history.train_loss[99] < history.train_loss[9]
