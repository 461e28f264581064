import numpy as np
import pytest

from bellguess import (Behavior, BellInequality, FacetClass, LabeledRecord, RejectReason, SamplerConfig, DatasetHeader,
                       GenerationSummary, bound_guessing_probability, build_moment_structure, enumerate_vertices,
                       generate_dataset, generate_facets, get_solver, read_dataset, record_seed, sample_behavior,
                       spanning_vertices, split_dataset, weighted_vertex_mixture, write_dataset, write_facets,
                       dataset_hash, stack)
from bellguess.dataset.generation import _Context, label_behavior


@pytest.fixture(scope='module')
def spanning(ch):
    return spanning_vertices(ch, enumerate_vertices(ch.scenario))


@pytest.fixture(scope='module')
def small_config(s22):
    return SamplerConfig(scenario=s22, n_samples=6, master_seed=7)


@pytest.fixture(scope='module')
def small_dataset(small_config):
    with pytest.warns(UserWarning, match='Q2 filter accepted'):
        return generate_dataset(small_config, n_workers=1, progress=False)


def test_vertex_mixture_endpoints(ch, ch_pr_box, spanning):
    n = len(spanning)
    pure = weighted_vertex_mixture(ch_pr_box, spanning, 1., np.zeros(n))
    np.testing.assert_allclose(pure.p, ch_pr_box.p)
    weights = np.zeros(n)
    weights[3] = 1.
    vertex = weighted_vertex_mixture(ch_pr_box, spanning, 0., weights)
    np.testing.assert_allclose(vertex.p, spanning[3].behavior.p)
    assert ch.value(vertex) == pytest.approx(ch.c)


def test_vertex_mixture_with_equal_weights(ch, ch_pr_box, spanning):
    mixed = weighted_vertex_mixture(ch_pr_box, spanning, 0.4, np.full(len(spanning), 0.4))
    assert ch.value(mixed) == pytest.approx(0.25)


def test_vertex_mixture_arguments(ch_pr_box, spanning):
    with pytest.raises(ValueError):
        weighted_vertex_mixture(ch_pr_box, spanning, 1., np.ones(3))
    with pytest.raises(ValueError):
        weighted_vertex_mixture(ch_pr_box, [], 1., [])


def test_sampled_behaviors_lie_above_the_facet(ch, ch_pr_box, spanning):
    rng = np.random.default_rng(0)
    for _ in range(50):
        behavior = sample_behavior(ch, spanning, ch_pr_box, rng)
        assert ch.c <= ch.value(behavior) <= ch.value(ch_pr_box) + 1e-12


def test_record_seed():
    assert record_seed(1, 5) == record_seed(1, 5)
    seeds = {record_seed(1, i) for i in range(100)} | {record_seed(2, i) for i in range(100)}
    assert len(seeds) == 200
    assert all(0 <= s < 2 ** 64 for s in seeds)


def test_labeling_rejections(s22, pr_box, small_config):
    context = _Context(small_config)
    assert label_behavior(Behavior.uniform(s22), context) is RejectReason.LOCAL
    assert label_behavior(pr_box, context) is RejectReason.NOT_Q2


def test_generated_records(small_dataset, small_config):
    records, summary = small_dataset
    assert len(records) == 6
    assert summary.accepted == 6 and summary.attempts >= 6
    for i, record in enumerate(records):
        assert record.seed == record_seed(small_config.master_seed, i)
        assert record.facet_class is FacetClass.CHSH
        assert 0.5 - 1e-6 <= record.p_guess < 1
        assert record.bell_value > record.c
        assert record.bell_value == pytest.approx(record.behavior.value(record.h))
        assert np.abs(record.h).max() == pytest.approx(1.)


def _assert_labels_reproduce(records):
    structure = build_moment_structure(records[0].scenario, 2)
    solver = get_solver()
    for record in records:
        ineq = BellInequality(scenario=record.scenario, h=record.h, c=record.c)
        bound = bound_guessing_probability(record.bell_value, ineq, structure=structure, solver=solver)
        assert bound.p_guess == pytest.approx(record.p_guess, abs=1e-6)


def test_labels_reproduce(small_dataset):
    _assert_labels_reproduce(small_dataset[0])


def test_record_invariants_are_validated(small_dataset):
    d = small_dataset[0][0].to_dict()
    with pytest.raises(ValueError, match='classical bound'):
        LabeledRecord.from_dict({**d, 'bell_value': d['c']})
    with pytest.raises(ValueError, match='guessing probability'):
        LabeledRecord.from_dict({**d, 'p_guess': 0.4})
    with pytest.raises(ValueError, match='guessing probability'):
        LabeledRecord.from_dict({**d, 'p_guess': 1.01})
    assert LabeledRecord.from_dict({**d, 'p_guess': 0.4}, validate=False).p_guess == 0.4


def test_generation_is_reproducible(tmp_path, small_dataset, small_config):
    with pytest.warns(UserWarning):
        again, _ = generate_dataset(small_config, n_workers=1, progress=False)
    records, summary = small_dataset
    header = DatasetHeader(master_seed=small_config.master_seed, config=small_config.echo(), summary=summary.to_dict())
    write_dataset(tmp_path / 'first.jsonl', header, records)
    write_dataset(tmp_path / 'second.jsonl', header, again)
    assert dataset_hash(tmp_path / 'first.jsonl') == dataset_hash(tmp_path / 'second.jsonl')

    loaded_header, loaded = read_dataset(tmp_path / 'first.jsonl')
    assert loaded_header.master_seed == 7
    assert loaded_header.config['scenario'] == [2, 2]
    p, h, p_guess = stack(loaded)
    assert p.shape == h.shape == (6, 16)
    np.testing.assert_array_equal(p_guess, [r.p_guess for r in records])


def test_generation_from_facet_file(tmp_path, s22):
    write_facets(tmp_path / 'facets.jsonl', generate_facets(s22)[:2])
    config = SamplerConfig(scenario=s22, n_samples=2, master_seed=1, facets_file=tmp_path / 'facets.jsonl',
                           q2_filter=False)
    records, summary = generate_dataset(config, n_workers=1, progress=False)
    assert len(records) == 2
    assert summary.q2_acceptance_rate is None
    assert RejectReason.NOT_Q2 not in summary.rejections


def test_without_q2_filter_labels_can_be_infeasible(s22):
    config = SamplerConfig(scenario=s22, n_samples=8, master_seed=1, q2_filter=False)
    records, summary = generate_dataset(config, n_workers=1, progress=False)
    assert len(records) == 8
    # Bell values beyond the quantum maximum have no guessing-probability program
    assert summary.rejections.get(RejectReason.INFEASIBLE, 0) > 0
    assert RejectReason.NOT_Q2 not in summary.rejections


def test_summary():
    summary = GenerationSummary()
    summary.add(3, {RejectReason.NOT_Q2: 1, RejectReason.LOCAL: 1})
    summary.add(2, {RejectReason.NOT_Q2: 1})
    assert summary.to_dict() == dict(attempts=5, accepted=2, rejections=dict(local=1, not_q2=2),
                                     q2_acceptance_rate=pytest.approx(0.6))
    assert summary.failures == 0


@pytest.mark.parametrize('n, expected', [(100, (80, 20)), (10, (8, 2)), (11, (8, 3))])
def test_split_sizes(n, expected):
    train, test = split_dataset(list(range(n)), 0.8, seed=3)
    assert (len(train), len(test)) == expected
    assert sorted(train + test) == list(range(n))
    assert split_dataset(list(range(n)), 0.8, seed=3) == (train, test)


def test_split_needs_ten_records():
    with pytest.raises(ValueError):
        split_dataset(list(range(9)))


@pytest.mark.slow
def test_generation_does_not_depend_on_workers(small_config):
    with pytest.warns(UserWarning):
        serial, _ = generate_dataset(small_config, n_workers=1, progress=False)
        parallel, _ = generate_dataset(small_config, n_workers=2, progress=False)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


@pytest.mark.slow
def test_label_audit(generated_22):
    assert len(generated_22) == 100
    _assert_labels_reproduce(generated_22)


@pytest.mark.slow
def test_three_setting_generation(tmp_path, s32):
    facets = generate_facets(s32)
    chsh = [f for f in facets if f.facet_class is FacetClass.CHSH]
    i3322 = [f for f in facets if f.facet_class is FacetClass.I3322]
    assert (len(chsh), len(i3322)) == (72, 576)
    write_facets(tmp_path / 'facets.jsonl', chsh[:2] + i3322[:2])
    config = SamplerConfig(scenario=s32, n_samples=8, master_seed=5, facets_file=tmp_path / 'facets.jsonl')
    with pytest.warns(UserWarning, match='Q2 filter accepted'):
        records, summary = generate_dataset(config, n_workers=1, progress=False)
        again, _ = generate_dataset(config, n_workers=1, progress=False)
    assert [r.facet_class for r in records] == [FacetClass.CHSH] * 2 + [FacetClass.I3322] * 2 + \
        [FacetClass.CHSH] * 2 + [FacetClass.I3322] * 2
    assert 0 < summary.q2_acceptance_rate <= 1
    for record in records:
        assert record.bell_value > record.c
        assert 0.5 - 1e-6 <= record.p_guess < 1
    _assert_labels_reproduce(records)

    header = DatasetHeader(master_seed=5, config=config.echo())
    write_dataset(tmp_path / 'first.jsonl', header, records)
    write_dataset(tmp_path / 'second.jsonl', header, again)
    assert dataset_hash(tmp_path / 'first.jsonl') == dataset_hash(tmp_path / 'second.jsonl')
