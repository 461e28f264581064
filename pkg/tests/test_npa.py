import io

import numpy as np
import pytest

from bellguess import (IDENTITY, TSIRELSON_CH, Operator, SdpBuilder, SdpProblem, adjoint,
                       analytic_chsh_guessing_probability, bound_guessing_probability, build_moment_structure,
                       build_word_list, canonical_moment, ch_to_chsh_value, chsh_to_ch_value, enumerate_vertices,
                       format_word, get_solver, guessing_curve, guessing_problem, isotropic_behavior,
                       min_eigenvalue_bound, q2_membership, q2_problem, reduce_word, Behavior)
from bellguess.errors import InvariantError

A1, A2 = Operator(0, 1, 1), Operator(0, 2, 1)
B1 = Operator(1, 1, 1)


@pytest.fixture(scope='module')
def solver():
    return get_solver()


def test_reduce_word():
    assert reduce_word((A1, A1)) == (A1,)
    assert reduce_word((B1, A1)) == (A1, B1)
    assert reduce_word((A1, Operator(0, 1, 2))) is None
    assert reduce_word((A1, A2, A1)) == (A1, A2, A1)
    assert reduce_word(()) == IDENTITY


def test_adjoint_and_canonical_moment():
    assert adjoint((A1, A2)) == (A2, A1)
    assert canonical_moment((A2, A1)) == canonical_moment((A1, A2)) == (A1, A2)
    assert format_word((A1, B1)) == 'A(1|1)B(1|1)'
    assert format_word(IDENTITY) == '1'


@pytest.mark.parametrize('m, level, expected', [(2, 1, 5), (2, 2, 13), (3, 1, 7), (3, 2, 28)])
def test_word_counts(m, level, expected):
    from bellguess import Scenario
    words = build_word_list(Scenario(m=m, k=2), level)
    assert len(words) == expected
    assert words[0] == IDENTITY
    assert [len(w) for w in words] == sorted(len(w) for w in words)


def test_unsupported_level(s22):
    with pytest.raises(ValueError):
        build_word_list(s22, 3)


def test_moment_structure(s22):
    structure = build_moment_structure(s22, 2)
    assert structure.size == 13
    assert structure.variables[0, 0] == 0
    np.testing.assert_array_equal(structure.variables, structure.variables.T)
    # projectors: <A(1|1)† A(1|1)> is <A(1|1)>
    i = structure.words.index((A1,))
    assert structure.variables[i, i] == structure.variables[0, i]
    assert build_moment_structure(s22, 2) is structure


def test_probability_functionals_are_normalized(s22, s32):
    for scenario in (s22, s32):
        structure = build_moment_structure(scenario, 2)
        for x in range(1, scenario.m + 1):
            for y in range(1, scenario.m + 1):
                total = {}
                for a in (1, 2):
                    for b in (1, 2):
                        for var, coefficient in structure.probability(a, b, x, y).items():
                            total[var] = total.get(var, 0.) + coefficient
                assert {var: c for var, c in total.items() if c != 0.} == {0: 1.}


def test_sdpa_round_trip(ch):
    structure = build_moment_structure(ch.scenario, 2)
    problem = guessing_problem(ch, 0.1, structure)
    text = problem.to_sdpa_string(comment='guessing probability')
    assert text.startswith('"guessing probability\n')
    loaded = SdpProblem.from_sdpa(io.StringIO(text))
    assert loaded.block_sizes == problem.block_sizes == (13, 13)
    for name in ('rhs', 'matrix', 'block', 'row', 'col', 'value'):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(problem, name))


def test_sdpa_file(tmp_path, ch):
    problem = guessing_problem(ch, 0.1, build_moment_structure(ch.scenario, 1))
    problem.to_sdpa(tmp_path / 'guess.dat-s')
    assert SdpProblem.from_sdpa(tmp_path / 'guess.dat-s').n_constraints == problem.n_constraints
    with pytest.raises(FileNotFoundError):
        SdpProblem.from_sdpa(tmp_path / 'missing.dat-s')


def test_small_sdp(solver):
    builder = SdpBuilder([2])
    builder.add(builder.constraint(1.), 0, 0, 0, 1.)
    builder.add(builder.constraint(1.), 0, 1, 1, 1.)
    builder.add_objective(0, 0, 1, 1.)
    problem = builder.build()
    result = solver.solve(problem)
    assert result.status.solved
    assert result.primal_objective == pytest.approx(1., abs=1e-6)
    assert problem.objective_value(result.blocks) == pytest.approx(1., abs=1e-6)
    np.testing.assert_allclose(problem.residuals(result.blocks), 0., atol=1e-6)
    assert result.dual_objective == pytest.approx(1., abs=1e-6)
    assert result.gap <= 1e-6


def test_builder_rejects_out_of_range():
    builder = SdpBuilder([2, 1])
    with pytest.raises(IndexError):
        builder.add(builder.constraint(0.), 1, 0, 1, 1.)


def test_guessing_at_local_bound(ch, solver):
    bound = bound_guessing_probability(0., ch, solver=solver)
    assert bound.status.solved
    assert bound.p_guess == pytest.approx(1., abs=1e-6)
    assert bound.block_weights.sum() == pytest.approx(1., abs=1e-6)


def test_guessing_at_tsirelson(ch, solver):
    value = TSIRELSON_CH - 1e-7
    bound = bound_guessing_probability(value, ch, solver=solver)
    assert bound.p_guess == pytest.approx(0.5, abs=1e-3)
    assert bound.p_guess == pytest.approx(analytic_chsh_guessing_probability(ch_to_chsh_value(value)), abs=1e-3)


@pytest.mark.parametrize('s', [2.0, 2.2, 2.4, 2.6, 2.8])
def test_guessing_matches_analytic_chsh_curve(ch, solver, s):
    bound = bound_guessing_probability(chsh_to_ch_value(s), ch, solver=solver)
    assert bound.p_guess == pytest.approx(analytic_chsh_guessing_probability(s), abs=1e-3)


def test_guessing_beyond_quantum_bound(ch, solver):
    bound = bound_guessing_probability(0.3, ch, solver=solver)
    assert not bound.status.solved
    assert bound.p_guess is None


def test_guessing_curve_is_monotone(ch, solver):
    values = np.linspace(0.02, 0.2, 10)
    curve = [b.p_guess for b in guessing_curve(ch, values, solver=solver)]
    assert np.all(np.diff(curve) <= 1e-5)


def test_guessing_either_setting(ch, solver):
    first = bound_guessing_probability(0.1, ch, guessed_setting=1, solver=solver)
    second = bound_guessing_probability(0.1, ch, guessed_setting=2, solver=solver)
    assert first.p_guess == pytest.approx(second.p_guess, abs=1e-4)
    with pytest.raises(IndexError):
        guessing_problem(ch, 0.1, build_moment_structure(ch.scenario, 2), guessed_setting=3)


def test_guessing_scenario_mismatch(ch, s32):
    with pytest.raises(InvariantError):
        guessing_problem(ch, 0.1, build_moment_structure(s32, 1))


def test_analytic_curve():
    assert analytic_chsh_guessing_probability(2.) == 1.
    assert analytic_chsh_guessing_probability(1.5) == 1.
    assert analytic_chsh_guessing_probability(2 * np.sqrt(2)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        analytic_chsh_guessing_probability(2.9)
    assert ch_to_chsh_value(chsh_to_ch_value(2.5)) == pytest.approx(2.5)


def test_q2_membership(s22, pr_box, solver):
    structure = build_moment_structure(s22, 2)
    assert not q2_membership(pr_box, structure, solver)
    assert q2_membership(Behavior.uniform(s22), structure, solver)
    # CH values 0.15 and 0.25: below and above the quantum maximum
    assert q2_membership(isotropic_behavior(pr_box, 0.65), structure, solver)
    assert not q2_membership(isotropic_behavior(pr_box, 0.75), structure, solver)
    # deterministic vertices sit on the boundary: their moment matrix is rank one
    assert min_eigenvalue_bound(enumerate_vertices(s22)[6].behavior, structure, solver) == pytest.approx(0., abs=1e-5)


def test_q2_accepts_every_vertex(s22, solver):
    structure = build_moment_structure(s22, 2)
    for vertex in enumerate_vertices(s22):
        assert q2_membership(vertex.behavior, structure, solver), vertex


def test_q2_levels_are_nested(s22, pr_box, solver):
    level1, level2 = build_moment_structure(s22, 1), build_moment_structure(s22, 2)
    for visibility in (0.3, 0.65, 0.7, 0.9):
        behavior = isotropic_behavior(pr_box, visibility)
        bound1, bound2 = min_eigenvalue_bound(behavior, level1, solver), min_eigenvalue_bound(behavior, level2, solver)
        assert bound1 >= bound2 - 1e-6
        if q2_membership(behavior, level2, solver):
            assert q2_membership(behavior, level1, solver)


def test_q2_problem_layout(s22, pr_box):
    problem = q2_problem(pr_box, build_moment_structure(s22, 2))
    assert problem.block_sizes == (13, 1)
    block, row, col, value = problem.entries(0)
    assert (block.tolist(), row.tolist(), col.tolist(), value.tolist()) == ([1], [0], [0], [1.])


def test_i3322_guessing_and_membership(s32, solver):
    from bellguess import canonical_i3322, find_pr_box
    i3322 = canonical_i3322()
    structure = build_moment_structure(s32, 2)
    assert bound_guessing_probability(0., i3322, structure=structure, solver=solver).p_guess == \
        pytest.approx(1., abs=1e-5)
    inside = bound_guessing_probability(0.1, i3322, structure=structure, solver=solver)
    assert inside.status.solved and 0.5 - 1e-6 <= inside.p_guess < 1 - 1e-6
    # the quantum maximum of I3322 is about 0.2509
    assert not bound_guessing_probability(0.3, i3322, structure=structure, solver=solver).status.solved

    assert q2_membership(Behavior.uniform(s32), structure, solver)
    assert not q2_membership(find_pr_box(i3322), structure, solver)
