import numpy as np
import pytest

from bellguess import (Behavior, BellInequality, LpStatus, canonical_i3322, check_no_signaling,
                       enumerate_vertices, find_optimal_bell_inequality, find_pr_box, idx, isotropic_behavior,
                       sample_behavior, spanning_vertices, vertex_matrix)
from bellguess.errors import InvalidBehaviorError, TrivialInequalityError


def test_pr_box_of_ch(ch, ch_pr_box, pr_box):
    assert ch.value(ch_pr_box) == pytest.approx(0.5, abs=1e-9)
    for entry in ch_pr_box.p:
        assert min(abs(entry), abs(entry - 0.5)) < 1e-9
    np.testing.assert_allclose(ch_pr_box.p, pr_box.p, atol=1e-9)


def test_pr_box_is_no_signaling(ch_pr_box):
    ok, residual = check_no_signaling(ch_pr_box)
    assert ok and residual <= 1e-9
    sums = ch_pr_box.p.reshape(4, 4).sum(axis=1)
    np.testing.assert_allclose(sums, 1., atol=1e-9)


def test_pr_box_of_i3322():
    ineq = canonical_i3322()
    box = find_pr_box(ineq)
    assert ineq.value(box) > ineq.c + 0.1
    assert check_no_signaling(box)[0]


def test_positivity_inequality_is_rejected(s22):
    h = np.zeros(s22.dim)
    h[idx(1, 2, 1, 1, s22)] = -1.
    with pytest.raises(TrivialInequalityError):
        find_pr_box(BellInequality(scenario=s22, h=h, c=0.))


def test_separating_pr_box(s22, ch, pr_box):
    solution = find_optimal_bell_inequality(pr_box, enumerate_vertices(s22))
    assert solution.status is LpStatus.OPTIMAL
    # the correlator form of CHSH reaches 4 - 2 within the box |h_i| <= 1
    assert solution.violation >= 2. - 1e-7
    assert solution.inequality.value(pr_box) > solution.c
    assert ch.value(pr_box) - ch.c == pytest.approx(0.5)
    assert solution.duality_gap is not None


def test_local_behaviors_are_not_separated(s22, s32):
    for scenario in (s22, s32):
        for vertex in enumerate_vertices(scenario)[::5]:
            assert find_optimal_bell_inequality(vertex.behavior).status is LpStatus.LOCAL_BEHAVIOR
        assert find_optimal_bell_inequality(Behavior.uniform(scenario)).status is LpStatus.LOCAL_BEHAVIOR


def test_vertex_dimension_mismatch(s22, s32):
    from bellguess.errors import DimensionMismatchError
    with pytest.raises(DimensionMismatchError):
        find_optimal_bell_inequality(Behavior.uniform(s22), enumerate_vertices(s32))


def test_violation_along_isotropic_line(pr_box):
    for visibility in np.linspace(0.6, 1., 9):
        solution = find_optimal_bell_inequality(isotropic_behavior(pr_box, visibility))
        assert solution.status is LpStatus.OPTIMAL
        assert solution.violation >= 4 * visibility - 2 - 1e-7
    assert find_optimal_bell_inequality(isotropic_behavior(pr_box, 0.5)).status is LpStatus.LOCAL_BEHAVIOR


def _soundness_check(behaviors, scenario):
    rows = vertex_matrix(scenario)
    n_optimal = 0
    for behavior in behaviors:
        solution = find_optimal_bell_inequality(behavior)
        assert solution.status in (LpStatus.OPTIMAL, LpStatus.LOCAL_BEHAVIOR)
        if solution.status is LpStatus.OPTIMAL:
            n_optimal += 1
            assert solution.violation > 0
            assert np.max(rows @ solution.h) <= solution.c + 1e-8
            assert np.abs(solution.h).max() <= 1 + 1e-9
            assert solution.violation == pytest.approx(behavior.value(solution.h) - solution.c)
    return n_optimal


def test_separation_soundness_on_sampled_behaviors(s22, ch, ch_pr_box):
    rng = np.random.default_rng(3)
    spanning = spanning_vertices(ch, enumerate_vertices(s22))
    behaviors = [sample_behavior(ch, spanning, ch_pr_box, rng) for _ in range(100)]
    assert _soundness_check(behaviors, s22) > 50


@pytest.mark.slow
def test_separation_soundness_1000(s22, ch, ch_pr_box):
    rng = np.random.default_rng(11)
    spanning = spanning_vertices(ch, enumerate_vertices(s22))
    behaviors = [sample_behavior(ch, spanning, ch_pr_box, rng) for _ in range(1000)]
    assert _soundness_check(behaviors, s22) > 500


def test_signaling_behavior_is_rejected(s22):
    p = np.zeros(s22.dim)
    for a, b, x, y in ((1, 1, 1, 1), (2, 2, 1, 2), (1, 1, 2, 1), (1, 1, 2, 2)):
        p[idx(a, b, x, y, s22)] = 1.
    behavior = Behavior(scenario=s22, p=p)
    assert not check_no_signaling(behavior)[0]
    with pytest.raises(InvalidBehaviorError, match='signaling'):
        find_optimal_bell_inequality(behavior)
