import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strmor import (InterpolationData, IterationOptions, LoewnerRealization, NoFiniteEigenvalues,
                    TransferFunction, convergence_metric, make_first_order, sptf_irka, tf_irka)
from strmor.irka import points_from_triples, update_points_from_rom

from _systems import random_first_order, random_second_order

inv1 = TransferFunction(lambda s: 1 / (s + 1), lambda s: -1 / (s + 1) ** 2)


def rom(E, A, B, C):
    return LoewnerRealization(*(np.atleast_2d(np.asarray(X, dtype=float)) for X in (E, A, B, C)))


def test_metric_examples():
    assert convergence_metric([1 + 1j, 1 - 1j], [1 + 1j, 1 - 1j]) == 0
    assert convergence_metric([1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]) == 0
    assert convergence_metric([2.0], [1.0]) == pytest.approx(0.5)
    assert convergence_metric([1.0, 2.0], [1.0]) == float("inf")


@settings(max_examples=50, deadline=None)
@given(pts=st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=8), perm_seed=st.integers(0, 1000))
def test_metric_is_order_invariant(pts, perm_seed):
    perm = np.random.default_rng(perm_seed).permutation(len(pts))
    assert convergence_metric(pts, [pts[i] for i in perm]) == 0


def test_update_examples():
    d = update_points_from_rom(rom(1, -1, 1, 1))
    assert d.points.tolist() == [1.0] and np.allclose(np.abs(d.right_dirs), 1)
    A = np.array([[-1.0, 2.0], [-2.0, -1.0]])
    d = update_points_from_rom(rom(np.eye(2), A, [[1.0], [0.0]], [[1.0, 0.0]]))
    assert np.allclose(sorted(d.points, key=lambda z: z.imag), [1 - 2j, 1 + 2j])
    assert d.closed_under_conjugation()
    # singular E direction gives an infinite eigenvalue, which is skipped
    d = update_points_from_rom(rom(np.diag([1.0, 0.0]), np.diag([-3.0, 1.0]), np.ones((2, 1)), np.ones((1, 2))))
    assert d.points.tolist() == [3.0]


def test_no_finite_eigenvalues():
    with pytest.raises(NoFiniteEigenvalues):
        update_points_from_rom(rom(np.zeros((1, 1)), 1, 1, 1))


def test_conjugate_closure_is_repaired():
    from strmor.numerics import EigenTriple
    x = np.array([1.0, 1j]) / np.sqrt(2)
    t1 = EigenTriple(complex(-1, 2), x, x)
    t2 = EigenTriple(complex(-1 - 1e-9, -2 + 1e-9), x.conj(), x.conj())
    d = points_from_triples([t1, t2], np.eye(2), np.eye(2))
    assert d.points[0] == np.conj(d.points[1])
    assert d.closed_under_conjugation(tol=0)


def test_order_one_fixed_point():
    r, rep = tf_irka(inv1, InterpolationData.siso([2.0]))
    assert rep.converged and rep.n_iter <= 3
    assert abs(rep.final_data.points[0] - 1) < 1e-8
    for s in (0.5, 3j):
        assert abs(r(s)[0, 0] - 1 / (s + 1)) < 1e-12


def test_exact_recovery_order_two():
    sys = make_first_order(np.eye(2), np.diag([-1.0, -2.0]), np.ones((2, 1)), np.ones((1, 2)))
    r, rep = tf_irka(sys, InterpolationData.siso([0.5, 4.0]))
    assert rep.converged and rep.metrics[-1] < 1e-3
    lams = sorted(t.lam.real for t in r.eig())
    assert np.allclose(lams, [-2, -1], atol=1e-8)


def test_max_iter_one():
    _, rep = tf_irka(inv1, InterpolationData.siso([5.0]), IterationOptions(max_iter=1))
    assert not rep.converged and rep.n_iter == 1


def test_fixed_point_consistency():
    rng = np.random.default_rng(2)
    sys = random_first_order(8, rng)
    r, rep = tf_irka(sys, InterpolationData.siso([1 + 1j, 1 - 1j, 3.0]))
    assert rep.converged
    mirrored = [-t.lam for t in r.eig() if t.finite]
    assert convergence_metric(rep.final_data, mirrored) <= 1e-12
    assert convergence_metric(rep.model_data, rep.final_data) < 1e-3


def test_realified_tf_irka_is_real():
    sys = random_first_order(6, np.random.default_rng(4))
    r, rep = tf_irka(sys, InterpolationData.siso([1 + 2j, 1 - 2j]), IterationOptions(realify=True))
    assert r.is_real


def test_sptf_matches_tf_on_first_order():
    sys = random_first_order(10, np.random.default_rng(1))
    init = InterpolationData.siso([1 + 1j, 1 - 1j, 3 + 5j, 3 - 5j])
    _, a = tf_irka(sys, init)
    _, b = sptf_irka(sys, init)
    assert a.converged and b.converged
    assert convergence_metric(a.final_data, b.final_data) <= 1e-6


def test_sptf_preserves_structure_and_realness():
    rng = np.random.default_rng(6)
    sys = random_second_order(30, rng)
    init = InterpolationData.siso([0.5 + 1j, 0.5 - 1j, 1 + 3j, 1 - 3j])
    red, rep = sptf_irka(sys, init, IterationOptions(max_iter=50, realify=True))
    assert red.term_signature == sys.term_signature
    assert all(not np.iscomplexobj(M) for _, _, M in red.matrices())
    assert rep.n_large_solves == 2 * len(init) * rep.n_iter


def test_sptf_interpolates_at_model_points():
    rng = np.random.default_rng(8)
    sys = random_second_order(25, rng)
    red, rep = sptf_irka(sys, InterpolationData.siso([1 + 1j, 1 - 1j]))
    for s in rep.model_data.points:
        H = sys(s)[0, 0]
        assert abs(red(s)[0, 0] - H) <= 1e-8 * abs(H)


def test_report_serialization():
    _, rep = tf_irka(inv1, InterpolationData.siso([2.0]))
    d = rep.to_dict(include_timing=False)
    assert "wall_time" not in d and d["converged"] and d["n_iter"] == rep.n_iter
    assert "wall_time" in rep.to_dict()


def test_iteration_options_validation():
    with pytest.raises(ValueError):
        IterationOptions(max_iter=0)
    with pytest.raises(ValueError):
        IterationOptions(conv_tol=0)
