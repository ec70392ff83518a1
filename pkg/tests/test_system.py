import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from strmor import (Constant, DimensionMismatch, Monomial, SingularK, StructuredSystem,
                    TransferFunction, count_evaluations, make_delay, make_first_order, make_gun,
                    make_second_order, make_viscoelastic)

from _systems import companion, fd_derivative, random_second_order, relerr


def scalar(x):
    return complex(np.asarray(x).item())


def test_eval_K_examples():
    fo = make_first_order(np.eye(2), np.diag([-1.0, -2.0]), np.ones((2, 1)), np.ones((1, 2)))
    assert np.allclose(fo.eval_K(0), np.diag([1, 2]))
    so = make_second_order(1, 0, 4, 1, 1, 0)
    assert scalar(so.eval_K(2)) == 8
    dl = make_delay(1, 0, -1, 1.0, 1, 1)
    assert scalar(dl.eval_K(0)) == 1


def test_eval_transfer_examples():
    assert scalar(make_first_order(1, -1, 1, 1)(1)) == pytest.approx(0.5)
    assert scalar(make_second_order(1, 0, 4, 1, 1, 0)(0)) == pytest.approx(0.25)
    assert scalar(make_delay(1, 0, -1, 1.0, 1, 1)(0)) == pytest.approx(1.0)
    assert scalar(make_delay(1, 0, -1, 1.0, 1, 1)(1)) == pytest.approx(1 / (1 + np.exp(-1)), abs=1e-12)


def test_derivative_examples():
    assert scalar(make_first_order(1, -1, 1, 1).eval_transfer_derivative(1)) == pytest.approx(-0.25)
    assert scalar(make_second_order(1, 0, 4, 1, 1).eval_transfer_derivative(1)) == pytest.approx(-2 / 25)
    assert abs(scalar(make_delay(1, 0, -1, 1.0, 1, 1).eval_transfer_derivative(0))) < 1e-15


def test_second_order_terms_are_definitional():
    sys = make_second_order(1, 0, 4, 1, 1, 0)
    assert [(t, scalar(M)) for t, M in sys.K_terms] == [(Monomial(2), 1), (Constant(), 4)]
    assert [(t, scalar(M)) for t, M in sys.B_terms] == [(Constant(), 1)]
    assert [(t, scalar(M)) for t, M in sys.C_terms] == [(Constant(), 1)]


def test_gun_degenerates_to_second_order():
    rng = np.random.default_rng(1)
    n = 5
    M, K = np.eye(n), np.diag(rng.uniform(1, 100, n))
    B, C = rng.standard_normal((n, 1)), rng.standard_normal((1, n))
    Z = np.zeros((n, n))
    gun = make_gun(M, Z, Z, K, 0.0, 108.8774, B, C)
    so = make_second_order(M, None, K, B, C)
    for w in np.linspace(0.3, 30, 10):
        assert relerr(so(1j * w), gun(1j * w)) < 1e-12


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        make_first_order(np.eye(2), np.eye(3), np.ones((2, 1)), np.ones((1, 2)))
    with pytest.raises(DimensionMismatch):
        make_first_order(np.eye(2), np.eye(2), np.ones((3, 1)), np.ones((1, 2)))
    with pytest.raises(DimensionMismatch):
        make_first_order(np.eye(2), np.eye(2), np.ones((2, 1)), np.ones((1, 3)))
    with pytest.raises(DimensionMismatch):
        StructuredSystem([], [(Constant(), np.ones((1, 1)))], [(Constant(), np.ones((1, 1)))])


def test_singular_K_is_reported():
    sys = make_first_order(1, -1, 1, 1)
    with pytest.raises(SingularK):
        sys(-1)


def test_is_real_flag():
    rng = np.random.default_rng(0)
    assert random_second_order(4, rng).is_real
    n = 3
    gun = make_gun(np.eye(n), np.eye(n), np.eye(n), np.eye(n), 1.0, 2.0, np.ones((n, 1)), np.ones((1, n)))
    assert not gun.is_real
    cplx = make_first_order(np.eye(2), 1j * np.eye(2), np.ones((2, 1)), np.ones((1, 2)))
    assert not cplx.is_real


@settings(max_examples=20, deadline=None)
@given(re=st.floats(-0.5, 5), im=st.floats(-50, 50))
def test_reflection_principle(re, im):
    sys = random_second_order(6, np.random.default_rng(3), m=2, p=2)
    s = complex(re, im)
    H = sys(s)
    assert np.linalg.norm(np.conj(H) - sys(np.conj(s))) <= 1e-12 * np.linalg.norm(H)


@settings(max_examples=20, deadline=None)
@given(re=st.floats(0, 3), im=st.floats(0.1, 30))
def test_derivative_consistency(re, im):
    rng = np.random.default_rng(5)
    sys = random_second_order(6, rng, m=2, p=2, velocity_output=True)
    s = complex(re, im)
    dH = sys.eval_transfer_derivative(s)
    fd = fd_derivative(sys.eval_transfer, s)
    assert np.linalg.norm(dH - fd) <= 1e-5 * (1 + np.linalg.norm(dH))


def test_structured_derivatives_for_all_term_kinds():
    rng = np.random.default_rng(2)
    n = 4
    X = lambda: rng.standard_normal((n, n))
    B, C = rng.standard_normal((n, 2)), rng.standard_normal((1, n))
    systems = [
        make_delay(np.eye(n), X() - 5 * np.eye(n), X(), 0.5, B, C),
        make_viscoelastic(np.eye(n), X() @ X().T + np.eye(n), np.eye(n), 0.5, 2.0, 0.1, 0.7, B, C),
        make_gun(np.eye(n), X(), X(), X() @ X().T, 0.5, 1.5, B, C),
    ]
    for sys in systems:
        for s in (0.2 + 1.3j, 2.0 + 0.5j):
            dH = sys.eval_transfer_derivative(s)
            assert np.linalg.norm(dH - fd_derivative(sys.eval_transfer, s)) <= 1e-5 * (1 + np.linalg.norm(dH))


def test_companion_linearization_is_equivalent():
    rng = np.random.default_rng(7)
    n = 5
    so = random_second_order(n, rng, m=2, p=3)
    M, D, K = (so.K_terms[i][1] for i in range(3))
    fo = companion(M, D, K, so.B_terms[0][1], so.C_terms[0][1])
    for w in np.logspace(-2, 2, 15):
        assert relerr(so(1j * w), fo(1j * w)) <= 1e-10


def test_sparse_matrices_match_dense():
    rng = np.random.default_rng(4)
    n = 30
    A = sps.diags([np.ones(n - 1), -3 * np.ones(n), np.ones(n - 1)], [-1, 0, 1])
    B, C = rng.standard_normal((n, 2)), rng.standard_normal((2, n))
    sp = make_delay(sps.identity(n), A, -0.5 * sps.identity(n), 1.0, B, C)
    de = make_delay(np.eye(n), A.toarray(), -0.5 * np.eye(n), 1.0, B, C)
    for s in (0.1j, 1 + 2j):
        assert relerr(de(s), sp(s)) < 1e-12
        assert relerr(de.eval_transfer_derivative(s), sp.eval_transfer_derivative(s)) < 1e-10


def test_zero_damping_and_velocity_are_dropped():
    sys = make_second_order(np.eye(2), np.zeros((2, 2)), np.eye(2), np.ones((2, 1)), np.ones((1, 2)),
                            np.zeros((1, 2)))
    assert [t.kind for t, _ in sys.K_terms] == ["monomial", "constant"]
    assert len(sys.C_terms) == 1


def test_counting_hook():
    sys = make_first_order(1, -1, 1, 1)
    with count_evaluations() as c:
        sys(1.0)
        sys.transfer_and_derivative(2.0)
    assert c["transfer"] == 2 and c["derivative"] == 1


def test_transfer_function_wrapper():
    tf = TransferFunction(lambda s: 1 / (s + 1), lambda s: -1 / (s + 1) ** 2)
    H, dH = tf.transfer_and_derivative(1.0)
    assert H.shape == (1, 1) and scalar(dH) == pytest.approx(-0.25)
    with pytest.raises(NotImplementedError):
        TransferFunction(lambda s: s).transfer_and_derivative(1.0)
