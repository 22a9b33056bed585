import numpy as np
import pytest

from exceptions import MatrixError
from isometries import numeric
from isometries.graph import SignedGen
from isometries.index import StarIndex

N = 64


@pytest.mark.parametrize("matrix", [
    numeric.make_truncated_shift(1, N),
    numeric.make_truncated_shift(5, N),
    numeric.make_diag_unitary(np.linspace(0.1, 6.0, N)),
    numeric.make_diag_unitary_plus_shift(np.linspace(0.1, 3.0, N // 2), 2, N // 2),
    numeric.make_block_shift(N // 2),
    numeric.make_odd_orbit_operator(N),
    numeric.make_orbit_shift(3, N),
])
def test_constructors_are_partial_isometries(matrix):
    assert np.linalg.norm(matrix @ matrix.conj().T @ matrix - matrix, 2) <= 1e-12
    assert numeric.is_partial_isometry(matrix)


def test_non_partial_isometry_detected():
    assert not numeric.is_partial_isometry(2 * np.eye(3))
    with pytest.raises(MatrixError):
        numeric.wold_split(2 * np.eye(3))


def test_constructor_errors():
    with pytest.raises(MatrixError):
        numeric.make_truncated_shift(4, 4)
    with pytest.raises(MatrixError):
        numeric.make_orbit_shift(8, 16)
    with pytest.raises(MatrixError):
        numeric.make_diag_unitary([])


def test_projection_leq():
    p = np.diag([1, 0, 0]).astype(complex)
    q = np.diag([1, 1, 0]).astype(complex)
    assert numeric.projection_leq(p, q)
    assert not numeric.projection_leq(q, p)
    with pytest.raises(MatrixError):
        numeric.projection_leq(p, 2 * q)


def test_wold_split_recovers_blocks():
    thetas = [0.3, 1.2, 2.1]
    a = numeric.make_diag_unitary_plus_shift(thetas, 1, 5)
    split = numeric.wold_split(a)
    assert split.h_u.shape[1] == 3
    assert split.h_s.shape[1] == 4
    assert np.allclose(split.unitary_part[:3, :3], np.diag(np.exp(1j * np.array(thetas))))
    assert np.allclose(split.shift_part[3:, 3:], numeric.make_truncated_shift(1, 5))
    assert all(value <= 1e-10 for value in split.residuals(a).values())
    assert split.star_index() == StarIndex.of(3, 1, 1, 0)


@pytest.mark.parametrize("k, n", [(1, 8), (2, 12), (4, 12), (3, 64)])
def test_truncated_shift_index(k, n):
    assert numeric.star_index_numeric(numeric.make_truncated_shift(k, n)) == StarIndex.of(0, k, k, 0)


def test_unitary_index():
    assert numeric.star_index_numeric(numeric.make_diag_unitary([0.5, 1.5, 2.5])) == StarIndex.of(3, 0, 0, 0)


@pytest.mark.parametrize("n", [1, 3, 4, 8, 32])
def test_wold_split_of_unitary_is_all_unitary(n):
    u = numeric.make_diag_unitary(np.linspace(0.2, 5.9, n))
    split = numeric.wold_split(u)
    assert split.h_u.shape[1] == n
    assert split.h_s.shape[1] == 0
    assert np.linalg.norm(split.shift_part, 2) <= 1e-10
    assert np.linalg.norm(split.unitary_part - u, 2) <= 1e-10
    assert split.star_index() == StarIndex.of(n, 0, 0, 0)


def test_wold_split_of_dense_unitary():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    assert numeric.star_index_numeric(q) == StarIndex.of(6, 0, 0, 0)


def test_wold_split_of_unitary_part_has_no_shift():
    a = numeric.make_diag_unitary_plus_shift([0.3, 1.2, 2.1], 2, 6)
    u = numeric.wold_split(a).unitary_part
    again = numeric.wold_split(u)
    assert again.h_u.shape[1] == 3
    assert np.linalg.norm(again.shift_part, 2) <= 1e-10
    assert np.linalg.norm(again.unitary_part - u, 2) <= 1e-10


def test_subspace_intersection_of_whole_space():
    eye = np.eye(5, dtype=complex)
    assert numeric.subspace_intersection(eye, eye).shape[1] == 5
    assert numeric.subspace_intersection(eye[:, :3], eye[:, 2:]).shape[1] == 1
    assert numeric.subspace_intersection(eye[:, :2], eye[:, 2:]).shape[1] == 0


def test_zero_matrix_index():
    assert numeric.star_index_numeric(np.zeros((3, 3))) == StarIndex.of(0, 3, 0, 3)


def test_pi_numeric_cases():
    u2 = numeric.make_truncated_shift(2, 12)
    u4 = numeric.make_truncated_shift(4, 12)
    result = numeric.pi_numeric(u2, u4)
    assert result.nonzero

    p = numeric.make_orbit_shift(0, 4)
    q = numeric.make_orbit_shift(1, 4)
    assert not numeric.pi_numeric(p, q).nonzero
    assert numeric.pi_numeric(q, p).nonzero
    assert numeric.pi_numeric(q, p).case == numeric.PiCase.INIT_LEQ_FIN


def test_pi_numeric_dimension_mismatch():
    with pytest.raises(MatrixError):
        numeric.pi_numeric(np.eye(2), np.eye(3))


@pytest.mark.parametrize("name", ["unitary_shift", "toeplitz_m2", "toeplitz_powers"])
def test_numeric_table_matches_symbolic(load, name):
    family = load(name)
    table = numeric.admissibility_table(family.matrices)
    assert table.nonzero
    for a, b in table.nonzero:
        assert family.pi.lookup(a, b)
    for a, b in table.zero:
        assert not family.pi.lookup(a, b)


def test_numeric_table_with_powers():
    u = numeric.make_truncated_shift(1, 10)
    v = numeric.make_block_shift(5)
    table = numeric.admissibility_table({"U": u, "V": v}, chains=["U"], depth=3)
    assert (SignedGen("U", 3), SignedGen("V")) in table.nonzero | table.zero
    assert not (table.nonzero & table.zero)


def test_subspace_meet_join():
    e = np.eye(3, dtype=complex)
    hx, hy = e[:, :2], e[:, 1:]
    meet, join = numeric.subspace_meet_join(hx, hy, admissible=True)
    assert meet.shape[1] == 1
    assert join.shape[1] == 3
    meet, join = numeric.subspace_meet_join(hx, hy, admissible=False)
    assert meet.shape[1] == 0
    assert join.shape == (6, 4)


def test_group_action_space():
    space = numeric.group_action_space([numeric.make_orbit_shift(0, 6), numeric.make_orbit_shift(1, 6)])
    assert space.shape[1] == 3


def test_cayley_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        t = (x + x.conj().T) / 2
        u = numeric.cayley_of_selfadjoint(t)
        assert numeric.is_unitary(u)
        assert np.linalg.norm(numeric.inverse_cayley(u) - t, 2) <= 1e-8


def test_cayley_special_values():
    eye = np.eye(4)
    assert np.allclose(numeric.cayley_of_selfadjoint(np.zeros((4, 4))), -eye)
    assert np.allclose(numeric.inverse_cayley(-eye), np.zeros((4, 4)))
    with pytest.raises(MatrixError):
        numeric.inverse_cayley(eye)
    with pytest.raises(MatrixError):
        numeric.cayley_of_selfadjoint(np.array([[0, 1], [0, 0]]))


def test_rank1_defect_power_law():
    rng = np.random.default_rng(1)
    for _ in range(20):
        e_plus = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        e_minus = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        defect = numeric.rank1_defect(e_plus / np.linalg.norm(e_plus), e_minus / np.linalg.norm(e_minus))
        assert defect.max_norm_residual <= 1e-12
        assert numeric.rank(defect.w) == 1
        w = defect.w
        for n in range(1, 6):
            assert np.linalg.norm(np.linalg.matrix_power(w, n + 1) - defect.alpha ** n * w, 2) <= 1e-12
            assert abs(np.linalg.norm(np.linalg.matrix_power(w, n), 2) - abs(defect.alpha) ** (n - 1)) <= 1e-12


def test_rank1_defect_rejects_non_unit_vectors():
    with pytest.raises(MatrixError):
        numeric.rank1_defect(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


def test_unitary_extension_of_shift():
    v = numeric.make_truncated_shift(1, 6)
    basis = np.eye(6, dtype=complex)
    u = numeric.unitary_extension(v, numeric.rank1_defect(basis[5], basis[0]))
    assert np.linalg.norm(u.conj().T @ u - np.eye(6), 2) <= 1e-12
    with pytest.raises(MatrixError):
        numeric.unitary_extension(v, numeric.rank1_defect(basis[0], basis[5]))
    with pytest.raises(MatrixError):
        numeric.unitary_extension(v, None)
