"""Supermatrix algebra: parity pattern, supertranspose, supertrace,
Berezinian, inverse, exponential and logarithm."""

import numpy as np
import pytest

from superspin import (
    GrassmannMatrix,
    GrassmannNumber,
    LogDomainError,
    NotInvertibleError,
    ParityError,
    Supermatrix,
    expm,
    logm,
    q_gram_matrix,
    random_grassmann,
    random_supermatrix,
    symplectic_form,
)

M_DIM, N_PLANES, ORDER = 3, 2, 4
Q_DIM = 2 * N_PLANES
SIZE = M_DIM + Q_DIM


def eye():
    return Supermatrix.eye(M_DIM, Q_DIM, ORDER)


def rand(seed, scale=0.25):
    return random_supermatrix(M_DIM, N_PLANES, ORDER, seed=seed, scale=scale)


def test_identity_neutral_and_associativity():
    m = rand(0)
    assert (eye() @ m - m).norm() == 0.0
    a, b, c = rand(1), rand(2), rand(3)
    lhs = (a @ b) @ c
    rhs = a @ (b @ c)
    assert (lhs - rhs).norm() <= 1e-10 * max(1.0, lhs.norm())


def test_product_preserves_parity_pattern():
    for seed in range(5):
        product = rand(seed) @ rand(seed + 50)
        product.validate_parity(tol=0.0)


def test_parity_validation_rejects_bad_pattern():
    blades = {0: np.zeros((SIZE, SIZE), dtype=complex)}
    blades[0][0, M_DIM] = 1.0  # even coefficient in an odd block
    mat = GrassmannMatrix(SIZE, SIZE, ORDER, blades)
    with pytest.raises(ParityError):
        Supermatrix(M_DIM, Q_DIM, mat)


def test_supertranspose_antihomomorphism():
    for seed in range(5):
        a, b = rand(seed), rand(seed + 100)
        lhs = (a @ b).supertranspose()
        rhs = b.supertranspose() @ a.supertranspose()
        assert (lhs - rhs).norm() <= 1e-10 * max(1.0, lhs.norm())


def test_supertranspose_fourth_power():
    m = rand(7)
    twice = m.supertranspose().supertranspose()
    diff = twice - m
    # double supertranspose negates the odd blocks only
    assert (diff.block_a().norm(), diff.block_d().norm()) == (0.0, 0.0)
    assert (twice.block_b() + m.block_b()).norm() == 0.0
    assert (twice.block_c() + m.block_c()).norm() == 0.0
    four = twice.supertranspose().supertranspose()
    assert (four - m).norm() == 0.0


def test_gram_matrix_supertranspose():
    gram = q_gram_matrix(M_DIM, N_PLANES, ORDER)
    flipped = gram.supertranspose()
    expected = np.zeros((SIZE, SIZE), dtype=complex)
    expected[:M_DIM, :M_DIM] = np.eye(M_DIM)
    expected[M_DIM:, M_DIM:] = 0.5 * symplectic_form(N_PLANES)
    assert np.abs(flipped.body_matrix() - expected).max() == 0.0


def test_supertrace_identity_and_cyclicity():
    assert eye().supertrace() == GrassmannNumber.scalar(ORDER, M_DIM - Q_DIM)
    for seed in range(5):
        a, b = rand(seed), rand(seed + 200)
        lhs = (a @ b).supertrace()
        rhs = (b @ a).supertrace()
        assert (lhs - rhs).norm() <= 1e-10 * max(1.0, lhs.norm())


def test_inverse_roundtrip():
    assert (eye().inverse() - eye()).norm() == 0.0
    scaled = eye().scale(2.0)
    assert (scaled.inverse() - eye().scale(0.5)).norm() == 0.0
    for seed in range(100):
        m = eye() + rand(seed, scale=0.2)
        product = m @ m.inverse()
        assert (product - eye()).norm() <= 1e-9 * max(1.0, m.norm())


def test_inverse_requires_invertible_body():
    m = rand(11).nilpotent_part()
    with pytest.raises(NotInvertibleError):
        m.inverse()


def test_sdet_block_diagonal_example():
    # m = 1, q = 2: A = (3), D = I -> sdet = det(A)/det(D) = 3
    body = np.diag([3.0, 1.0, 1.0]).astype(complex)
    mat = Supermatrix.from_body(1, 2, body, ORDER)
    assert (mat.sdet() - 3.0).norm() < 1e-14


def test_sdet_multiplicative_and_supertranspose_invariant():
    for seed in range(10):
        a = eye() + rand(seed, scale=0.2)
        b = eye() + rand(seed + 300, scale=0.2)
        lhs = (a @ b).sdet()
        rhs = a.sdet() * b.sdet()
        assert (lhs - rhs).norm() <= 1e-9 * max(1.0, lhs.norm())
        assert (a.supertranspose().sdet() - a.sdet()).norm() <= 1e-9


def test_sdet_alternative_form():
    for seed in range(5):
        m = eye() + rand(seed, scale=0.2)
        a, b = m.block_a(), m.block_b()
        c, d = m.block_c(), m.block_d()
        alt = (d - c @ a.inverse() @ b).det().inv() * a.det()
        assert (m.sdet() - alt).norm() <= 1e-9 * max(1.0, alt.norm())


def test_determinant_gauss_matches_leibniz():
    rng = np.random.default_rng(13)
    size = 5
    grid = [
        [1.5 * (i == j) + random_grassmann(rng, ORDER, parity="even", scale=0.3)
         for j in range(size)]
        for i in range(size)
    ]
    mat = GrassmannMatrix.from_entries(grid, ORDER)
    gauss = mat._det_gauss()
    leibniz = mat._det_leibniz()
    assert (gauss - leibniz).norm() <= 1e-10 * max(1.0, leibniz.norm())


def test_exp_of_zero_and_nilpotent():
    zero = Supermatrix.zeros(M_DIM, Q_DIM, ORDER)
    assert (expm(zero) - eye()).norm() == 0.0
    nil = rand(17).nilpotent_part()
    series = eye()
    term = eye()
    for k in range(1, ORDER + 1):
        term = (term @ nil).scale(1.0 / k)
        series = series + term
    assert (expm(nil) - series).norm() <= 1e-12 * max(1.0, series.norm())
    # powers beyond the Grassmann order cancel exactly: no blade exceeds it
    assert all(mask.bit_count() <= ORDER for mask in expm(nil).mat.blades)


def test_exp_berezinian_identity_small():
    for seed in range(5):
        m = rand(seed, scale=0.2)
        lhs = expm(m).sdet()
        rhs = m.supertrace().exp()
        assert (lhs - rhs).norm() <= 1e-10 * max(1.0, rhs.norm())


def test_exp_derivative_at_zero():
    m = rand(19, scale=0.3)
    h = 1e-5
    diff = (expm(m.scale(h)) - expm(m.scale(-h))).scale(1.0 / (2 * h))
    assert (diff - m).norm() <= 1e-6 * max(1.0, m.norm())


def test_log_identity_and_nilpotent_bijection():
    assert logm(eye()).norm() == 0.0
    for seed in range(10):
        nil = rand(seed, scale=0.4).nilpotent_part()
        assert (logm(expm(nil)) - nil).norm() <= 1e-12 * max(1.0, nil.norm())


def test_log_exp_roundtrip_near_identity():
    for seed in range(10):
        m = eye() + rand(seed, scale=0.04)
        assert (expm(logm(m)) - m).norm() <= 1e-9 * max(1.0, m.norm())


def test_log_domain_error():
    body = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).astype(complex)
    with pytest.raises(LogDomainError):
        logm(Supermatrix.from_body(M_DIM, Q_DIM, body, ORDER))


def test_body_projection_homomorphism():
    nil = rand(23).nilpotent_part()
    assert (eye() + nil).body().isclose(eye(), 1e-15)
    a, b = rand(29), rand(31)
    lhs = (a @ b).body()
    rhs = a.body() @ b.body()
    assert (lhs - rhs).norm() <= 1e-12 * max(1.0, lhs.norm())


def test_norm_submultiplicative():
    for seed in range(5):
        a, b = rand(seed), rand(seed + 400)
        assert (a @ b).norm() <= a.norm() * b.norm() + 1e-9


def test_grading_decomposition_and_multiplicativity():
    m = rand(37)
    total = Supermatrix.zeros(M_DIM, Q_DIM, ORDER)
    for k in range(ORDER + 1):
        total = total + m.grade(k)
    assert (total - m).norm() == 0.0
    a, b = rand(41), rand(43)
    for j in range(3):
        for k in range(3):
            product = a.grade(j) @ b.grade(k)
            assert (product - product.grade(j + k)).norm() == 0.0


def test_body_times_nilpotent_exponential_factorization():
    for seed in range(10):
        m = eye() + rand(seed, scale=0.25)
        body = m.body()
        factor = logm(body.inverse() @ m)
        assert factor.body().norm() <= 1e-12
        rebuilt = body @ expm(factor)
        assert (rebuilt - m).norm() <= 1e-9 * max(1.0, m.norm())


def test_json_roundtrip_and_parity_check_on_load():
    m = rand(47)
    data = m.to_dict()
    again = Supermatrix.from_dict(data)
    assert (again - m).norm() <= 1e-15 * max(1.0, m.norm())
    bad = eye().to_dict()
    bad["rows"][0][M_DIM] = GrassmannNumber.one(ORDER).to_dict()
    with pytest.raises(ParityError):
        Supermatrix.from_dict(bad)
