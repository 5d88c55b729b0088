import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from sympinf.fourier import (
    FourierVector,
    analyze,
    basis_vector,
    evaluate,
    from_omega_basis,
    grid,
    hilbert_J,
    inner_omega,
    modes,
    norm_omega,
    omega,
    omega_basis_vector,
    pos,
    synthesize,
    to_omega_basis,
)


def random_fv(rng, n):
    return FourierVector(rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n))


coeff_arrays = st.integers(1, 6).flatmap(
    lambda n: st.lists(
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        min_size=2 * n,
        max_size=2 * n,
    )
)


def test_pos_is_bijection():
    for n in (1, 3, 8):
        positions = [pos(int(m), n) for m in modes(n)]
        assert positions == list(range(2 * n))
    with pytest.raises(IndexError):
        pos(0, 3)
    with pytest.raises(IndexError):
        pos(4, 3)


def test_analyze_pure_mode_constant_and_cosine():
    th = grid(16)
    u = analyze(np.exp(1j * th), 4)
    assert u[1] == pytest.approx(1)
    assert np.sum(np.abs(u.coeffs)) == pytest.approx(1)
    assert np.allclose(analyze(np.ones(16), 4).coeffs, 0)
    c = analyze(np.cos(2 * th), 4)
    assert c[2] == pytest.approx(0.5) and c[-2] == pytest.approx(0.5)


def test_analyze_rejects_coarse_grid():
    with pytest.raises(ValueError):
        analyze(np.ones(15), 4)


def test_synthesize_examples():
    th = grid(32)
    assert np.allclose(synthesize(basis_vector(1, 4), 32), np.exp(1j * th))
    cos2 = FourierVector.from_modes(4, {2: 0.5, -2: 0.5})
    assert np.allclose(synthesize(cos2, 32), np.cos(2 * th))


@given(coeff_arrays)
def test_round_trip(c):
    u = FourierVector(np.array(c))
    back = analyze(synthesize(u, 4 * u.n_trunc), u.n_trunc)
    assert np.max(np.abs(back.coeffs - u.coeffs)) <= 1e-12 * max(1.0, np.max(np.abs(u.coeffs)))


def test_evaluate_matches_synthesize(rng):
    u = random_fv(rng, 5)
    assert np.allclose(evaluate(u, grid(40)), synthesize(u, 40))


def test_hilbert_examples(rng):
    e5 = basis_vector(5, 6)
    assert np.allclose(hilbert_J(e5).coeffs, 1j * e5.coeffs)
    u = random_fv(rng, 6)
    assert np.allclose(hilbert_J(hilbert_J(u)).coeffs, -u.coeffs)
    cos1 = FourierVector.from_modes(3, {1: 0.5, -1: 0.5})
    th = grid(12)
    assert np.allclose(synthesize(hilbert_J(cos1), 12), -np.sin(th))


def test_omega_examples():
    assert omega(basis_vector(1, 3), basis_vector(-1, 3)) == pytest.approx(-1j)
    for m in modes(3):
        for n in modes(3):
            expected = -np.sign(m) if m == -n else 0
            got = omega(omega_basis_vector(int(m), 3), omega_basis_vector(int(n), 3))
            assert got == pytest.approx(expected, abs=1e-14)


@given(coeff_arrays, coeff_arrays)
def test_omega_antisymmetric(a, b):
    n = min(len(a), len(b)) // 2
    u = FourierVector(np.array(a[: 2 * n]))
    v = FourierVector(np.array(b[: 2 * n]))
    assert abs(omega(u, v) + omega(v, u)) <= 1e-10
    assert abs(omega(u, u)) <= 1e-10


def test_omega_against_quadrature(rng):
    """(1/2pi) int u v' dtheta by adaptive quadrature on the real and imaginary parts."""
    u, v = random_fv(rng, 3), random_fv(rng, 3)
    dv = v.derivative()

    def f(t, part):
        val = evaluate(u, t) * evaluate(dv, t)
        return val.real if part == 0 else val.imag

    re = quad(f, 0, 2 * np.pi, args=(0,), limit=200)[0]
    im = quad(f, 0, 2 * np.pi, args=(1,), limit=200)[0]
    assert omega(u, v) == pytest.approx((re + 1j * im) / (2 * np.pi), abs=1e-10)


def test_inner_product_examples(rng):
    e3 = basis_vector(3, 4)
    assert inner_omega(e3, e3) == pytest.approx(3)
    for m in modes(3):
        for n in modes(3):
            got = inner_omega(omega_basis_vector(int(m), 3), omega_basis_vector(int(n), 3))
            assert got == pytest.approx(1.0 if m == n else 0.0, abs=1e-14)
    u, v = random_fv(rng, 5), random_fv(rng, 5)
    assert inner_omega(u, v) == pytest.approx(-omega(u, hilbert_J(v.conj())), abs=1e-12)
    direct = sum(abs(m) * abs(u[int(m)]) ** 2 for m in modes(5))
    assert inner_omega(u, u).real == pytest.approx(direct)
    assert norm_omega(u) ** 2 == pytest.approx(direct)


@given(coeff_arrays)
def test_inner_product_positive(c):
    u = FourierVector(np.array(c))
    val = inner_omega(u, u)
    assert abs(val.imag) <= 1e-9
    if np.any(np.abs(u.coeffs) > 0):
        assert val.real > 0


def test_omega_basis_coordinates():
    assert to_omega_basis(basis_vector(4, 4))[pos(4, 4)] == pytest.approx(2)
    assert to_omega_basis(basis_vector(-1, 4))[pos(-1, 4)] == pytest.approx(1j)
    for m in modes(3):
        coords = to_omega_basis(omega_basis_vector(int(m), 3))
        assert np.allclose(coords, np.eye(6)[pos(int(m), 3)])


def test_from_omega_basis_inverts(rng):
    u = random_fv(rng, 4)
    assert np.allclose(from_omega_basis(to_omega_basis(u)).coeffs, u.coeffs)


def test_vector_validation_and_arithmetic(rng):
    with pytest.raises(ValueError):
        FourierVector(np.ones(3))
    with pytest.raises(ValueError):
        FourierVector(np.array([1.0, np.nan]))
    u, v = random_fv(rng, 2), random_fv(rng, 2)
    assert np.allclose((u + v - v).coeffs, u.coeffs)
    assert np.allclose((2 * u).coeffs, (u * 2).coeffs)
    with pytest.raises(ValueError):
        u + random_fv(rng, 3)
    with pytest.raises(ValueError):
        u.coeffs[0] = 0


def test_real_functions_have_conjugate_symmetric_coefficients():
    th = grid(32)
    u = analyze(np.cos(th) + 0.3 * np.sin(3 * th), 5)
    assert u.is_real()
    assert not basis_vector(1, 5).is_real()
