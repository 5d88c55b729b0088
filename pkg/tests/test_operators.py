import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympinf.diffeo import counterexample_operator, embed, rotation
from sympinf.fourier import modes, pos
from sympinf.operators import (
    bar,
    blocks,
    compose,
    dagger,
    entry_condition_residual,
    identity,
    invert,
    involution,
    j_matrix,
    norm2,
    predicates,
    sharp,
    transpose,
)
from sympinf.suites import random_symplectic

SQ2 = np.sqrt(2)


def loop_involution(A, kind):
    """Entry formulas written out mode by mode."""
    n = A.shape[0] // 2
    out = np.zeros_like(A)
    for m in modes(n):
        for k in modes(n):
            m, k = int(m), int(k)
            if kind == "bar":
                v = np.conj(A[pos(-m, n), pos(-k, n)])
            elif kind == "dagger":
                v = np.conj(A[pos(k, n), pos(m, n)])
            elif kind == "transpose":
                v = A[pos(-k, n), pos(-m, n)]
            else:
                v = np.sign(m * k) * A[pos(-k, n), pos(-m, n)]
            out[pos(m, n), pos(k, n)] = v
    return out


def random_matrix(rng, n):
    return rng.standard_normal((2 * n, 2 * n)) + 1j * rng.standard_normal((2 * n, 2 * n))


@pytest.mark.parametrize("kind", ["bar", "dagger", "transpose", "sharp"])
def test_involutions_match_entry_formulas(kind, rng):
    A = random_matrix(rng, 3)
    assert np.allclose(involution(A, kind), loop_involution(A, kind))
    assert np.allclose(involution(involution(A, kind), kind), A)
    assert np.allclose(involution(identity(3), kind), identity(3))


def test_unknown_involution_and_bad_shapes():
    with pytest.raises(ValueError):
        involution(identity(2), "flip")
    with pytest.raises(ValueError):
        predicates(np.eye(3))
    with pytest.raises(ValueError):
        predicates(np.ones((2, 4)))
    bad = identity(2)
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        predicates(bad)


def test_sharp_of_j_and_counterexample():
    J = j_matrix(4)
    assert np.allclose(sharp(J), -J)
    As = sharp(counterexample_operator(3))
    assert As[pos(1, 3), pos(1, 3)] == pytest.approx(SQ2)
    assert As[pos(1, 3), pos(-1, 3)] == pytest.approx(-1j)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_sharp_reverses_products(n, seed):
    rng = np.random.default_rng(seed)
    A, B = random_matrix(rng, n), random_matrix(rng, n)
    assert np.max(np.abs(sharp(A @ B) - sharp(B) @ sharp(A))) <= 1e-10
    assert np.max(np.abs(transpose(A @ B) - transpose(B) @ transpose(A))) <= 1e-10
    assert np.allclose(dagger(A), bar(transpose(A)))


def test_j_squared():
    J = j_matrix(5)
    assert np.allclose(J @ J, -np.eye(10))


def test_blocks_examples(rng):
    v = blocks(identity(3))
    assert np.allclose(v.a, np.eye(3)) and np.allclose(v.d, np.eye(3))
    assert not v.b.any() and not v.c.any()
    b = blocks(counterexample_operator(3)).b
    assert np.count_nonzero(b) == 1
    assert b[pos(1, 3) - 3, pos(-1, 3)] == pytest.approx(1j)
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    x, y = blocks(A), blocks(B)
    prod = blocks(compose(A, B))
    assert np.allclose(prod.a, x.a @ y.a + x.b @ y.c)
    assert np.allclose(prod.b, x.b @ y.d + x.a @ y.b)
    assert np.allclose(blocks(A).assemble(), A)


def test_norm2_examples():
    assert norm2(identity(4)) == 0
    assert norm2(counterexample_operator(4)) == pytest.approx(1)
    assert norm2(embed(rotation(0.7), 6)) <= 1e-12


def test_predicates_examples():
    assert all(predicates(identity(3)).as_dict()[k] for k in
               ("is_real", "preserves_omega", "is_invertible_symplectic", "is_symplectic"))
    c = predicates(counterexample_operator(5), 1e-14)
    assert c.is_real and c.preserves_omega and c.is_invertible_symplectic and c.is_symplectic
    d = predicates(2 * identity(3))
    assert d.is_real and not d.preserves_omega and not d.is_symplectic


def test_entry_condition_agrees_with_matrix_form(rng):
    A = random_symplectic(4, rng)
    assert entry_condition_residual(A) <= 1e-10
    assert entry_condition_residual(2 * A) > 1


def test_invert_examples(rng):
    A = random_symplectic(4, rng)
    assert np.max(np.abs(compose(A, invert(A)) - identity(4))) <= 1e-10
    B = invert(counterexample_operator(2))
    n = 2
    assert B[pos(1, n), pos(1, n)] == pytest.approx(SQ2)
    assert B[pos(-1, n), pos(-1, n)] == pytest.approx(SQ2)
    assert B[pos(1, n), pos(-1, n)] == pytest.approx(-1j)
    assert B[pos(-1, n), pos(1, n)] == pytest.approx(1j)
    assert np.allclose(B, sharp(counterexample_operator(2)))


def test_invert_singular_and_ill_conditioned():
    with pytest.raises(np.linalg.LinAlgError):
        invert(np.zeros((4, 4)))
    A = np.diag([1.0, 1.0, 1.0, 1e-13]).astype(complex)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        invert(A)
    assert any(issubclass(x.category, RuntimeWarning) for x in w)


def test_compose_truncation_mismatch():
    with pytest.raises(ValueError):
        compose(identity(2), identity(3))


def test_inverse_block_identity(rng):
    """Off-diagonal block of the inverse: b' = -a' b a'bar + b' bbar b'."""
    for _ in range(5):
        A = random_symplectic(4, rng)
        x, y = blocks(A), blocks(invert(A))
        # in storage order the conjugate blocks are d = a-bar and c = b-bar
        rhs = -y.a @ x.b @ y.d + y.b @ x.c @ y.b
        assert np.max(np.abs(y.b - rhs)) <= 1e-10


def test_closure_under_product_and_inverse(rng):
    A, B = random_symplectic(3, rng), random_symplectic(3, rng)
    for X in (A @ B, invert(A)):
        assert predicates(X, 1e-9).is_symplectic
