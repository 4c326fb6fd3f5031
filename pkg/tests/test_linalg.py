import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from advbound import linalg


def random_hermitian(rng, n):
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (raw + raw.conj().T) / 2


def test_norm_identity_and_zero():
    assert linalg.norm(np.eye(5), "spectral") == pytest.approx(1.0)
    for kind in ("spectral", "trace", "frobenius"):
        assert linalg.norm(np.zeros((3, 3)), kind) == 0.0


def test_norm_rejects_non_finite():
    bad = np.array([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(linalg.LinalgError):
        linalg.norm(bad)


def test_norm_hermitian_fast_path_matches_svd():
    rng = np.random.default_rng(7)
    a = random_hermitian(rng, 80)
    s = np.linalg.svd(a, compute_uv=False)
    assert linalg.norm(a, "spectral") == pytest.approx(float(s[0]), abs=1e-11)
    assert linalg.norm(a, "trace") == pytest.approx(float(s.sum()), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_hoelder_inequality(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    lhs = linalg.norm(a @ b, "trace")
    rhs = linalg.norm(a, "frobenius") * linalg.norm(b, "frobenius")
    assert lhs <= rhs + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_norm_ordering(seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, 7)
    spectral = linalg.norm(a, "spectral")
    frob = linalg.norm(a, "frobenius")
    trace = linalg.norm(a, "trace")
    assert spectral <= frob + 1e-12
    assert frob <= trace + 1e-12


def test_trace_pairing_inequality():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = random_hermitian(rng, 6)
        h = random_hermitian(rng, 6)
        psd = h @ h.conj().T
        lhs = float(np.real(np.trace(a @ psd)))
        assert lhs <= linalg.norm(a, "spectral") * linalg.norm(psd, "trace") + 1e-9


def test_hadamard_basics():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4))
    assert np.allclose(linalg.hadamard(a, np.ones((4, 4))), a)
    assert np.allclose(linalg.hadamard(a, np.eye(4)), np.diag(np.diag(a)))
    with pytest.raises(linalg.LinalgError):
        linalg.hadamard(a, np.ones((3, 3)))


def test_eig_sorted_and_reconstruction():
    spec = linalg.eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 9)
    spec = linalg.eig_hermitian(a)
    assert linalg.norm(a - spec.reconstruct(), "frobenius") <= 1e-9 * max(
        1.0, linalg.norm(a, "frobenius")
    )
    v = spec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(9)).max() <= 1e-9


def test_eig_rank_one_projector():
    delta = np.full(4, 0.5)
    spec = linalg.eig_hermitian(np.outer(delta, delta))
    assert np.allclose(spec.eigenvalues, [0, 0, 0, 1], atol=1e-12)


def test_eig_deterministic_in_degenerate_spaces():
    # A matrix with a 2-dimensional eigenspace: repeat calls must agree bitwise.
    a = np.diag([1.0, 1.0, 2.0])
    s1 = linalg.eig_hermitian(a)
    s2 = linalg.eig_hermitian(a.copy())
    assert np.array_equal(s1.eigenvectors, s2.eigenvectors)
    rng = np.random.default_rng(3)
    h = random_hermitian(rng, 6)
    proj = linalg.eig_hermitian(h).eigenvectors[:, :3]
    degenerate = proj @ proj.conj().T  # eigenvalues 0 and 1, triply degenerate
    s1 = linalg.eig_hermitian(degenerate)
    s2 = linalg.eig_hermitian(degenerate.copy())
    assert np.array_equal(s1.eigenvectors, s2.eigenvectors)


def test_eig_rejects_non_hermitian():
    with pytest.raises(linalg.LinalgError):
        linalg.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_power_examples():
    assert np.allclose(linalg.psd_power(np.eye(3), -0.5), np.eye(3))
    assert np.allclose(linalg.psd_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]))


def test_psd_power_root_inverse_consistency():
    rng = np.random.default_rng(9)
    h = random_hermitian(rng, 6)
    psd = h @ h.conj().T + 0.2 * np.eye(6)
    root = linalg.psd_power(psd, 0.5)
    inv_root = linalg.psd_power(psd, -0.5)
    assert np.abs(root @ root - psd).max() < 1e-9
    assert np.abs(root @ inv_root - np.eye(6)).max() < 1e-9


def test_psd_power_rejects_bad_inputs():
    with pytest.raises(linalg.LinalgError):
        linalg.psd_power(np.diag([1.0, -0.5]), 0.5)
    with pytest.raises(linalg.LinalgError):
        linalg.psd_power(np.diag([1.0, 0.0]), -0.5)


def test_pinch_identity_and_coordinates():
    rng = np.random.default_rng(2)
    a = random_hermitian(rng, 4)
    assert np.allclose(linalg.pinch(a, [np.eye(4)]), a)
    coords = [np.diag((np.arange(4) == i).astype(float)) for i in range(4)]
    assert np.allclose(linalg.pinch(a, coords), np.diag(np.diag(a)))


def test_pinch_preserves_trace_and_psd():
    rng = np.random.default_rng(4)
    h = random_hermitian(rng, 6)
    psd = h @ h.conj().T
    half = np.zeros((6, 6))
    half[:3, :3] = np.eye(3)
    other = np.eye(6) - half
    out = linalg.pinch(psd, [half, other])
    assert np.trace(out) == pytest.approx(np.trace(psd).real)
    assert np.linalg.eigvalsh(out).min() >= -1e-10


def test_pinch_rejects_bad_family():
    a = np.eye(3)
    with pytest.raises(linalg.LinalgError):
        linalg.pinch(a, [np.eye(3), np.eye(3)])
    with pytest.raises(linalg.LinalgError):
        linalg.pinch(a, [0.5 * np.eye(3)])


def test_require_hermitian_warns_then_rejects():
    almost = np.eye(3) + 1e-8 * np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.warns(UserWarning):
        out = linalg.require_hermitian(almost)
    assert np.abs(out - out.conj().T).max() == 0.0
    with pytest.raises(linalg.LinalgError):
        linalg.require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
