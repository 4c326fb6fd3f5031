"""Dense complex Hermitian linear algebra.

Norms, canonical eigendecomposition, PSD matrix powers, Hadamard products
and projector pinching.  Everything is dense double precision and every
function is a pure function of its inputs, so calls are safe from parallel
workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from advbound.config import EIG_CLUSTER_RTOL, HERMITICITY_WARN

# Inputs whose asymmetry exceeds this are rejected rather than symmetrized.
_HERMITICITY_REJECT = 1e-6


class LinalgError(ValueError):
    """Raised for inputs violating a matrix-level precondition."""


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition with ascending eigenvalues and canonical vectors."""

    eigenvalues: np.ndarray   # (n,) real, ascending
    eigenvectors: np.ndarray  # (n, n), column k pairs with eigenvalues[k]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a.astype(np.complex128, copy=False)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return (a + a.conj().T) / 2


def require_hermitian(a: np.ndarray, context: str = "matrix") -> np.ndarray:
    """Symmetrize ``a``, warning above 1e-9 asymmetry and rejecting gross ones.

    Downstream group averaging accumulates rounding, so mild asymmetry is
    repaired silently instead of erroring.
    """
    a = _as_square(a)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    asym = float(np.abs(a - a.conj().T).max(initial=0.0)) / scale
    if asym > _HERMITICITY_REJECT:
        raise LinalgError(f"{context} is not Hermitian (asymmetry {asym:.3e})")
    if asym > HERMITICITY_WARN:
        warnings.warn(
            f"{context} asymmetry {asym:.3e} above {HERMITICITY_WARN:.0e}; symmetrizing",
            stacklevel=2,
        )
    return hermitian_part(a)


def norm(a: np.ndarray, kind: str = "spectral") -> float:
    """Matrix norm: ``spectral`` (largest singular value), ``trace`` or ``frobenius``."""
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    if kind == "frobenius":
        return float(np.linalg.norm(a))
    # Singular values of a Hermitian matrix are its absolute eigenvalues,
    # which are much cheaper than a full SVD at these sizes.
    if (
        a.ndim == 2
        and a.shape[0] == a.shape[1]
        and a.shape[0] > 64
        and np.abs(a - a.conj().T).max(initial=0.0) == 0.0
    ):
        s = np.sort(np.abs(np.linalg.eigvalsh(a)))[::-1]
    else:
        s = np.linalg.svd(a, compute_uv=False)
    if kind == "spectral":
        return float(s[0]) if s.size else 0.0
    if kind == "trace":
        return float(s.sum())
    raise LinalgError(f"unknown norm kind {kind!r}")


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise product; the two factors must have identical shapes."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry is real positive (lowest index wins ties)."""
    mags = np.abs(v)
    top = float(mags.max(initial=0.0))
    if top == 0.0:
        return v
    idx = int(np.flatnonzero(mags >= top * (1 - 1e-12))[0])
    phase = v[idx] / abs(v[idx])
    return v / phase


def eigenvalue_clusters(w: np.ndarray, rtol: float = EIG_CLUSTER_RTOL) -> list[slice]:
    """Group ascending eigenvalues into near-degenerate clusters."""
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    breaks = np.flatnonzero(np.diff(w) > rtol * scale) + 1
    edges = [0, *breaks.tolist(), len(w)]
    return [slice(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def canonical_basis_of_span(basis: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Replace an orthonormal basis of a subspace by a canonical one.

    Coordinate axes are projected onto the span in index order and
    Gram-Schmidt kept when independent, which fixes the rotational freedom
    of degenerate eigenspaces deterministically.
    """
    n, d = basis.shape
    picked: list[np.ndarray] = []
    for i in range(n):
        v = basis @ basis[i, :].conj()
        for u in picked:
            v = v - u * (u.conj() @ v)
        nv = float(np.linalg.norm(v))
        if nv > tol:
            picked.append(_canonical_phase(v / nv))
            if len(picked) == d:
                break
    if len(picked) != d:
        raise LinalgError("canonicalization failed to span the cluster")
    return np.column_stack(picked)


def eig_hermitian(a: np.ndarray) -> Spectrum:
    """Eigendecomposition with deterministic eigenvectors.

    Within each near-degenerate eigenvalue cluster the basis is rebuilt by
    Gram-Schmidt against coordinate axes in index order; isolated vectors
    get a canonical phase.  Repeat runs on equal inputs give equal output.
    """
    h = require_hermitian(a, "eig_hermitian input")
    w, v = np.linalg.eigh(h)
    v = v.astype(np.complex128, copy=True)
    for cl in eigenvalue_clusters(w):
        if cl.stop - cl.start > 1:
            v[:, cl] = canonical_basis_of_span(v[:, cl])
        else:
            v[:, cl.start] = _canonical_phase(v[:, cl.start])
    if np.abs(v.imag).max(initial=0.0) == 0.0:
        v = v.real.astype(np.complex128)
    return Spectrum(eigenvalues=w, eigenvectors=v)


def psd_power(a: np.ndarray, p: float) -> np.ndarray:
    """``a**p`` through the spectrum; ``a`` must be PSD (definite when p < 0)."""
    spec = eig_hermitian(a)
    w = spec.eigenvalues.copy()
    scale = max(1.0, float(np.abs(w).max()))
    if float(w.min()) < -1e-9 * scale:
        raise LinalgError(f"matrix not PSD (min eigenvalue {w.min():.3e})")
    if p < 0 and float(w.min()) <= 1e-10:
        raise LinalgError("matrix numerically singular, cannot take a negative power")
    w = np.clip(w, 0.0 if p >= 0 else None, None)
    v = spec.eigenvectors
    return hermitian_part((v * w**p) @ v.conj().T)


def _check_projector_family(projectors: list[np.ndarray], dim: int, tol: float) -> None:
    total = np.zeros((dim, dim), dtype=np.complex128)
    for k, pr in enumerate(projectors):
        pr = np.asarray(pr)
        if pr.shape != (dim, dim):
            raise LinalgError(f"projector {k} has shape {pr.shape}, expected {(dim, dim)}")
        if np.abs(pr - pr.conj().T).max(initial=0.0) > tol:
            raise LinalgError(f"projector {k} is not Hermitian")
        if np.abs(pr @ pr - pr).max(initial=0.0) > tol:
            raise LinalgError(f"projector {k} is not idempotent")
        total += pr
    if np.abs(total - np.eye(dim)).max(initial=0.0) > tol:
        raise LinalgError("projector family does not resolve the identity")


def pinch(a: np.ndarray, projectors: list[np.ndarray], tol: float = 1e-9) -> np.ndarray:
    """Sum of ``P a P`` over an orthogonal resolution of the identity."""
    a = _as_square(a)
    projs = [np.asarray(p, dtype=np.complex128) for p in projectors]
    _check_projector_family(projs, a.shape[0], tol)
    out = np.zeros_like(a)
    for pr in projs:
        out += pr @ a @ pr
    return out
