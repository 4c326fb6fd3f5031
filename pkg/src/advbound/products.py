"""Tensor powers of problems and the finitely checkable direct-product facts.

For k independent instances the adversary matrix is the Kronecker power;
per-factor masking leaves the worst ratio norm unchanged, and every
eigenvector of the power below the rescaled threshold has almost no
well-progressed factors.  Only these finite identities are implemented;
the asymptotic success-decay constants are out of numeric reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from advbound import linalg
from advbound.config import MAX_PRODUCT_FAMILY
from advbound.problems import (
    KIND_CLASSICAL,
    OracleProblem,
    target_gram,
)
from advbound.bounds import MULTIPLICATIVE, AdversaryMatrix, masked


class ProductError(ValueError):
    """Raised for oversized powers or unsupported adversary kinds."""


@dataclass(eq=False)
class ProductProblem:
    """k independent instances; input letters are (instance, base letter)."""

    base: OracleProblem
    k: int
    problem: OracleProblem

    def letter(self, instance: int, x: int) -> int:
        return instance * self.base.n_inputs + x


def tensor_problem(base: OracleProblem, k: int) -> ProductProblem:
    """Combine k instances into one problem on a k-fold larger input alphabet."""
    if k < 1:
        raise ProductError("need k >= 1")
    if base.size**k > MAX_PRODUCT_FAMILY:
        raise ProductError(f"family size {base.size}**{k} exceeds the guard")
    functions = []
    labels: list[int] | None = [] if base.kind == KIND_CLASSICAL else None
    label_radix = max(base.labels) + 1 if base.labels else 0
    for combo in iter_product(range(base.size), repeat=k):
        merged: tuple[int, ...] = ()
        for f_idx in combo:
            merged = merged + base.functions[f_idx]
        functions.append(merged)
        if labels is not None:
            lab = 0
            for f_idx in combo:
                lab = lab * label_radix + base.labels[f_idx]
            labels.append(lab)
    gram = None
    if base.kind != KIND_CLASSICAL:
        gram = base.gram_matrix()
        out = gram
        for _ in range(k - 1):
            out = np.kron(out, gram)
        gram = out
    derived = OracleProblem(
        n_inputs=base.n_inputs * k,
        n_outputs=base.n_outputs,
        functions=tuple(functions),
        kind=base.kind,
        labels=tuple(labels) if labels is not None else None,
        gram=gram,
        name=f"{base.name}-power-{k}",
    )
    return ProductProblem(base=base, k=k, problem=derived)


def tensor_adversary(adv: AdversaryMatrix, k: int) -> AdversaryMatrix:
    """Kronecker power of a multiplicative adversary matrix.

    Additive matrices are refused: the power neither stays norm-bounded in
    a useful way nor keeps the zero-overlap condition.
    """
    if adv.kind != MULTIPLICATIVE:
        raise ProductError("tensor powers are built for multiplicative matrices only")
    out = adv.matrix
    for _ in range(k - 1):
        out = np.kron(out, adv.matrix)
    power = AdversaryMatrix(matrix=out, kind=MULTIPLICATIVE)
    delta = uniform_state_power(adv.dim, k)
    if np.linalg.norm(power.matrix @ delta - delta) > 1e-9:
        raise ProductError("tensor power no longer fixes the uniform superposition")
    return power


def uniform_state_power(dim: int, k: int) -> np.ndarray:
    return np.full(dim**k, (1.0 / math.sqrt(dim)) ** k)


@dataclass(frozen=True)
class FactorNormReport:
    base_value: float
    per_letter: tuple[tuple[int, int, float], ...]  # (instance, base letter, value)
    max_gap: float

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_gap <= tol


def verify_factor_norm_identity(
    adv: AdversaryMatrix, base: OracleProblem, k: int
) -> FactorNormReport:
    """Masked-over-full ratio norms agree between any factor and the base."""
    prod = tensor_problem(base, k)
    inv_root_base = linalg.psd_power(adv.matrix, -0.5)
    base_value = max(
        linalg.norm(linalg.psd_power(masked(adv.matrix, base, x), 0.5) @ inv_root_base)
        for x in range(base.n_inputs)
    )
    power = tensor_adversary(adv, k)
    inv_root = linalg.psd_power(power.matrix, -0.5)
    rows = []
    worst = 0.0
    for i in range(k):
        for x in range(base.n_inputs):
            letter = prod.letter(i, x)
            val = linalg.norm(
                linalg.psd_power(masked(power.matrix, prod.problem, letter), 0.5) @ inv_root
            )
            rows.append((i, x, val))
            worst = max(worst, abs(val - base_value))
    return FactorNormReport(
        base_value=base_value, per_letter=tuple(rows), max_gap=worst
    )


@dataclass(frozen=True)
class BadSubspaceReport:
    lam: float
    lam_power: float
    k: int
    patterns: tuple[tuple[float, int, bool], ...]  # (eigenvalue, good factors, below threshold)
    inclusion_holds: bool
    eta_base: float | None
    eta_power: float | None


def bad_subspace_inclusion(
    adv: AdversaryMatrix, base: OracleProblem, lam: float, k: int
) -> BadSubspaceReport:
    """Classify Kronecker-power eigenvectors by their good/bad factor counts.

    Every eigenvalue below lam**(k/10) must come from a factor pattern with
    fewer than k/10 good factors (compared exactly as 10 * good < k).  For
    coherent problems the report also carries the bad-subspace overlap of
    the base and power target states.
    """
    if lam <= 1:
        raise ProductError("need lam > 1")
    if adv.kind != MULTIPLICATIVE:
        raise ProductError("bad-subspace classification needs a multiplicative matrix")
    spec = adv.spectrum
    good_flags = spec.eigenvalues >= lam - 1e-9
    lam_power = lam ** (k / 10.0)
    patterns = []
    holds = True
    for combo in iter_product(range(adv.dim), repeat=k):
        value = float(np.prod(spec.eigenvalues[list(combo)]))
        good = int(np.sum(good_flags[list(combo)]))
        below = value < lam_power - 1e-9
        if below and not 10 * good < k:
            holds = False
        patterns.append((value, good, below))

    eta_base = eta_power = None
    if base.kind != KIND_CLASSICAL:
        bad_basis = spec.eigenvectors[:, ~good_flags]
        base_rho = target_gram(base)
        eta_base = float(
            np.real(np.trace(bad_basis @ bad_basis.conj().T @ base_rho))
        )
        prod = tensor_problem(base, k)
        power_rho = target_gram(prod.problem)
        power = tensor_adversary(adv, k)
        pw = power.spectrum
        bad_cols = pw.eigenvalues < lam_power - 1e-9
        bb = pw.eigenvectors[:, bad_cols]
        eta_power = float(np.real(np.trace(bb @ bb.conj().T @ power_rho)))
    return BadSubspaceReport(
        lam=lam,
        lam_power=lam_power,
        k=k,
        patterns=tuple(patterns),
        inclusion_holds=holds,
        eta_base=eta_base,
        eta_power=eta_power,
    )
