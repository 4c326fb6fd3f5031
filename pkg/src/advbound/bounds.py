"""Adversary matrices and the additive, hybrid and multiplicative bounds.

An adversary matrix fixes the uniform superposition over the family and is
either norm-bounded (additive) or bounded below by the identity
(multiplicative).  Each bound divides a success-probability term by the
worst-case progress a single oracle call can make.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from advbound import linalg
from advbound.problems import (
    KIND_CLASSICAL,
    KIND_COHERENT,
    OracleProblem,
    agreement_matrix,
    target_gram,
    uniform_state,
)
from advbound.symmetry import IsotypicDecomposition
from advbound.young import erasure_weights

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


class BoundError(ValueError):
    """Raised for invalid adversary matrices or violated hypotheses."""


class UnsupportedProblemError(BoundError):
    """Raised where the non-coherent junk optimization would be needed."""


@dataclass(eq=False)
class AdversaryMatrix:
    """Hermitian matrix over the function family with a kind tag."""

    matrix: np.ndarray
    kind: str
    _spectrum: linalg.Spectrum | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in (ADDITIVE, MULTIPLICATIVE):
            raise BoundError(f"unknown adversary kind {self.kind!r}")
        self.matrix = linalg.require_hermitian(self.matrix, "adversary matrix")

    @property
    def spectrum(self) -> linalg.Spectrum:
        if self._spectrum is None:
            self._spectrum = linalg.eig_hermitian(self.matrix)
        return self._spectrum

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    fixes_uniform: bool
    kind_constraint: bool
    zero_condition: bool | None   # None: not applicable / not checkable
    messages: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.fixes_uniform and self.kind_constraint and self.zero_condition is not False


@dataclass(eq=False)
class BoundReport:
    """One evaluated lower bound with all intermediate quantities.

    ``numerator`` and ``denominator`` are already in log form for the
    multiplicative method; ``per_x_denominators`` always carries the raw
    per-input norms.  Input letters are 0-based.
    """

    method: str
    problem: str
    epsilon: float
    lambda_threshold: float | None
    eta: float | None
    numerator: float
    per_x_denominators: tuple[tuple[int, float], ...]
    denominator: float
    bound: float | None
    witness_x: int | None
    flags: tuple[str, ...] = ()
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "problem": self.problem,
            "epsilon": self.epsilon,
            "lambda_threshold": self.lambda_threshold,
            "eta": self.eta,
            "numerator": self.numerator,
            "per_x_denominators": [[x, v] for x, v in self.per_x_denominators],
            "denominator": self.denominator,
            "bound": self.bound,
            "witness_x": self.witness_x,
            "flags": list(self.flags),
            "params": dict(sorted(self.params.items())),
        }


def masked(matrix: np.ndarray, p: OracleProblem, x: int) -> np.ndarray:
    """Entrywise mask of ``matrix`` by the agreement pattern at input ``x``.

    Identical to pinching by the output projectors of ``x``.
    """
    return linalg.hadamard(matrix, agreement_matrix(p, x))


def validate(adv: AdversaryMatrix, p: OracleProblem) -> ValidationReport:
    """Kind constraints plus, for additive use, the zero-overlap condition."""
    msgs: list[str] = []
    delta = uniform_state(p)
    fixes = bool(np.linalg.norm(adv.matrix @ delta - delta) <= 1e-9)
    if not fixes:
        msgs.append("matrix does not fix the uniform superposition")
    w = adv.spectrum.eigenvalues
    if adv.kind == ADDITIVE:
        kind_ok = bool(max(abs(w[0]), abs(w[-1])) <= 1 + 1e-9)
        if not kind_ok:
            msgs.append(f"spectral norm {max(abs(w[0]), abs(w[-1])):.6f} exceeds 1")
    else:
        kind_ok = bool(w[0] >= 1 - 1e-9)
        if not kind_ok:
            msgs.append(f"smallest eigenvalue {w[0]:.6f} below 1")
    zero: bool | None = None
    if adv.kind == ADDITIVE:
        if p.kind == KIND_CLASSICAL:
            lab = np.asarray(p.labels)
            same = lab[:, None] == lab[None, :]
            worst = float(np.abs(adv.matrix[same]).max(initial=0.0))
            zero = worst <= 1e-9
            if not zero:
                msgs.append(f"entry {worst:.3e} on a label-equal pair; should vanish")
        elif p.kind == KIND_COHERENT:
            overlap = float(abs(np.trace(adv.matrix @ target_gram(p))))
            zero = overlap <= 1e-9
            if not zero:
                msgs.append(f"trace against the target state is {overlap:.3e}, not 0")
        else:
            zero = None
            msgs.append("zero condition over arbitrary junk is not checkable")
    return ValidationReport(
        fixes_uniform=fixes,
        kind_constraint=kind_ok,
        zero_condition=zero,
        messages=tuple(msgs),
    )


def eta(p: OracleProblem, bad_projector: np.ndarray) -> float:
    """Worst overlap of any valid final state with the bad subspace.

    Classical problems maximize the squared norm of label-projector times
    bad-projector; coherent generation takes the trace against the target
    state directly (the junk matrix is all ones).
    """
    proj = np.asarray(bad_projector)
    if np.abs(proj @ proj - proj).max(initial=0.0) > 1e-8:
        raise BoundError("bad subspace argument is not a projector")
    if p.kind == KIND_CLASSICAL:
        lab = np.asarray(p.labels)
        worst = 0.0
        for z in np.unique(lab):
            rows = proj[lab == z, :]
            s = np.linalg.svd(rows, compute_uv=False)
            worst = max(worst, float(s[0]) ** 2 if s.size else 0.0)
        return worst
    if p.kind == KIND_COHERENT:
        return float(np.real(np.trace(proj @ target_gram(p))))
    raise UnsupportedProblemError(
        "junk optimization unsupported: non-coherent generation needs a "
        "maximization over all junk Gram matrices"
    )


def _per_x_norms(fn, p: OracleProblem, jobs: int = 1) -> list[float]:
    xs = range(p.n_inputs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, xs))
    return [fn(x) for x in xs]


def success_term(epsilon: float) -> float:
    """Final progress-value budget of the plain additive method."""
    if not 0 <= epsilon < 1:
        raise BoundError("epsilon must lie in [0, 1)")
    return epsilon + 2 * math.sqrt(epsilon * (1 - epsilon))


def additive_bound(
    adv: AdversaryMatrix, p: OracleProblem, epsilon: float, jobs: int = 1
) -> BoundReport:
    """Additive adversary bound (1 - C(eps)) / max_x ||masked - full||."""
    if adv.kind != ADDITIVE:
        raise BoundError("additive bound needs an additive adversary matrix")
    report = validate(adv, p)
    if not report.passed or report.zero_condition is not True:
        raise BoundError(f"adversary validation failed: {report.messages}")
    c_eps = success_term(epsilon)
    numerator = 1 - c_eps
    per_x = _per_x_norms(
        lambda x: linalg.norm(masked(adv.matrix, p, x) - adv.matrix), p, jobs
    )
    witness = int(np.argmax(per_x))
    denominator = per_x[witness]
    flags = ("vacuous",) if c_eps >= 1 else ()
    return BoundReport(
        method="additive",
        problem=p.name,
        epsilon=epsilon,
        lambda_threshold=None,
        eta=None,
        numerator=numerator,
        per_x_denominators=tuple((x, v) for x, v in enumerate(per_x)),
        denominator=denominator,
        bound=numerator / denominator,
        witness_x=witness,
        flags=flags,
    )


def _bad_projector_above(adv: AdversaryMatrix, threshold: float) -> np.ndarray:
    # Strictly above the threshold; boundary eigenvalues go to the good side.
    spec = adv.spectrum
    keep = spec.eigenvalues > threshold + 1e-9
    basis = spec.eigenvectors[:, keep]
    return basis @ basis.conj().T


def _bad_projector_below(adv: AdversaryMatrix, threshold: float) -> np.ndarray:
    spec = adv.spectrum
    keep = spec.eigenvalues < threshold - 1e-9
    basis = spec.eigenvectors[:, keep]
    return basis @ basis.conj().T


def hybrid_bound(
    adv: AdversaryMatrix,
    p: OracleProblem,
    epsilon: float,
    lambda_tilde: float,
    jobs: int = 1,
) -> BoundReport:
    """Hybrid bound: (1 - lt) (sqrt(1-eps) - sqrt(eta))^2 over the same norm.

    The bad subspace collects eigenvalues strictly above ``lambda_tilde``;
    no zero-overlap condition is required, which is what keeps the method
    alive at small success probability.
    """
    if adv.kind != ADDITIVE:
        raise BoundError("hybrid bound needs an additive adversary matrix")
    if lambda_tilde >= 1:
        raise BoundError("threshold must satisfy lambda_tilde < 1")
    report = validate(adv, p)
    if not (report.fixes_uniform and report.kind_constraint):
        raise BoundError(f"adversary validation failed: {report.messages}")
    if not 0 <= epsilon < 1:
        raise BoundError("epsilon must lie in [0, 1)")
    bad = _bad_projector_above(adv, lambda_tilde)
    eta_val = eta(p, bad)
    if eta_val > 1 - epsilon + 1e-12:
        raise BoundError(
            f"hypothesis violated: eta {eta_val:.6f} exceeds 1 - epsilon {1 - epsilon:.6f}"
        )
    numerator = (1 - lambda_tilde) * (math.sqrt(1 - epsilon) - math.sqrt(max(eta_val, 0.0))) ** 2
    per_x = _per_x_norms(
        lambda x: linalg.norm(masked(adv.matrix, p, x) - adv.matrix), p, jobs
    )
    witness = int(np.argmax(per_x))
    denominator = per_x[witness]
    return BoundReport(
        method="hybrid",
        problem=p.name,
        epsilon=epsilon,
        lambda_threshold=lambda_tilde,
        eta=eta_val,
        numerator=numerator,
        per_x_denominators=tuple((x, v) for x, v in enumerate(per_x)),
        denominator=denominator,
        bound=numerator / denominator,
        witness_x=witness,
    )


def _ratio_norms(adv: AdversaryMatrix, p: OracleProblem, x: int) -> float:
    root = linalg.psd_power(adv.matrix, 0.5)
    inv_root = linalg.psd_power(adv.matrix, -0.5)
    masked_m = masked(adv.matrix, p, x)
    m_root = linalg.psd_power(masked_m, 0.5)
    m_inv_root = linalg.psd_power(masked_m, -0.5)
    forward = linalg.norm(m_root @ inv_root) ** 2
    backward = linalg.norm(root @ m_inv_root) ** 2
    return max(forward, backward)


def multiplicative_bound(
    adv: AdversaryMatrix,
    p: OracleProblem,
    epsilon: float,
    lam: float,
    jobs: int = 1,
) -> BoundReport:
    """Multiplicative bound: log K over the log of the worst ratio norm."""
    if adv.kind != MULTIPLICATIVE:
        raise BoundError("multiplicative bound needs a multiplicative adversary matrix")
    if lam <= 1:
        raise BoundError("threshold must satisfy lambda > 1")
    report = validate(adv, p)
    if not report.passed:
        raise BoundError(f"adversary validation failed: {report.messages}")
    if not 0 <= epsilon < 1:
        raise BoundError("epsilon must lie in [0, 1)")
    bad = _bad_projector_below(adv, lam)
    eta_val = eta(p, bad)
    if eta_val > 1 - epsilon + 1e-12:
        raise BoundError(
            f"hypothesis violated: eta {eta_val:.6f} exceeds 1 - epsilon {1 - epsilon:.6f}"
        )
    k_val = 1 + (lam - 1) * (math.sqrt(1 - epsilon) - math.sqrt(max(eta_val, 0.0))) ** 2
    numerator = math.log(k_val)
    per_x = _per_x_norms(lambda x: _ratio_norms(adv, p, x), p, jobs)
    witness = int(np.argmax(per_x))
    worst = per_x[witness]
    flags: tuple[str, ...] = ()
    bound: float | None
    if worst <= 1 + 1e-12:
        flags = ("no-progress",)
        denominator = 0.0
        bound = None
    else:
        denominator = math.log(worst)
        bound = numerator / denominator
    return BoundReport(
        method="multiplicative",
        problem=p.name,
        epsilon=epsilon,
        lambda_threshold=lam,
        eta=eta_val,
        numerator=numerator,
        per_x_denominators=tuple((x, v) for x, v in enumerate(per_x)),
        denominator=denominator,
        bound=bound,
        witness_x=witness,
        flags=flags,
    )


def multiplicative_family(adv: AdversaryMatrix, gamma: float) -> AdversaryMatrix:
    """I + gamma (I - additive matrix): a valid multiplicative matrix for gamma > 0."""
    if adv.kind != ADDITIVE:
        raise BoundError("the family construction starts from an additive matrix")
    if gamma <= 0:
        raise BoundError("gamma must be positive")
    eye = np.eye(adv.dim)
    return AdversaryMatrix(matrix=eye + gamma * (eye - adv.matrix), kind=MULTIPLICATIVE)


def madv_gamma_scan(
    adv: AdversaryMatrix,
    p: OracleProblem,
    epsilon: float,
    lambda_tilde: float,
    gamma_grid: list[float],
    jobs: int = 1,
) -> list[tuple[float, BoundReport]]:
    """Evaluate the multiplicative bound along the family I + gamma (I - A).

    The threshold scales as 1 + gamma (1 - lambda_tilde); as gamma shrinks
    the values approach the hybrid bound (reported, not asserted).
    """
    out = []
    for gamma in gamma_grid:
        if gamma <= 0:
            raise BoundError("gamma grid values must be positive")
        fam = multiplicative_family(adv, gamma)
        lam = 1 + gamma * (1 - lambda_tilde)
        rep = multiplicative_bound(fam, p, epsilon, lam, jobs=jobs)
        rep.params["gamma"] = gamma
        out.append((gamma, rep))
    return out


def search_adversary(n: int, gamma: float | None = None, kind: str = ADDITIVE) -> AdversaryMatrix:
    """Uniform-block adversary for search: 1 on the uniform direction, gamma off it."""
    if n < 2:
        raise BoundError("need n >= 2")
    if gamma is None:
        gamma = -1.0 / (n - 1)
    top = np.full((n, n), 1.0 / n)
    matrix = top + gamma * (np.eye(n) - top)
    return AdversaryMatrix(matrix=matrix, kind=kind)


def search_closed_forms(n: int, epsilon: float) -> tuple[float, float, float]:
    """Reference values for search: additive and hybrid exactly, plus a
    scaling curve (constant set to 1, times log 2) for the multiplicative
    regime, which is only known up to its asymptotic order."""
    if n < 2:
        raise BoundError("need n >= 2")
    if not 0 <= epsilon < 1 - 1.0 / n:
        raise BoundError("epsilon must lie in [0, 1 - 1/n)")
    add = (1 - epsilon - 2 * math.sqrt(epsilon * (1 - epsilon))) * math.sqrt(n - 1)
    beta = math.sqrt(1 - epsilon) - 1 / math.sqrt(n)
    hyb = beta**2 * math.sqrt(n - 1)
    madv_ref = math.log(2) * beta * math.sqrt(n)
    return add, hyb, madv_ref


def block_weights(adv: AdversaryMatrix, decomp: IsotypicDecomposition) -> np.ndarray:
    """Per-block eigenvalue of an adversary matrix commuting with the action."""
    out = []
    for block in decomp.blocks:
        val = np.einsum("ij,ij->", block.basis.conj(), adv.matrix @ block.basis)
        out.append(float(np.real(val)) / block.dim)
    return np.asarray(out)


def erasure_adversary(decomp: IsotypicDecomposition) -> tuple[AdversaryMatrix, np.ndarray]:
    """Additive adversary for index erasure from the block decomposition.

    Blocks whose two below-row shapes agree get the weight tied to the box
    count; all others get zero.  Returns the matrix and the weight vector
    aligned with the decomposition blocks.
    """
    problem = decomp.action.problem
    weights = np.zeros(len(decomp.blocks))
    gammas = erasure_weights(problem.n_inputs)
    for i, block in enumerate(decomp.blocks):
        if block.label is None:
            raise BoundError("decomposition blocks lack diagram labels")
        lam_in, lam_out = block.label
        if lam_in == lam_out:
            weights[i] = gammas[lam_in.size]
    matrix = decomp.weighted_sum(weights)
    return AdversaryMatrix(matrix=matrix.real, kind=ADDITIVE), weights
