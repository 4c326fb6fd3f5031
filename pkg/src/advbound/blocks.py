"""Reduction of progress norms to small per-irrep blocks.

Restricting an invariant block decomposition to the stabilizer of one
input letter splits each block into copies of stabilizer irreps.  For an
adversary matrix assembled from block weights, the norm of the masked
difference (or ratio) equals the largest norm among small multiplicity-
sized matrices, one per stabilizer irrep, whose entries are traces of
projector/transporter products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from advbound import linalg
from advbound.config import DEFAULT_SEED
from advbound.problems import OracleProblem, output_partition
from advbound.symmetry import (
    GroupAction,
    IsotypicDecomposition,
    canonical_basis_of_span,
    is_multiplicity_free,
    transporter,
)
from advbound.bounds import AdversaryMatrix, masked

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


class BlockError(ValueError):
    """Raised for decompositions the reduction cannot handle."""


@dataclass(eq=False)
class BlockCopy:
    """One stabilizer-irrep copy inside a parent block."""

    parent: int                 # index of the parent block
    basis: np.ndarray           # (|F|, d) orthonormal columns
    fingerprint: tuple[float, ...]
    irrep_class: int = -1       # assigned when copies are grouped

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(eq=False)
class RestrictedDecomposition:
    """Stabilizer-irrep copies of every parent block, plus transporters."""

    parent: IsotypicDecomposition
    subgroup: GroupAction
    x: int
    copies: tuple[BlockCopy, ...]
    classes: tuple[tuple[int, ...], ...]   # copy indices per stabilizer irrep
    _reference_maps: dict = field(default_factory=dict, repr=False)
    _seed: int = DEFAULT_SEED

    def copy_transporter(self, dest: int, source: int) -> np.ndarray:
        """Partial isometry mapping copy ``source`` onto copy ``dest``.

        Built through a per-class reference copy so the family composes
        consistently; norms of coefficient matrices do not depend on the
        per-copy phase freedom this leaves.
        """
        ca, cb = self.copies[dest], self.copies[source]
        if ca.irrep_class != cb.irrep_class:
            raise BlockError("transporter requested between non-isomorphic copies")
        for idx in (dest, source):
            if idx not in self._reference_maps:
                ref = self.classes[self.copies[idx].irrep_class][0]
                self._reference_maps[idx] = transporter(
                    self.copies[ref].basis,
                    self.copies[idx].basis,
                    self.subgroup,
                    seed=self._seed,
                )
        return self._reference_maps[dest] @ self._reference_maps[source].conj().T


def _restricted_rep(basis: np.ndarray, perm: np.ndarray) -> np.ndarray:
    # Sub-block of the permutation action on an invariant subspace.
    inv = np.empty(len(perm), dtype=np.int64)
    inv[perm] = np.arange(len(perm))
    return basis.conj().T @ basis[inv, :]


def split_under_subgroup(
    basis: np.ndarray, subgroup: GroupAction, seed: int = DEFAULT_SEED
) -> list[np.ndarray]:
    """Split an invariant subspace into irreducible subgroup blocks.

    Averages a seeded random Hermitian matrix over the subgroup inside the
    subspace and clusters its eigenvectors; generic eigenvalue collisions
    retry with a fresh seed.
    """
    dim = basis.shape[1]
    perms = subgroup.element_perms()
    reps = [_restricted_rep(basis, p) for p in perms]
    for attempt in range(5):
        rng = np.random.default_rng([seed, dim, attempt])
        raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = (raw + raw.conj().T) / 2
        avg = np.zeros_like(h)
        for r in reps:
            avg += r @ h @ r.conj().T
        avg /= len(reps)
        w, v = np.linalg.eigh(avg)
        clusters = linalg.eigenvalue_clusters(w, rtol=1e-8)
        # Reject when two clusters sit closer than the splitting tolerance.
        centers = [float(w[cl].mean()) for cl in clusters]
        scale = max(1.0, float(np.abs(w).max(initial=0.0)))
        if any(
            abs(centers[i] - centers[j]) < 1e-7 * scale
            for i in range(len(centers))
            for j in range(i + 1, len(centers))
        ):
            continue
        out = []
        for cl in clusters:
            sub = canonical_basis_of_span(np.ascontiguousarray(v[:, cl]))
            out.append(basis @ sub)
        return out
    raise BlockError("subspace splitting stayed ambiguous over 5 seeds")


def _class_fingerprint(basis: np.ndarray, subgroup: GroupAction) -> tuple[float, ...]:
    vals = []
    for g, _ in subgroup.class_representatives():
        perm = subgroup.permutation_of(g)
        inv = np.empty(len(perm), dtype=np.int64)
        inv[perm] = np.arange(len(perm))
        vals.append(float(np.real(np.sum(basis[inv, :] * basis.conj()))))
    return tuple(vals)


def restrict(
    decomp: IsotypicDecomposition,
    group: GroupAction,
    x: int,
    seed: int = DEFAULT_SEED,
) -> RestrictedDecomposition:
    """Split every block of a multiplicity-free decomposition under the
    stabilizer of input ``x`` and group the pieces by stabilizer irrep."""
    if not is_multiplicity_free(group):
        raise BlockError("the reduction needs a multiplicity-free group action")
    sub = group.stabilizer(x)
    copies: list[BlockCopy] = []
    for k, block in enumerate(decomp.blocks):
        for piece in split_under_subgroup(block.basis, sub, seed=seed):
            copies.append(
                BlockCopy(
                    parent=k,
                    basis=piece,
                    fingerprint=_class_fingerprint(piece, sub),
                )
            )
    copies.sort(key=lambda c: (c.parent, tuple(round(v, 6) for v in c.fingerprint)))

    classes: list[list[int]] = []
    keys: list[tuple] = []
    for idx, copy in enumerate(copies):
        key = tuple(round(v, 6) for v in copy.fingerprint)
        if key in keys:
            cls = keys.index(key)
        else:
            keys.append(key)
            classes.append([])
            cls = len(keys) - 1
        copy.irrep_class = cls
        classes[cls].append(idx)
    for members in classes:
        dims = {copies[i].dim for i in members}
        if len(dims) != 1:
            raise BlockError("copies with equal characters disagree in dimension")
    total = sum(c.dim for c in copies)
    if total != decomp.action.problem.size:
        raise BlockError("restricted copies do not fill the space")
    return RestrictedDecomposition(
        parent=decomp,
        subgroup=sub,
        x=x,
        copies=tuple(copies),
        classes=tuple(tuple(m) for m in classes),
        _seed=seed,
    )


@dataclass(eq=False)
class ProgressBlock:
    """Coefficient matrix of one stabilizer irrep; rows/cols index copies."""

    irrep_class: int
    copy_ids: tuple[int, ...]
    dim: int                 # irrep dimension
    matrix: np.ndarray       # multiplicity x multiplicity

    @property
    def norm(self) -> float:
        return linalg.norm(self.matrix)

    @property
    def inverse_norm(self) -> float:
        w = np.linalg.eigvalsh(linalg.hermitian_part(self.matrix))
        if w.min() <= 1e-12:
            raise BlockError("block is singular; no inverse norm")
        return float(1.0 / w.min())


def _trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.sum(a * b.T))


def progress_blocks(
    weights: np.ndarray | list[float],
    restricted: RestrictedDecomposition,
    p: OracleProblem,
    x: int,
    variant: str,
    fast_y_path: bool = False,
) -> list[ProgressBlock]:
    """Per-irrep coefficient matrices of the masked adversary matrix.

    ``weights`` assigns the adversary eigenvalue to every parent block.
    The additive variant subtracts the unmasked diagonal; the
    multiplicative variant rescales rows and columns by the square roots
    of the parent weights (all weights must be at least 1 there).
    """
    w = np.asarray(weights, dtype=np.float64)
    decomp = restricted.parent
    if w.shape != (len(decomp.blocks),):
        raise BlockError("one weight per parent block required")
    if variant == ADDITIVE:
        if np.abs(w).max(initial=0.0) > 1 + 1e-9:
            raise BlockError("additive weights must lie in [-1, 1]")
    elif variant == MULTIPLICATIVE:
        if w.min(initial=1.0) < 1 - 1e-9:
            raise BlockError("multiplicative weights must be at least 1")
    else:
        raise BlockError(f"unknown variant {variant!r}")

    col = output_partition(p, x)
    outputs = np.unique(col)
    if fast_y_path:
        outputs = outputs[:1]
    projected: dict[tuple[int, int], np.ndarray] = {}
    for k, block in enumerate(decomp.blocks):
        if w[k] == 0.0:
            continue
        proj = block.projector
        for y in outputs:
            mask = col == y
            projected[(k, int(y))] = np.where(mask[:, None] & mask[None, :], proj, 0)

    out = []
    for cls, members in enumerate(restricted.classes):
        m = len(members)
        d = restricted.copies[members[0]].dim
        mat = np.zeros((m, m), dtype=np.complex128)
        for a_pos, a in enumerate(members):
            for b_pos, b in enumerate(members):
                trans = restricted.copy_transporter(a, b)
                total = 0.0 + 0.0j
                for (k, _y), proj in projected.items():
                    total += w[k] * _trace_product(proj, trans)
                if fast_y_path:
                    total *= len(np.unique(col))
                entry = total / d
                ka = restricted.copies[a].parent
                kb = restricted.copies[b].parent
                if variant == ADDITIVE:
                    if a == b:
                        entry -= w[ka]
                else:
                    entry /= np.sqrt(w[ka] * w[kb])
                mat[a_pos, b_pos] = entry
        herm_gap = float(np.abs(mat - mat.conj().T).max(initial=0.0))
        if herm_gap > 1e-9:
            raise BlockError(f"block {cls} not Hermitian (gap {herm_gap:.3e})")
        out.append(
            ProgressBlock(irrep_class=cls, copy_ids=tuple(members), dim=d, matrix=mat)
        )
    return out


@dataclass(frozen=True)
class BlockNormReport:
    direct: float
    from_blocks: float
    gap: float
    direct_backward: float | None = None
    from_blocks_backward: float | None = None
    gap_backward: float | None = None


def verify_block_norms(
    blocks: list[ProgressBlock],
    adv: AdversaryMatrix,
    p: OracleProblem,
    x: int,
    variant: str,
) -> BlockNormReport:
    """Compare the block-reduction norms against direct dense computation."""
    if variant == ADDITIVE:
        direct = linalg.norm(masked(adv.matrix, p, x) - adv.matrix)
        from_blocks = max(b.norm for b in blocks)
        return BlockNormReport(
            direct=direct, from_blocks=from_blocks, gap=abs(direct - from_blocks)
        )
    root = linalg.psd_power(adv.matrix, 0.5)
    inv_root = linalg.psd_power(adv.matrix, -0.5)
    masked_m = masked(adv.matrix, p, x)
    forward = linalg.norm(linalg.psd_power(masked_m, 0.5) @ inv_root) ** 2
    backward = linalg.norm(root @ linalg.psd_power(masked_m, -0.5)) ** 2
    blk_forward = max(b.norm for b in blocks)
    blk_backward = max(b.inverse_norm for b in blocks)
    return BlockNormReport(
        direct=forward,
        from_blocks=blk_forward,
        gap=abs(forward - blk_forward),
        direct_backward=backward,
        from_blocks_backward=blk_backward,
        gap_backward=abs(backward - blk_backward),
    )


def reconstruct_masked(
    weights: np.ndarray | list[float],
    restricted: RestrictedDecomposition,
    p: OracleProblem,
) -> np.ndarray:
    """Rebuild the masked adversary matrix from its per-irrep coefficients.

    Dual route to the Hadamard mask: coefficients are read off with the
    transporter family, then summed back as coefficient times transporter.
    """
    w = np.asarray(weights, dtype=np.float64)
    x = restricted.x
    blocks = progress_blocks(w, restricted, p, x, variant=ADDITIVE)
    size = p.size
    out = np.zeros((size, size), dtype=np.complex128)
    for blk in blocks:
        for a_pos, a in enumerate(blk.copy_ids):
            for b_pos, b in enumerate(blk.copy_ids):
                coeff = blk.matrix[a_pos, b_pos]
                if a == b:
                    coeff += w[restricted.copies[a].parent]
                out += coeff * restricted.copy_transporter(a, b)
    return out


# ---------------------------------------------------------------------------
# trace identities for doubly-restricted projector families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceIdentityReport:
    tuples_checked: int
    max_factorization_gap: float
    max_magnitude_gap: float
    max_nonisomorphic_residual: float

    def passed(self, tol: float = 1e-8) -> bool:
        return (
            self.max_factorization_gap <= tol
            and self.max_magnitude_gap <= tol
            and self.max_nonisomorphic_residual <= tol
        )


def projector_trace_identities(
    decomp: IsotypicDecomposition,
    group: GroupAction,
    x: int,
    y: int,
    seed: int = DEFAULT_SEED,
    max_tuples: int = 20000,
) -> TraceIdentityReport:
    """Check the two trace identities on irreps of the two-letter stabilizer.

    Leaves come from two ancestries (parent blocks restricted directly,
    and via the one-letter stabilizer first), so the projectors genuinely
    differ.  For tuples with non-isomorphic members both sides must vanish;
    for isomorphic ones the four-factor trace factorizes and the
    transporter overlap has the product-of-overlaps magnitude.
    """
    sub_x = group.stabilizer(x)
    sub_xy = group.stabilizer(x, y)
    leaves: list[np.ndarray] = []
    for block in decomp.blocks:
        leaves.extend(split_under_subgroup(block.basis, sub_xy, seed=seed))
        for mid in split_under_subgroup(block.basis, sub_x, seed=seed):
            leaves.extend(split_under_subgroup(mid, sub_xy, seed=seed + 1))
    fingerprints = [
        tuple(round(v, 6) for v in _class_fingerprint(leaf, sub_xy)) for leaf in leaves
    ]
    keys: list[tuple] = []
    classes: list[list[int]] = []
    for i, fp in enumerate(fingerprints):
        if fp in keys:
            classes[keys.index(fp)].append(i)
        else:
            keys.append(fp)
            classes.append([i])

    projs = [leaf @ leaf.conj().T for leaf in leaves]
    dims = [leaf.shape[1] for leaf in leaves]
    trans: dict[tuple[int, int], np.ndarray] = {}
    for members in classes:
        ref = members[0]
        maps = {
            i: transporter(leaves[ref], leaves[i], sub_xy, seed=seed) for i in members
        }
        for i in members:
            for j in members:
                trans[(i, j)] = maps[i] @ maps[j].conj().T

    checked = 0
    gap_fact = 0.0
    gap_mag = 0.0
    residual = 0.0
    n_leaves = len(leaves)
    for lam in range(n_leaves):
        p_lam = projs[lam]
        d = dims[lam]
        for mu in range(n_leaves):
            pm = p_lam @ projs[mu] @ p_lam
            t_mu = float(np.real(np.trace(p_lam @ projs[mu])))
            for n1 in range(n_leaves):
                for n2 in range(n_leaves):
                    if fingerprints[n1] != fingerprints[n2]:
                        continue
                    if checked >= max_tuples:
                        break
                    t = trans[(n1, n2)]
                    lhs = _trace_product(pm, t)
                    overlap = _trace_product(p_lam, t)
                    iso = fingerprints[lam] == fingerprints[mu] == fingerprints[n1]
                    if iso:
                        gap_fact = max(gap_fact, abs(lhs - t_mu * overlap / d))
                        t1 = max(0.0, float(np.real(np.trace(p_lam @ projs[n1]))))
                        t2 = max(0.0, float(np.real(np.trace(p_lam @ projs[n2]))))
                        gap_mag = max(gap_mag, abs(abs(overlap) - np.sqrt(t1 * t2)))
                    else:
                        residual = max(residual, abs(lhs))
                        if fingerprints[lam] != fingerprints[n1]:
                            residual = max(residual, abs(overlap))
                    checked += 1
    return TraceIdentityReport(
        tuples_checked=checked,
        max_factorization_gap=gap_fact,
        max_magnitude_gap=gap_mag,
        max_nonisomorphic_residual=residual,
    )
