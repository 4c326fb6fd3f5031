"""Permutation symmetries of oracle problems.

A group element is a pair of permutations acting on a function family by
relabeling inputs and outputs.  The module computes orbit bases of the
pair action (spanning the commutant), tests multiplicity-freeness, splits
the function space into invariant blocks, and builds the partial
isometries that identify isomorphic blocks.

Groups with full symmetric factors (the common case) carry a product
structure so conjugacy classes and element sweeps never require storing
huge element lists; everything else is enumerated explicitly up to the
size cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations as iter_permutations

import numpy as np

from advbound import young
from advbound.config import DEFAULT_SEED, MAX_GROUP_ORDER
from advbound.linalg import canonical_basis_of_span
from advbound.problems import OracleProblem, ProblemError


class GroupError(ValueError):
    """Raised for group-size violations and non-automorphism actions."""


class DecompositionError(RuntimeError):
    """Raised when eigenvalue clustering stays ambiguous across retries."""


def _identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _inverse(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


@dataclass(frozen=True)
class GroupElement:
    """Input/output permutation pair; acts on f as x -> tau[f[pi[x]]]."""

    pi: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self) -> None:
        for perm in (self.pi, self.tau):
            if sorted(perm) != list(range(len(perm))):
                raise GroupError(f"{perm} is not a permutation")

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Element whose action equals self's action after other's."""
        pi = tuple(other.pi[v] for v in self.pi)
        tau = tuple(self.tau[v] for v in other.tau)
        return GroupElement(pi=pi, tau=tau)

    def inverse(self) -> "GroupElement":
        return GroupElement(pi=_inverse(self.pi), tau=_inverse(self.tau))

    def cycle_types(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return _cycle_type(self.pi), _cycle_type(self.tau)


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        n, cur = 0, start
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def _embed_cycles(points: tuple[int, ...], parts: tuple[int, ...], size: int) -> tuple[int, ...]:
    perm = list(range(size))
    pos = 0
    for length in parts:
        cyc = points[pos : pos + length]
        for i in range(length):
            perm[cyc[i]] = cyc[(i + 1) % length]
        pos += length
    return tuple(perm)


@dataclass(frozen=True)
class ProductStructure:
    """Marks a group as Sym(pi_moving) x Sym(tau_moving), other letters fixed."""

    pi_moving: tuple[int, ...]
    tau_moving: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.factorial(len(self.pi_moving)) * math.factorial(len(self.tau_moving))


def _adjacent_transpositions(points: tuple[int, ...], size: int) -> list[tuple[int, ...]]:
    out = []
    for a, b in zip(points, points[1:]):
        perm = list(range(size))
        perm[a], perm[b] = b, a
        out.append(tuple(perm))
    return out


@dataclass(eq=False)
class GroupAction:
    """A permutation group together with its action on a function family."""

    problem: OracleProblem
    generators: tuple[GroupElement, ...]
    product: ProductStructure | None = None
    _elements: tuple[GroupElement, ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    # ------------------------------------------------------------------ size
    @property
    def order(self) -> int:
        if self.product is not None:
            return self.product.order
        return len(self.elements)

    @property
    def elements(self) -> tuple[GroupElement, ...]:
        if self._elements is None:
            if self.product is None:
                raise GroupError("element list unavailable; construct from generators")
            if self.product.order > MAX_GROUP_ORDER:
                raise GroupError(
                    f"group order {self.product.order} exceeds the {MAX_GROUP_ORDER} cap"
                )
            n, m = self.problem.n_inputs, self.problem.n_outputs
            els = []
            for ppi in iter_permutations(self.product.pi_moving):
                pi = list(range(n))
                for src, dst in zip(self.product.pi_moving, ppi):
                    pi[src] = dst
                for ptau in iter_permutations(self.product.tau_moving):
                    tau = list(range(m))
                    for src, dst in zip(self.product.tau_moving, ptau):
                        tau[src] = dst
                    els.append(GroupElement(pi=tuple(pi), tau=tuple(tau)))
            self._elements = tuple(els)
        return self._elements

    # ------------------------------------------------------------- the action
    def _lookup(self) -> tuple[np.ndarray, np.ndarray | None, dict | None]:
        if "lookup" not in self._cache:
            p = self.problem
            arr = p.function_array()
            span = p.n_outputs**p.n_inputs if p.n_inputs * math.log(p.n_outputs) < 16 else None
            if span is not None and span <= 10_000_000:
                radix = p.n_outputs ** np.arange(p.n_inputs, dtype=np.int64)
                codes = arr @ radix
                table = np.full(span, -1, dtype=np.int64)
                table[codes] = np.arange(p.size)
                self._cache["lookup"] = (arr, (radix, table), None)
            else:
                self._cache["lookup"] = (arr, None, dict(p.index_of))
        return self._cache["lookup"]

    def permutation_of(self, g: GroupElement) -> np.ndarray:
        """Index permutation of the family under ``g``; raises with a witness
        function when some image leaves the family."""
        arr, fast, slow = self._lookup()
        pi = np.asarray(g.pi)
        tau = np.asarray(g.tau)
        new = tau[arr[:, pi]]
        if fast is not None:
            radix, table = fast
            idx = table[new @ radix]
            bad = np.flatnonzero(idx < 0)
            if bad.size:
                f = int(bad[0])
                raise GroupError(
                    f"element maps function {self.problem.functions[f]} to "
                    f"{tuple(int(v) for v in new[f])}, which is outside the family"
                )
            return idx
        out = np.empty(len(new), dtype=np.int64)
        for i, row in enumerate(new):
            key = tuple(int(v) for v in row)
            if key not in slow:
                raise GroupError(
                    f"element maps function {self.problem.functions[i]} to {key}, "
                    "which is outside the family"
                )
            out[i] = slow[key]
        return out

    def act(self, g: GroupElement, f_index: int) -> int:
        """Index of the image of function ``f_index`` under ``g``."""
        if not (0 <= f_index < self.problem.size):
            raise ProblemError(f"function index {f_index} out of range")
        return int(self.permutation_of(g)[f_index])

    def generator_perms(self) -> list[np.ndarray]:
        if "generator_perms" not in self._cache:
            self._cache["generator_perms"] = [self.permutation_of(g) for g in self.generators]
        return self._cache["generator_perms"]

    def element_perms(self) -> np.ndarray:
        """(|G|, |F|) table of index permutations; refused when too large."""
        if "element_perms" not in self._cache:
            if self.order * self.problem.size > 30_000_000:
                raise GroupError(
                    f"action table for |G|={self.order}, |F|={self.problem.size} is too large"
                )
            rows = [self.permutation_of(g) for g in self.elements]
            self._cache["element_perms"] = np.asarray(rows, dtype=np.int64)
        return self._cache["element_perms"]

    # ------------------------------------------------------------ subgroups
    def stabilizer(self, x: int, y: int | None = None) -> "GroupAction":
        """Subgroup fixing input letter ``x`` (and output letter ``y``)."""
        self.problem.check_input(x)
        if y is not None:
            self.problem.check_output(y)
        if self.product is not None:
            pi_pts = tuple(v for v in self.product.pi_moving if v != x)
            tau_pts = self.product.tau_moving
            if y is not None:
                tau_pts = tuple(v for v in tau_pts if v != y)
            return product_action(self.problem, pi_pts, tau_pts)
        kept = tuple(
            g
            for g in self.elements
            if g.pi[x] == x and (y is None or g.tau[y] == y)
        )
        return GroupAction(problem=self.problem, generators=kept, _elements=kept)

    # ---------------------------------------------------------- class data
    def class_representatives(self) -> list[tuple[GroupElement, tuple]]:
        """One element per conjugacy class with a stable class key."""
        if "classes" in self._cache:
            return self._cache["classes"]
        n, m = self.problem.n_inputs, self.problem.n_outputs
        if self.product is not None:
            reps = []
            for pa in young._partitions_of(len(self.product.pi_moving)):
                pi = _embed_cycles(self.product.pi_moving, pa, n)
                for pb in young._partitions_of(len(self.product.tau_moving)):
                    tau = _embed_cycles(self.product.tau_moving, pb, m)
                    reps.append((GroupElement(pi=pi, tau=tau), (pa, pb)))
        else:
            els = self.elements
            if len(els) > 2000:
                reps = [(g, (i,)) for i, g in enumerate(els[:1])]
            else:
                remaining = set(els)
                reps = []
                i = 0
                while remaining:
                    g = min(remaining, key=lambda e: (e.pi, e.tau))
                    cls = {h.inverse().compose(g).compose(h) for h in els}
                    remaining -= cls
                    reps.append((g, (i,)))
                    i += 1
        self._cache["classes"] = reps
        return reps


def product_action(
    problem: OracleProblem,
    pi_moving: tuple[int, ...] | None = None,
    tau_moving: tuple[int, ...] | None = None,
) -> GroupAction:
    """Action of Sym(pi_moving) x Sym(tau_moving); defaults to all letters."""
    if pi_moving is None:
        pi_moving = tuple(range(problem.n_inputs))
    if tau_moving is None:
        tau_moving = tuple(range(problem.n_outputs))
    pi_moving = tuple(sorted(pi_moving))
    tau_moving = tuple(sorted(tau_moving))
    n, m = problem.n_inputs, problem.n_outputs
    gens = [
        GroupElement(pi=perm, tau=_identity(m))
        for perm in _adjacent_transpositions(pi_moving, n)
    ] + [
        GroupElement(pi=_identity(n), tau=perm)
        for perm in _adjacent_transpositions(tau_moving, m)
    ]
    if not gens:
        gens = [GroupElement(pi=_identity(n), tau=_identity(m))]
    return GroupAction(
        problem=problem,
        generators=tuple(gens),
        product=ProductStructure(pi_moving=pi_moving, tau_moving=tau_moving),
    )


def full_product_action(problem: OracleProblem) -> GroupAction:
    """The full input x output relabeling group."""
    return product_action(problem)


def input_action(problem: OracleProblem) -> GroupAction:
    """Input relabelings only; outputs stay fixed."""
    return product_action(problem, tau_moving=())


def action_from_generators(
    problem: OracleProblem, elements: list[GroupElement]
) -> GroupAction:
    """Close a generator list under composition and inverse (capped)."""
    n, m = problem.n_inputs, problem.n_outputs
    gens = tuple(elements)
    for g in gens:
        if len(g.pi) != n or len(g.tau) != m:
            raise GroupError("generator permutations must match the alphabets")
    identity = GroupElement(pi=_identity(n), tau=_identity(m))
    seen = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                prod = g.compose(h)
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
                    if len(seen) > MAX_GROUP_ORDER:
                        raise GroupError(
                            f"generated group exceeds the {MAX_GROUP_ORDER} element cap"
                        )
        frontier = new
    els = tuple(sorted(seen, key=lambda e: (e.pi, e.tau)))
    return GroupAction(problem=problem, generators=gens or (identity,), _elements=els)


def action_from_dict(problem: OracleProblem, doc: dict) -> GroupAction:
    """Group file format: paired 1-based pi/tau generator image lists."""
    pis = [tuple(int(v) - 1 for v in row) for row in doc.get("pi_generators", [])]
    taus = [tuple(int(v) - 1 for v in row) for row in doc.get("tau_generators", [])]
    count = max(len(pis), len(taus))
    els = []
    for i in range(count):
        pi = pis[i] if i < len(pis) else _identity(problem.n_inputs)
        tau = taus[i] if i < len(taus) else _identity(problem.n_outputs)
        els.append(GroupElement(pi=pi, tau=tau))
    return action_from_generators(problem, els)


# ---------------------------------------------------------------------------
# automorphism verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AutomorphismReport:
    passed: bool
    witness: str | None = None


def verify_automorphism(action: GroupAction) -> AutomorphismReport:
    """Check family closure and target-overlap invariance on the generators.

    Both properties are preserved under composition, so generator-level
    checks certify the whole group.  Overlap invariance is the testable
    face of the intertwining unitaries on the target space.
    """
    gram = action.problem.gram_matrix()
    for g in action.generators:
        try:
            perm = action.permutation_of(g)
        except GroupError as exc:
            return AutomorphismReport(passed=False, witness=str(exc))
        moved = gram[np.ix_(perm, perm)]
        gap = float(np.abs(moved - gram).max(initial=0.0))
        if gap > 1e-9:
            i, j = np.unravel_index(int(np.abs(moved - gram).argmax()), gram.shape)
            return AutomorphismReport(
                passed=False,
                witness=(
                    f"target overlaps change under (pi={g.pi}, tau={g.tau}) at "
                    f"function pair ({int(i)}, {int(j)}): gap {gap:.3e}"
                ),
            )
    return AutomorphismReport(passed=True)


# ---------------------------------------------------------------------------
# orbits of the pair action and the commutant basis
# ---------------------------------------------------------------------------


def pair_orbit_labels(action: GroupAction) -> np.ndarray:
    """(|F|, |F|) array of orbit ids of the simultaneous pair action.

    Ids are compressed to 0..r-1 ordered by the smallest row-major pair in
    each orbit.  Only generator permutations are needed, so this scales to
    groups far beyond the element cap.
    """
    if "pair_orbits" in action._cache:
        return action._cache["pair_orbits"]
    report = verify_automorphism(action)
    if not report.passed:
        raise GroupError(f"not an automorphism group: {report.witness}")
    size = action.problem.size
    perms = []
    for p in action.generator_perms():
        perms.append(np.asarray(p, dtype=np.int64))
        inv = np.empty(size, dtype=np.int64)
        inv[p] = np.arange(size)
        perms.append(inv)
    labels = np.arange(size * size, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for p in perms:
            flat = (p[:, None] * size + p[None, :]).ravel()
            pulled = labels[flat]
            lower = pulled < labels
            if np.any(lower):
                labels[lower] = pulled[lower]
                changed = True
    _, compressed = np.unique(labels, return_inverse=True)
    out = compressed.reshape(size, size)
    action._cache["pair_orbits"] = out
    return out


def orbit_basis(action: GroupAction) -> list[np.ndarray]:
    """Indicator matrices of the pair orbits; they span the commutant."""
    labels = pair_orbit_labels(action)
    count = int(labels.max()) + 1
    return [(labels == i).astype(np.float64) for i in range(count)]


def is_multiplicity_free(action: GroupAction) -> bool:
    """True when every pair orbit is symmetric, i.e. the commutant is abelian."""
    labels = pair_orbit_labels(action)
    return bool(np.array_equal(labels, labels.T))


# ---------------------------------------------------------------------------
# isotypic decomposition
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class IsotypicBlock:
    """One invariant block: orthonormal basis, scheme eigenvalues, labels."""

    basis: np.ndarray               # (|F|, dim) orthonormal columns
    dim: int
    orbit_values: tuple[float, ...]  # commutant eigenvalue per pair orbit
    fingerprint: tuple[float, ...]   # tr(U_g P) on class representatives
    label: tuple[young.Partition, young.Partition] | None

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


@dataclass(eq=False)
class IsotypicDecomposition:
    action: GroupAction
    blocks: tuple[IsotypicBlock, ...]
    class_keys: tuple[tuple, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    def weighted_sum(self, weights: np.ndarray | list[float]) -> np.ndarray:
        """Matrix acting as weights[k] on block k."""
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(self.blocks),):
            raise GroupError("one weight per block required")
        size = self.action.problem.size
        out = np.zeros((size, size), dtype=np.complex128)
        for wk, block in zip(w, self.blocks):
            if wk != 0.0:
                out += wk * (block.basis @ block.basis.conj().T)
        return out


def _trace_under_perm(basis: np.ndarray, perm: np.ndarray) -> float:
    # tr(U_g P) with P projecting onto basis; U_g |j> = |perm[j]>.
    inv = np.empty(len(perm), dtype=np.int64)
    inv[perm] = np.arange(len(perm))
    val = np.sum(basis[inv, :] * basis.conj())
    return float(np.real(val))


def _match_product_label(
    fingerprint: np.ndarray,
    dim: int,
    class_keys: list[tuple],
    sizes: tuple[int, int],
) -> tuple[young.Partition, young.Partition] | None:
    a, b = sizes
    candidates = []
    for pa in young._partitions_of(a):
        for pb in young._partitions_of(b):
            d = young.dimension_of_full(pa) * young.dimension_of_full(pb)
            if d != dim:
                continue
            expected = np.array(
                [young.character(pa, ka) * young.character(pb, kb) for ka, kb in class_keys],
                dtype=np.float64,
            )
            if np.abs(expected - fingerprint).max(initial=0.0) < 0.01:
                candidates.append((pa, pb))
    if len(candidates) != 1:
        return None
    pa, pb = candidates[0]
    return (young.Partition(pa[1:]), young.Partition(pb[1:]))


def isotypic_decomposition(action: GroupAction, seed: int = DEFAULT_SEED) -> IsotypicDecomposition:
    """Split the function space into the common eigenblocks of the commutant.

    A seeded random symmetric combination of the orbit basis is
    diagonalized and its eigenvectors are clustered by their joint
    eigenvalues across the commutant; for a multiplicity-free action the
    clusters are exactly the irreducible blocks.  Ambiguous clusterings
    retry with a fresh seed up to five times.
    """
    labels = pair_orbit_labels(action)
    n_orbits = int(labels.max()) + 1
    size = action.problem.size
    flat = labels.ravel()
    gen_perms = action.generator_perms()

    last_error = "unknown"
    for attempt in range(5):
        rng = np.random.default_rng([seed, attempt])
        coeff = rng.standard_normal(n_orbits)
        combo = coeff[labels]
        combo = (combo + combo.T) / 2
        w, v = np.linalg.eigh(combo)

        coeff2 = rng.standard_normal(n_orbits)
        combo2 = coeff2[labels]
        combo2 = (combo2 + combo2.T) / 2
        second = np.einsum("ij,ij->j", v, combo2 @ v)

        scale = max(1.0, float(np.abs(w).max()))
        scale2 = max(1.0, float(np.abs(second).max()))
        clusters: list[list[int]] = []
        for cl in _gap_clusters(w, 1e-8 * scale):
            idx = sorted(cl, key=lambda i: second[i])
            start = 0
            for k in range(1, len(idx) + 1):
                if k == len(idx) or second[idx[k]] - second[idx[k - 1]] > 1e-8 * scale2:
                    clusters.append(idx[start:k])
                    start = k

        blocks = []
        ok = True
        for idx in clusters:
            basis = canonical_basis_of_span(np.ascontiguousarray(v[:, idx], dtype=np.complex128))
            proj = (basis @ basis.conj().T).real
            for p in gen_perms:
                inv = np.empty(size, dtype=np.int64)
                inv[p] = np.arange(size)
                if np.abs(proj[inv, :] - proj[:, p]).max(initial=0.0) > 1e-8:
                    ok = False
                    last_error = "cluster projector fails to commute with the action"
                    break
            if not ok:
                break
            values = np.bincount(flat, weights=proj.T.ravel(), minlength=n_orbits)
            blocks.append((basis, values / len(idx)))
        if not ok:
            continue

        tuples = np.array([t for _, t in blocks])
        ambiguous = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if np.abs(tuples[i] - tuples[j]).max() < 1e-7:
                    ambiguous = True
        if ambiguous:
            last_error = "two clusters share their joint commutant eigenvalues"
            continue

        reps = action.class_representatives()
        class_keys = tuple(key for _, key in reps)
        rep_perms = [action.permutation_of(g) for g, _ in reps]
        out_blocks = []
        for basis, values in blocks:
            fp = np.array([_trace_under_perm(basis, p) for p in rep_perms])
            label = None
            if action.product is not None:
                label = _match_product_label(
                    fp,
                    basis.shape[1],
                    list(class_keys),
                    (len(action.product.pi_moving), len(action.product.tau_moving)),
                )
            out_blocks.append(
                IsotypicBlock(
                    basis=basis,
                    dim=basis.shape[1],
                    orbit_values=tuple(float(x) for x in values),
                    fingerprint=tuple(float(x) for x in fp),
                    label=label,
                )
            )
        if all(b.label is not None for b in out_blocks):
            out_blocks.sort(key=lambda b: (b.label[0].sort_key(), b.label[1].sort_key()))
        else:
            out_blocks.sort(key=lambda b: tuple(-round(x, 6) for x in b.orbit_values))
        return IsotypicDecomposition(
            action=action, blocks=tuple(out_blocks), class_keys=class_keys
        )
    raise DecompositionError(f"isotypic clustering failed after 5 seeds: {last_error}")


def _gap_clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    clusters = [[0]] if len(values) else []
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > tol:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters


# ---------------------------------------------------------------------------
# group averaging and transporters
# ---------------------------------------------------------------------------


def symmetrize(a: np.ndarray, action: GroupAction) -> np.ndarray:
    """Group average of ``a`` under conjugation by the action."""
    a = np.asarray(a, dtype=np.complex128)
    size = action.problem.size
    if a.shape != (size, size):
        raise GroupError(f"matrix shape {a.shape} does not match the family size {size}")
    table = action.element_perms()
    out = np.zeros_like(a)
    scratch = np.empty(size, dtype=np.int64)
    for perm in table:
        scratch[perm] = np.arange(size)
        out += a[np.ix_(scratch, scratch)]
    return out / len(table)


def _random_block_vector(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    coeff = rng.standard_normal(basis.shape[1])
    vec = basis @ coeff
    return vec / np.linalg.norm(vec)


def transporter(
    source: IsotypicBlock | np.ndarray,
    dest: IsotypicBlock | np.ndarray,
    subgroup: GroupAction,
    seed: int = DEFAULT_SEED,
) -> np.ndarray:
    """Partial isometry from the source block onto the destination block.

    The group average of a random rank-one map between the blocks is an
    intertwiner; by Schur's lemma it vanishes for non-isomorphic blocks
    (returned as the zero map below norm 1e-8) and is proportional to the
    canonical partial isometry otherwise.  The free phase is fixed by
    making the largest entry real positive; the self-transporter is the
    block projector itself.
    """
    src = source.basis if isinstance(source, IsotypicBlock) else np.asarray(source)
    dst = dest.basis if isinstance(dest, IsotypicBlock) else np.asarray(dest)
    if src.shape[0] != dst.shape[0]:
        raise GroupError(f"ambient dimension mismatch: {src.shape[0]} vs {dst.shape[0]}")
    size = src.shape[0]
    if src.shape[1] != dst.shape[1]:
        # Blocks of different dimension cannot carry isomorphic irreps.
        return np.zeros((size, size), dtype=np.complex128)
    if np.allclose(src, dst, atol=1e-12):
        return src @ src.conj().T
    table = subgroup.element_perms()
    rng = np.random.default_rng([seed, size, src.shape[1]])
    best: np.ndarray | None = None
    best_norm = -1.0
    for _ in range(3):
        u = _random_block_vector(dst, rng)
        w = _random_block_vector(src, rng)
        u_all = np.empty((len(table), size), dtype=np.complex128)
        w_all = np.empty((len(table), size), dtype=np.complex128)
        for row, perm in enumerate(table):
            u_all[row, perm] = u
            w_all[row, perm] = w
        avg = (u_all.T @ w_all.conj()) / len(table)
        nrm = float(np.linalg.norm(avg))
        if nrm > best_norm:
            best, best_norm = avg, nrm
        if nrm >= 1e-5:
            break
    if best_norm < 1e-8:
        return np.zeros((size, size), dtype=np.complex128)
    uu, sv, vh = np.linalg.svd(best)
    rank = int(np.sum(sv > 0.5 * sv[0]))
    iso = uu[:, :rank] @ vh[:rank, :]
    flat = np.abs(iso).ravel()
    top = int(np.flatnonzero(flat >= flat.max() * (1 - 1e-12))[0])
    phase = iso.ravel()[top] / abs(iso.ravel()[top])
    return iso / phase
