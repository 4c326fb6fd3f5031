"""Finite oracle problems: function families, targets and derived matrices.

A problem is a fully enumerated family of functions [N] -> [M] together
with what the algorithm must produce: a classical label per function, or a
target quantum state described through its Gram matrix.  The function list
is kept in canonical lexicographic order so matrix indices are reproducible
across modules and runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

import numpy as np

from advbound import linalg

KIND_CLASSICAL = "classical-function"
KIND_COHERENT = "coherent-generation"
KIND_NON_COHERENT = "non-coherent-generation"
_KINDS = (KIND_CLASSICAL, KIND_COHERENT, KIND_NON_COHERENT)


class ProblemError(ValueError):
    """Raised for malformed problem definitions or out-of-range letters."""


@dataclass(frozen=True, eq=False)
class OracleProblem:
    """A finite oracle problem over input letters [0, n) and outputs [0, m).

    ``functions`` holds each member as a tuple of outputs, sorted
    lexicographically; ``labels`` (classical kind) or ``gram`` (generation
    kinds) describe the target.  ``target_vectors`` optionally carries
    explicit target states (row f) for coherent success probabilities.
    """

    n_inputs: int
    n_outputs: int
    functions: tuple[tuple[int, ...], ...]
    kind: str
    labels: tuple[int, ...] | None = None
    gram: np.ndarray | None = None
    target_vectors: np.ndarray | None = None
    name: str = "custom"
    index_of: dict[tuple[int, ...], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_inputs < 1 or self.n_outputs < 1:
            raise ProblemError("alphabet sizes must be positive")
        if self.kind not in _KINDS:
            raise ProblemError(f"unknown problem kind {self.kind!r}")
        seen = set()
        for f in self.functions:
            if len(f) != self.n_inputs:
                raise ProblemError(f"function {f} is not defined on all {self.n_inputs} letters")
            if any(not (0 <= v < self.n_outputs) for v in f):
                raise ProblemError(f"function {f} takes values outside the output alphabet")
            if f in seen:
                raise ProblemError(f"duplicate function {f}")
            seen.add(f)
        if self.kind == KIND_CLASSICAL:
            if self.labels is None or len(self.labels) != len(self.functions):
                raise ProblemError("classical problems need one label per function")
        elif self.gram is None:
            raise ProblemError("state-generation problems need a target Gram matrix")
        if self.gram is not None:
            g = linalg.require_hermitian(self.gram, "target Gram")
            if np.abs(np.diag(g) - 1).max(initial=0.0) > 1e-9:
                raise ProblemError("target Gram must have unit diagonal")
            if np.linalg.eigvalsh(g).min() < -1e-9:
                raise ProblemError("target Gram is not positive semidefinite")
            object.__setattr__(self, "gram", g)
        object.__setattr__(
            self, "index_of", {f: i for i, f in enumerate(self.functions)}
        )

    @property
    def size(self) -> int:
        return len(self.functions)

    def check_input(self, x: int) -> None:
        if not (0 <= x < self.n_inputs):
            raise ProblemError(f"input letter {x} outside [0, {self.n_inputs})")

    def check_output(self, y: int) -> None:
        if not (0 <= y < self.n_outputs):
            raise ProblemError(f"output letter {y} outside [0, {self.n_outputs})")

    def gram_matrix(self) -> np.ndarray:
        """Pairwise target-state overlaps <psi_f | psi_f'> as an |F| x |F| matrix."""
        if self.gram is not None:
            return self.gram
        lab = np.asarray(self.labels)
        return (lab[:, None] == lab[None, :]).astype(np.complex128)

    def function_array(self) -> np.ndarray:
        return np.asarray(self.functions, dtype=np.int64)


def build_search(n: int) -> OracleProblem:
    """Unstructured search: mark one of ``n`` elements, output alphabet {0, 1}."""
    if n < 2:
        raise ProblemError("search needs at least two elements")
    marked = list(range(n))
    funcs = [tuple(1 if i == x else 0 for i in range(n)) for x in marked]
    order = sorted(range(n), key=lambda i: funcs[i])
    return OracleProblem(
        n_inputs=n,
        n_outputs=2,
        functions=tuple(funcs[i] for i in order),
        kind=KIND_CLASSICAL,
        labels=tuple(marked[i] for i in order),
        name=f"search-{n}",
    )


def _image_masks(funcs: np.ndarray, m: int) -> np.ndarray:
    masks = np.zeros(len(funcs), dtype=np.int64)
    for col in range(funcs.shape[1]):
        masks |= np.int64(1) << funcs[:, col].astype(np.int64)
    return masks


def _popcount(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    while np.any(v):
        out += v & 1
        v = v >> 1
    return out


def build_index_erasure(n: int, m: int) -> OracleProblem:
    """Generate the uniform superposition over the image of an injective map.

    The family is every injective function [n] -> [m]; two targets overlap
    by |image intersection| / n.
    """
    if not (1 <= n <= m):
        raise ProblemError(f"need 1 <= n <= m, got ({n}, {m})")
    if math.factorial(m) // math.factorial(m - n) > 250_000:
        raise ProblemError(f"injective family for ({n}, {m}) is too large")
    funcs = tuple(sorted(permutations(range(m), n)))
    arr = np.asarray(funcs, dtype=np.int64)
    masks = _image_masks(arr, m)
    inter = _popcount(masks[:, None] & masks[None, :])
    gram = inter.astype(np.float64) / n
    vecs = np.zeros((len(funcs), m))
    rows = np.repeat(np.arange(len(funcs)), n)
    vecs[rows, arr.ravel()] = 1.0 / math.sqrt(n)
    return OracleProblem(
        n_inputs=n,
        n_outputs=m,
        functions=funcs,
        kind=KIND_COHERENT,
        gram=gram.astype(np.complex128),
        target_vectors=vecs,
        name=f"index-erasure-{n}-{m}",
    )


def agreement_matrix(p: OracleProblem, x: int) -> np.ndarray:
    """0-1 matrix marking function pairs that agree at input ``x``."""
    p.check_input(x)
    col = p.function_array()[:, x]
    return (col[:, None] == col[None, :]).astype(np.float64)


def output_projector(p: OracleProblem, x: int, y: int) -> np.ndarray:
    """Diagonal projector onto functions with f(x) = y."""
    p.check_input(x)
    p.check_output(y)
    col = p.function_array()[:, x]
    return np.diag((col == y).astype(np.float64))


def output_partition(p: OracleProblem, x: int) -> np.ndarray:
    """Value of f(x) per function; the level sets are the output projectors."""
    p.check_input(x)
    return p.function_array()[:, x]


def target_gram(p: OracleProblem) -> np.ndarray:
    """Trace-one PSD matrix of target overlaps divided by the family size."""
    return p.gram_matrix() / p.size


def uniform_state(p: OracleProblem) -> np.ndarray:
    """Unit vector with equal amplitude on every function."""
    return np.full(p.size, 1.0 / math.sqrt(p.size))


def problem_from_dict(doc: dict, name: str = "custom") -> OracleProblem:
    """Build a problem from the JSON document format (1-based letters)."""
    try:
        n, m, kind = int(doc["n"]), int(doc["m"]), str(doc["kind"])
        raw_funcs = [tuple(int(v) - 1 for v in row) for row in doc["functions"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"malformed problem document: {exc}") from exc
    order = sorted(range(len(raw_funcs)), key=lambda i: raw_funcs[i])
    funcs = tuple(raw_funcs[i] for i in order)
    labels = None
    gram = None
    vectors = None
    if "labels" in doc:
        raw_labels = [int(v) - 1 for v in doc["labels"]]
        if len(raw_labels) != len(raw_funcs):
            raise ProblemError("labels must match the function list")
        labels = tuple(raw_labels[i] for i in order)
    if "gram" in doc:
        raw = np.asarray(doc["gram"], dtype=np.complex128)
        if raw.shape != (len(raw_funcs), len(raw_funcs)):
            raise ProblemError("gram must be |F| x |F|")
        gram = raw[np.ix_(order, order)]
    if kind == KIND_CLASSICAL and labels is None:
        raise ProblemError("classical problems need labels")
    if kind != KIND_CLASSICAL and gram is None:
        if labels is None:
            raise ProblemError("generation problems need a gram (or labels) field")
        lab = np.asarray(labels)
        gram = (lab[:, None] == lab[None, :]).astype(np.complex128)
    return OracleProblem(
        n_inputs=n,
        n_outputs=m,
        functions=funcs,
        kind=kind,
        labels=labels,
        gram=gram,
        target_vectors=vectors,
        name=name,
    )


def load_problem(path: str | Path) -> OracleProblem:
    path = Path(path)
    with path.open() as fh:
        doc = json.load(fh)
    return problem_from_dict(doc, name=path.stem)
