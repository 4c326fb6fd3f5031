"""Partition and Young-diagram combinatorics for symmetric-group irreps.

Diagrams for S_n are stored by their part *below the first row*: a diagram
with n boxes is determined by that part once the first row is filled up to
n boxes.  All arithmetic is exact (Python integers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


class DiagramError(ValueError):
    """Raised for partitions that do not fit the requested diagram."""


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing positive parts; the empty partition is allowed."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(p <= 0 for p in self.parts):
            raise DiagramError(f"parts must be positive: {self.parts}")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise DiagramError(f"parts must be weakly decreasing: {self.parts}")

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __repr__(self) -> str:
        return f"Partition{self.parts}"

    def contains(self, other: "Partition") -> bool:
        """Cell-wise containment of ``other`` inside this diagram."""
        if len(other.parts) > len(self.parts):
            return False
        return all(o <= s for o, s in zip(other.parts, self.parts))

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.size, self.parts)


def full_diagram(lam: Partition, n: int) -> tuple[int, ...]:
    """First-row-completed diagram of ``lam`` as an irrep of S_n."""
    first = n - lam.size
    if first < (lam.parts[0] if lam.parts else 0):
        raise DiagramError(f"{lam} does not fit an {n}-box diagram")
    if first < 0:
        raise DiagramError(f"{lam} has more than {n} boxes")
    return (first, *lam.parts) if n > 0 or lam.parts else ()


def is_valid_for(lam: Partition, n: int) -> bool:
    try:
        full_diagram(lam, n)
    except DiagramError:
        return False
    return True


def _hooks(rows: tuple[int, ...]) -> list[int]:
    cols = [sum(1 for r in rows if r > j) for j in range(rows[0])] if rows else []
    out = []
    for i, r in enumerate(rows):
        for j in range(r):
            out.append((r - j) + (cols[j] - i) - 1)
    return out


def dimension_of_full(rows: tuple[int, ...]) -> int:
    """Hook-length dimension of a full diagram, exact."""
    n = sum(rows)
    num = Fraction(math.factorial(n))
    for h in _hooks(rows):
        num /= h
    if num.denominator != 1:
        raise DiagramError(f"hook product does not divide {n}! for {rows}")
    return int(num)


def hook_dimension(lam: Partition, n: int) -> int:
    """Dimension of the S_n irrep whose below-first-row part is ``lam``."""
    return dimension_of_full(full_diagram(lam, n))


def _partitions_of(k: int, cap: int | None = None) -> list[tuple[int, ...]]:
    if k == 0:
        return [()]
    cap = k if cap is None else min(cap, k)
    out = []
    for first in range(cap, 0, -1):
        for rest in _partitions_of(k - first, first):
            out.append((first, *rest))
    return out


def enumerate_below_row(max_boxes: int, n: int) -> list[Partition]:
    """All below-first-row shapes with at most ``max_boxes`` boxes valid for S_n."""
    out = []
    for k in range(max_boxes + 1):
        for parts in _partitions_of(k):
            lam = Partition(parts)
            if is_valid_for(lam, n):
                out.append(lam)
    out.sort(key=Partition.sort_key)
    return out


def branch(lam: Partition, direction: str) -> list[tuple[Partition, bool]]:
    """One-box moves on the below-first-row part.

    Returns ``(shape, in_first_row)`` pairs; the flagged entry is the move
    that touches the (implicit) first row and leaves ``lam`` unchanged.
    Removing from the empty partition yields nothing below the row.
    """
    parts = lam.parts
    if direction == "add":
        out: list[tuple[Partition, bool]] = [(lam, True)]
        for i in range(len(parts) + 1):
            above = parts[i - 1] if i > 0 else None
            current = parts[i] if i < len(parts) else 0
            if above is None or above > current:
                grown = list(parts)
                if i < len(parts):
                    grown[i] += 1
                else:
                    grown.append(1)
                out.append((Partition(tuple(grown)), False))
        return out
    if direction == "remove":
        if not parts:
            return []
        out = [(lam, True)]
        for i in range(len(parts)):
            below = parts[i + 1] if i + 1 < len(parts) else 0
            if parts[i] > below:
                shrunk = list(parts)
                shrunk[i] -= 1
                if shrunk[i] == 0:
                    shrunk.pop()
                out.append((Partition(tuple(shrunk)), False))
        return out
    raise DiagramError(f"unknown direction {direction!r}")


def branching_restrictions(lam: Partition, n: int) -> list[Partition]:
    """Below-row shapes of the S_{n-1} irreps in the restriction of ``lam`` at level n.

    Corner-box removals of the full n-box diagram: the first-row corner keeps
    ``lam`` (when still valid at n-1), the others shrink it by one box.
    """
    full_diagram(lam, n)
    out = []
    if is_valid_for(lam, n - 1):
        out.append(lam)
    for shrunk, first_row in branch(lam, "remove"):
        if not first_row and is_valid_for(shrunk, n - 1):
            out.append(shrunk)
    return out


@lru_cache(maxsize=None)
def _mn_character(rows: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    # Murnaghan-Nakayama via beta-sets: removing a border ribbon of length L
    # moves one first-column hook length b to b - L; the sign counts the
    # beta values jumped over.  Length-1 cycles were stripped upfront, so
    # the base case is the dimension of what remains.
    if not cycles:
        return dimension_of_full(rows)
    if not rows:
        return 0
    length, rest = cycles[0], cycles[1:]
    k = len(rows)
    beta = [rows[i] + (k - 1 - i) for i in range(k)]
    beta_set = set(beta)
    total = 0
    for b in beta:
        nb = b - length
        if nb < 0 or nb in beta_set:
            continue
        height = sum(1 for c in beta if nb < c < b)
        new_beta = sorted((nb if c == b else c for c in beta), reverse=True)
        new_rows = tuple(new_beta[j] - (k - 1 - j) for j in range(k))
        trimmed = tuple(r for r in new_rows if r > 0)
        total += (-1) ** height * _mn_character(trimmed, rest)
    return total


def character(lam_full: tuple[int, ...] | Partition, cycle_type: tuple[int, ...]) -> int:
    """Symmetric-group character of a full diagram at a cycle type, exact."""
    rows = lam_full.parts if isinstance(lam_full, Partition) else tuple(lam_full)
    n = sum(rows)
    if sum(cycle_type) != n or any(c < 1 for c in cycle_type):
        raise DiagramError(f"cycle type {cycle_type} is not a partition of {n}")
    cycles = tuple(sorted((c for c in cycle_type if c > 1), reverse=True))
    return _mn_character(rows, cycles)


@dataclass(frozen=True)
class CensusEntry:
    """One irrep pair in the injective-function action of S_n x S_m."""

    lam_n: Partition
    lam_m: Partition
    is_bad: bool
    dim: int


def _is_horizontal_strip(inner: tuple[int, ...], outer: tuple[int, ...]) -> bool:
    # outer/inner a horizontal strip: containment with at most one new box
    # per column, i.e. each outer row reaches at most the inner row above.
    if len(inner) > len(outer):
        return False
    for i, row in enumerate(outer):
        below = inner[i] if i < len(inner) else 0
        if row < below:
            return False
        above = inner[i - 1] if 0 < i <= len(inner) else 0
        if i > 0 and row > above:
            return False
    return True


def erasure_census(n: int, m: int) -> list[CensusEntry]:
    """All irrep pairs occurring for injective functions [n] -> [m].

    A pair occurs exactly when the below-row shape for the input side is
    contained in the one for the output side; it is *bad* when the two
    shapes coincide.  Dimensions come from the hook-length formula and sum
    to m!/(m-n)!.
    """
    if m < n:
        raise DiagramError(f"need m >= n, got ({n}, {m})")
    entries = []
    for lam_in in enumerate_below_row(n, n):
        full_in = full_diagram(lam_in, n)
        for lam_out in enumerate_below_row(m, m):
            full_out = full_diagram(lam_out, m)
            if not _is_horizontal_strip(full_in, full_out):
                continue
            entries.append(
                CensusEntry(
                    lam_n=lam_in,
                    lam_m=lam_out,
                    is_bad=lam_in == lam_out,
                    dim=hook_dimension(lam_in, n) * hook_dimension(lam_out, m),
                )
            )
    entries.sort(key=lambda e: (e.lam_n.sort_key(), e.lam_m.sort_key()))
    total = sum(e.dim for e in entries)
    expected = math.factorial(m) // math.factorial(m - n)
    if total != expected:
        raise DiagramError(f"census dimensions sum to {total}, expected {expected}")
    return entries


def erasure_weights(n: int) -> dict[int, float]:
    """Adversary eigenvalue per below-row box count: 1 - k/sqrt(n), floored at 0."""
    if n < 1:
        raise DiagramError("need n >= 1")
    root = math.sqrt(n)
    weights = {}
    for k in range(n + 1):
        weights[k] = max(0.0, 1.0 - k / root)
    return weights
