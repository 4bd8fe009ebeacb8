"""Partitions and fixed-point weight data on a torus chart.

A monomial ideal of colength n in a chart with coordinate weights (w1, w2) is
indexed by a partition of n.  Boxes are 0-indexed, row index i increasing
downward and column index j rightward; the x-exponent (i) pairs with w1 and
the y-exponent (j) with w2.

For a box b the tangent space at the monomial ideal contributes the pair of
weights

    (leg(b)+1) * w1 - arm(b) * w2      and     -leg(b) * w1 + (arm(b)+1) * w2,

so the tangent character has exactly 2n weights, none zero.  The "swapped"
convention (arm and leg roles exchanged) is exposed for diagnosis; summing
over all partitions of given size is invariant under the swap because it
amounts to conjugating every partition.
"""

from __future__ import annotations

from .exact import LinForm

__all__ = [
    "Partition",
    "enumerate_partitions",
    "partition_count",
    "boxes",
    "conjugate",
    "arm_leg",
    "hook_lengths",
    "tangent_weights",
    "twisted_tangent_weights",
    "taut_weights",
]

#: a partition is a weakly decreasing tuple of positive integers
Partition = tuple[int, ...]
Box = tuple[int, int]


def validate(parts: Partition) -> Partition:
    parts = tuple(parts)
    if any(p <= 0 for p in parts):
        raise ValueError("partition parts must be positive")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValueError("partition parts must be weakly decreasing")
    return parts


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of n, each once, in descending lexicographic order.

    n = 0 yields the single empty partition.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    out: list[Partition] = []

    def rec(remaining: int, cap: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(cap, remaining), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(n, n, [])
    return out


def partition_count(n: int) -> int:
    return len(enumerate_partitions(n))


def boxes(parts: Partition) -> list[Box]:
    return [(i, j) for i, row in enumerate(parts) for j in range(row)]


def conjugate(parts: Partition) -> Partition:
    if not parts:
        return ()
    cols = [0] * parts[0]
    for row in parts:
        for j in range(row):
            cols[j] += 1
    return tuple(cols)


def arm_leg(parts: Partition, box: Box) -> tuple[int, int]:
    """(arm, leg) of a box: counts strictly right of / strictly below it."""
    i, j = box
    if not (0 <= i < len(parts) and 0 <= j < parts[i]):
        raise ValueError(f"box {box} outside the diagram {parts}")
    arm = parts[i] - j - 1
    leg = conjugate(parts)[j] - i - 1
    return arm, leg


def hook_lengths(parts: Partition) -> list[int]:
    return [sum(arm_leg(parts, b)) + 1 for b in boxes(parts)]


def tangent_weights(
    parts: Partition, w1: LinForm, w2: LinForm, swap_arm_leg: bool = False
) -> list[LinForm]:
    """Tangent weights of the monomial ideal: 2 per box, none zero.

    Raises ValueError on a zero weight (degenerate chart data).
    """
    conj = conjugate(parts)
    out: list[LinForm] = []
    for i, row in enumerate(parts):
        for j in range(row):
            arm = row - j - 1
            leg = conj[j] - i - 1
            if swap_arm_leg:
                arm, leg = leg, arm
            out.append((leg + 1) * w1 + (-arm) * w2)
            out.append((-leg) * w1 + (arm + 1) * w2)
    for w in out:
        if w.is_zero():
            raise ValueError("zero tangent weight: chart weights are degenerate")
    return out


def twisted_tangent_weights(
    parts: Partition,
    w1: LinForm,
    w2: LinForm,
    mu: LinForm,
    swap_arm_leg: bool = False,
) -> list[LinForm]:
    """Tangent weights shifted by the line-bundle weight mu at the fixed point.

    Zero weights are allowed here; they make the Euler-class numerator vanish.
    """
    return [mu + w for w in tangent_weights(parts, w1, w2, swap_arm_leg)]


def taut_weights(
    parts: Partition, w1: LinForm, w2: LinForm, mu: LinForm
) -> list[LinForm]:
    """Weights of the rank-n tautological fiber: mu + i*w1 + j*w2 per box."""
    return [mu + i * w1 + j * w2 for i, j in boxes(parts)]
