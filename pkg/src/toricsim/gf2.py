"""Linear algebra over GF(2) on integer bitmasks.

Vectors are Python integers read as little-endian bit vectors (bit i is
component i), so XOR is vector addition and AND-plus-popcount is the dot
product. Arbitrary widths are supported since Python integers are unbounded.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

__all__ = [
    "row_reduce",
    "rank",
    "in_span",
    "reduce_mod",
    "kernel_basis",
]


def row_reduce(vectors: Iterable[int]) -> list[int]:
    """Reduce a set of bit vectors to an independent basis.

    Parameters
    ----------
    vectors : iterable of int
        Bit vectors over GF(2).

    Returns
    -------
    list of int
        A basis of the span with pairwise distinct leading bits, sorted in
        decreasing order. Zero vectors are dropped, so ``len(result)`` is
        the rank.
    """
    basis: list[int] = []
    for v in vectors:
        v = reduce_mod(basis, v)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def rank(vectors: Iterable[int]) -> int:
    """Rank of a set of bit vectors over GF(2)."""
    return len(row_reduce(vectors))


def reduce_mod(basis: Sequence[int], v: int) -> int:
    """Reduce v against an echelon basis, returning the remainder.

    The basis must have pairwise distinct leading bits and be sorted in
    decreasing order, as produced by ``row_reduce``. The remainder is zero
    exactly when v lies in the span.
    """
    for b in basis:
        # XOR against b exactly when it clears the leading bit it owns.
        nxt = v ^ b
        if nxt < v:
            v = nxt
    return v


def in_span(vectors: Iterable[int], v: int) -> bool:
    """Whether v is a GF(2) combination of the given vectors."""
    return reduce_mod(row_reduce(vectors), v) == 0


def kernel_basis(vectors: Sequence[int]) -> list[int]:
    """Basis of combination masks whose XOR of input vectors vanishes.

    Parameters
    ----------
    vectors : sequence of int
        Bit vectors over GF(2).

    Returns
    -------
    list of int
        Masks c over input positions such that the XOR of ``vectors[i]``
        over all set bits i of c is zero. The masks form a basis of the
        kernel of the combination map, so every vanishing combination is
        an XOR of returned masks.
    """
    # Eliminate with an augmented identity: rows that cancel to zero keep
    # a record of which inputs combined to produce them.
    rows: list[tuple[int, int]] = []  # (reduced vector, combination mask)
    kernel: list[int] = []
    for i, v in enumerate(vectors):
        combo = 1 << i
        for rv, rc in rows:
            nxt = v ^ rv
            if nxt < v:
                v = nxt
                combo ^= rc
        if v:
            rows.append((v, combo))
            rows.sort(key=lambda rc: rc[0], reverse=True)
        else:
            kernel.append(combo)
    return kernel
