"""Exact integer linear algebra (Python ints, no floating point)."""
from __future__ import annotations

from typing import Sequence


def integer_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank by fraction-free (Bareiss) elimination.

    Every intermediate entry is an exact integer: the division by the previous
    pivot is exact by Sylvester's identity.
    """
    a = [[int(v) for v in row] for row in matrix]
    if not a or not a[0]:
        return 0
    rows, cols = len(a), len(a[0])
    rank, prev = 0, 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, rows):
            f = a[r][c]
            for k in range(c, cols):
                num = p * a[r][k] - f * a[rank][k]
                assert num % prev == 0
                a[r][k] = num // prev
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def row_times(vec: Sequence[int], matrix: Sequence[Sequence[int]]) -> list[int]:
    """Exact row-vector times matrix."""
    n = len(matrix[0]) if matrix else 0
    return [sum(int(vec[i]) * int(matrix[i][j]) for i in range(len(vec))) for j in range(n)]
