"""Smith normal form of integer matrices and rank over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        n = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(n)]

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(cols)] for i in range(len(A))]


def _snf(M: Sequence[Sequence[int]], ncols: int, track: bool):
    A = [list(map(int, row)) for row in M]
    m, n = len(A), ncols
    U = _identity(m) if track else None
    V = _identity(n) if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        if q:
            rs, rd = A[src], A[dst]
            for k in range(n):
                if rs[k]:
                    rd[k] -= q * rs[k]
            if track:
                us, ud = U[src], U[dst]
                for k in range(m):
                    ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        if q:
            for row in A:
                if row[src]:
                    row[dst] -= q * row[src]
            if track:
                for row in V:
                    row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            # smallest nonzero entry in the remaining block becomes the pivot
            best = None
            for i in range(t, m):
                row = A[i]
                for j in range(t, n):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                return A, U, V
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
    return A, U, V


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    if ncols is None:
        ncols = len(M[0]) if M else 0
    D, U, V = _snf(M, ncols, True)
    return SmithForm(U, D, V)


def invariant_factors(M: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero diagonal of the Smith form, without transform bookkeeping."""
    D, _, _ = _snf(M, ncols, False)
    return sorted(abs(D[i][i]) for i in range(min(len(D), ncols)) if D[i][i])


def rational_rank(M: Sequence[Sequence], ncols: int) -> int:
    A = [[Fraction(x) for x in row] for row in M]
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(A)) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        pr = A[rank]
        for r in range(len(A)):
            if r != rank and A[r][c]:
                f = A[r][c] / pr[c]
                A[r] = [a - f * b for a, b in zip(A[r], pr)]
        rank += 1
    return rank
