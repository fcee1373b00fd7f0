"""Exact dense linear algebra over the Gaussian rationals.

Matrices are lists of row lists of GaussianRational.  Elimination is plain
Gauss-Jordan over the field Q(i); every step is exact so there is no pivot
tolerance to tune.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .series import GaussianRational, ONE, ZERO, gr

Matrix = List[List[GaussianRational]]


class SingularMatrixError(ValueError):
    pass


def mat(rows) -> Matrix:
    return [[gr(x) for x in row] for row in rows]


def eye(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[ZERO] * n for _ in range(m)]


def unit(n: int, i: int, j: int) -> Matrix:
    M = zeros(n, n)
    M[i][j] = ONE
    return M


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if len(A[0]) != len(B):
        raise ValueError(f"dimension mismatch {len(A)}x{len(A[0])} @ {len(B)}x{len(B[0])}")
    cols = list(zip(*B))
    out = []
    for row in A:
        out_row = []
        for col in cols:
            acc = ZERO
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            out_row.append(acc)
        out.append(out_row)
    return out


def mul_all(*Ms) -> Matrix:
    out = Ms[0]
    for M in Ms[1:]:
        out = matmul(out, M)
    return out


def add(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A, c) -> Matrix:
    c = gr(c)
    return [[a * c for a in row] for row in A]


def neg(A) -> Matrix:
    return [[-a for a in row] for row in A]


def transpose(A) -> Matrix:
    return [list(col) for col in zip(*A)]


def conj(A) -> Matrix:
    return [[a.conjugate() for a in row] for row in A]


def adjoint(A) -> Matrix:
    return transpose(conj(A))


def is_zero(A) -> bool:
    return all(not a for row in A for a in row)


def equal(A, B) -> bool:
    return len(A) == len(B) and all(
        len(ra) == len(rb) and all(a == b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def is_symmetric(A) -> bool:
    return equal(A, transpose(A))


def is_hermitian(A) -> bool:
    return equal(A, adjoint(A))


def commutator(A, B) -> Matrix:
    return sub(matmul(A, B), matmul(B, A))


def flatten(A) -> List[GaussianRational]:
    return [a for row in A for a in row]


def unflatten(v: Sequence[GaussianRational], m: int, n: int) -> Matrix:
    return [list(v[i * n:(i + 1) * n]) for i in range(m)]


def rref(A: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns (first nonzero entry pivoting)."""
    M = mat(A)
    if not M:
        return M, []
    m, n = len(M), len(M[0])
    pivots: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def det(A) -> GaussianRational:
    n = len(A)
    M = mat(A)
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = M[c][c].inverse()
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def inverse(A) -> Matrix:
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("inverse needs a square matrix")
    aug = [list(row) + eye(n)[i] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in R]


def nullspace(A) -> Matrix:
    """Basis of {x : A x = 0}, one vector per free column (free entry 1)."""
    if not A:
        return []
    n = len(A[0])
    R, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row_i, p in enumerate(piv):
            v[p] = -R[row_i][f]
        basis.append(v)
    return basis


def solve(A, b) -> Optional[List[GaussianRational]]:
    """One solution of A x = b with free variables set to zero, or None."""
    n = len(A[0])
    aug = [list(row) + [gr(bi)] for row, bi in zip(mat(A), b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [ZERO] * n
    for row_i, p in enumerate(piv):
        x[p] = R[row_i][n]
    return x


def span_coefficients(vectors: Sequence[Sequence], target: Sequence) -> Optional[List[GaussianRational]]:
    """Coefficients c with sum c_k vectors[k] = target, or None if outside the span."""
    if not vectors:
        return [] if all(not t for t in target) else None
    A = transpose([list(v) for v in vectors])
    return solve(A, list(target))


def in_span(vectors, target) -> bool:
    return span_coefficients(vectors, target) is not None


def linearly_independent(vectors) -> bool:
    if not vectors:
        return True
    return rank([list(v) for v in vectors]) == len(vectors)


def row_basis(vectors) -> Matrix:
    """Reduced echelon basis of the span of the given vectors."""
    if not vectors:
        return []
    R, piv = rref([list(v) for v in vectors])
    return R[:len(piv)]


def reduce_mod(vectors, target) -> List[GaussianRational]:
    """Canonical representative of target modulo span(vectors).

    The subspace is put in reduced echelon form and the pivot coordinates of
    the target are cleared, so equal cosets give equal outputs.
    """
    basis = row_basis(vectors)
    out = list(target)
    for row in basis:
        p = next(k for k, x in enumerate(row) if x)
        f = out[p]
        if f:
            out = [x - f * y for x, y in zip(out, row)]
    return out
