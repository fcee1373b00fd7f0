"""Block-matrix model of C g_- (+) csp(C g_-1).

An element is stored by its blocks and assembled on demand into the
(2s+2)x(2s+2) matrix

    [[c,    0,     0,     0 ],
     [v1,   L,     S02,   0 ],
     [v2,   S0m2,  -L^T,  0 ],
     [u*i,  v2^T,  -v1^T, -c]]

Entries may be GaussianRational or TruncatedSeries; the generic helpers
below work with either.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import linalg
from .series import I, ONE, ZERO, GaussianRational, SeriesMatrix, TruncatedSeries, gr


class LieError(ValueError):
    pass


GRADES = ((-2, 0), (-1, 1), (-1, -1), (0, 0), (0, 2), (0, -2))


# generic entry helpers -------------------------------------------------------

def _is_zero(x) -> bool:
    if isinstance(x, TruncatedSeries):
        return x.is_zero()
    return not x


def _eq(a, b) -> bool:
    return _is_zero(a - b)


def _conj(x):
    return x.conjugate()


def _gmul(A, B):
    out = []
    for row in A:
        out_row = []
        for j in range(len(B[0])):
            acc = ZERO
            for k, a in enumerate(row):
                b = B[k][j]
                if _is_zero(a) or _is_zero(b):
                    continue
                acc = a * b + acc
            out_row.append(acc)
        out.append(out_row)
    return out


def _gT(A):
    return [list(col) for col in zip(*A)]


def _gconj(A):
    return [[_conj(x) for x in row] for row in A]


def _gneg(A):
    return [[-x for x in row] for row in A]


def _gvec_conj(v):
    return [_conj(x) for x in v]


def _matvec(A, v):
    return [row[0] for row in _gmul(A, [[x] for x in v])]


def _entries(x):
    return x if isinstance(x, list) else list(x)


# element type ---------------------------------------------------------------

@dataclass
class CspElement:
    s: int
    c: object = ZERO
    L: Optional[list] = None
    S02: Optional[list] = None
    S0m2: Optional[list] = None
    v1: Optional[list] = None
    v2: Optional[list] = None
    u: object = ZERO

    def __post_init__(self):
        s = self.s
        zero_m = lambda: [[ZERO] * s for _ in range(s)]
        self.L = [list(r) for r in self.L] if self.L is not None else zero_m()
        self.S02 = [list(r) for r in self.S02] if self.S02 is not None else zero_m()
        self.S0m2 = [list(r) for r in self.S0m2] if self.S0m2 is not None else zero_m()
        self.v1 = list(self.v1) if self.v1 is not None else [ZERO] * s
        self.v2 = list(self.v2) if self.v2 is not None else [ZERO] * s
        for name in ("L", "S02", "S0m2"):
            M = getattr(self, name)
            if len(M) != s or any(len(r) != s for r in M):
                raise LieError(f"block {name} must be {s}x{s}")
        if len(self.v1) != s or len(self.v2) != s:
            raise LieError(f"vectors must have length {s}")
        for name in ("S02", "S0m2"):
            M = getattr(self, name)
            if not all(_eq(M[i][j], M[j][i]) for i in range(s) for j in range(i)):
                raise LieError(f"block {name} must be symmetric")

    @classmethod
    def from_rationals(cls, s, c=0, L=None, S02=None, S0m2=None, v1=None, v2=None, u=0):
        conv_m = lambda M: None if M is None else linalg.mat(M)
        conv_v = lambda v: None if v is None else [gr(x) for x in v]
        return cls(s, gr(c), conv_m(L), conv_m(S02), conv_m(S0m2), conv_v(v1), conv_v(v2), gr(u))

    # linear structure ------------------------------------------------------
    def _combine(self, other: "CspElement", f) -> "CspElement":
        if self.s != other.s:
            raise LieError("dimension mismatch")
        mm = lambda A, B: [[f(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
        return CspElement(self.s, f(self.c, other.c), mm(self.L, other.L),
                          mm(self.S02, other.S02), mm(self.S0m2, other.S0m2),
                          [f(a, b) for a, b in zip(self.v1, other.v1)],
                          [f(a, b) for a, b in zip(self.v2, other.v2)], f(self.u, other.u))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, k) -> "CspElement":
        m = lambda A: [[x * k for x in row] for row in A]
        return CspElement(self.s, self.c * k, m(self.L), m(self.S02), m(self.S0m2),
                          [x * k for x in self.v1], [x * k for x in self.v2], self.u * k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CspElement) or other.s != self.s:
            return NotImplemented
        return all(_is_zero(x) for x in (self - other).flat())

    __hash__ = None

    def flat(self) -> list:
        return ([self.c] + [x for r in self.L for x in r] + [x for r in self.S02 for x in r]
                + [x for r in self.S0m2 for x in r] + self.v1 + self.v2 + [self.u])

    def is_zero(self) -> bool:
        return all(_is_zero(x) for x in self.flat())

    # matrix form -----------------------------------------------------------
    def assemble(self) -> list:
        s = self.s
        n = 2 * s + 2
        M = [[ZERO] * n for _ in range(n)]
        M[0][0] = self.c
        for i in range(s):
            M[1 + i][0] = self.v1[i]
            M[1 + s + i][0] = self.v2[i]
            M[n - 1][1 + i] = self.v2[i]
            M[n - 1][1 + s + i] = -self.v1[i]
            for j in range(s):
                M[1 + i][1 + j] = self.L[i][j]
                M[1 + i][1 + s + j] = self.S02[i][j]
                M[1 + s + i][1 + j] = self.S0m2[i][j]
                M[1 + s + i][1 + s + j] = -self.L[j][i]
        M[n - 1][0] = self.u * I
        M[n - 1][n - 1] = -self.c
        return M

    @classmethod
    def disassemble(cls, M, s: int) -> "CspElement":
        """Read blocks back from an assembled matrix, checking the pattern."""
        n = 2 * s + 2
        if len(M) != n or any(len(r) != n for r in M):
            raise LieError("wrong matrix size")
        c = M[0][0]
        bad = []
        for j in range(1, n):
            if not _is_zero(M[0][j]):
                bad.append((0, j))
        for i in range(1, n - 1):
            if not _is_zero(M[i][n - 1]):
                bad.append((i, n - 1))
        v1 = [M[1 + i][0] for i in range(s)]
        v2 = [M[1 + s + i][0] for i in range(s)]
        L = [[M[1 + i][1 + j] for j in range(s)] for i in range(s)]
        S02 = [[M[1 + i][1 + s + j] for j in range(s)] for i in range(s)]
        S0m2 = [[M[1 + s + i][1 + j] for j in range(s)] for i in range(s)]
        for i in range(s):
            for j in range(s):
                if not _eq(M[1 + s + i][1 + s + j], -L[j][i]):
                    bad.append((1 + s + i, 1 + s + j))
            if not _eq(M[n - 1][1 + i], v2[i]):
                bad.append((n - 1, 1 + i))
            if not _eq(M[n - 1][1 + s + i], -v1[i]):
                bad.append((n - 1, 1 + s + i))
        if not _eq(M[n - 1][n - 1], -c):
            bad.append((n - 1, n - 1))
        if bad:
            raise LieError(f"matrix violates the csp block pattern at {bad[:4]}")
        u = M[n - 1][0] * (-I)
        return cls(s, c, L, S02, S0m2, v1, v2, u)


def bracket(x: CspElement, y: CspElement) -> CspElement:
    if x.s != y.s:
        raise LieError("dimension mismatch")
    X, Y = x.assemble(), y.assemble()
    XY, YX = _gmul(X, Y), _gmul(Y, X)
    C = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(XY, YX)]
    return CspElement.disassemble(C, x.s)


def project(x: CspElement, grade) -> CspElement:
    grade = tuple(grade)
    s = x.s
    if grade == (-2, 0):
        return CspElement(s, u=x.u)
    if grade == (-1, 1):
        return CspElement(s, v1=x.v1)
    if grade == (-1, -1):
        return CspElement(s, v2=x.v2)
    if grade == (0, 0):
        return CspElement(s, c=x.c, L=x.L)
    if grade == (0, 2):
        return CspElement(s, S02=x.S02)
    if grade == (0, -2):
        return CspElement(s, S0m2=x.S0m2)
    raise LieError(f"unknown grade {grade!r}")


# involution -----------------------------------------------------------------

@dataclass
class Involution:
    H: list
    eih: GaussianRational = ONE

    def __post_init__(self):
        self.H = linalg.mat(self.H)
        self.eih = gr(self.eih)
        s = len(self.H)
        if s < 1 or any(len(r) != s for r in self.H):
            raise LieError("H must be a square matrix")
        if not linalg.is_hermitian(self.H):
            raise LieError("H must be Hermitian")
        if linalg.rank(self.H) != s:
            raise LieError("H must be nondegenerate")
        if self.eih.norm2() != 1:
            raise LieError("e^{ih} must have modulus one")

    @property
    def s(self) -> int:
        return len(self.H)

    def __eq__(self, other) -> bool:
        # the pair is only defined up to a simultaneous sign
        if not isinstance(other, Involution):
            return NotImplemented
        if linalg.equal(self.H, other.H) and self.eih == other.eih:
            return True
        return linalg.equal(self.H, linalg.neg(other.H)) and self.eih == -other.eih

    __hash__ = None


def sigma(inv: Involution, x: CspElement) -> CspElement:
    """Antilinear involution attached to (H, e^{ih})."""
    s = x.s
    if inv.s != s:
        raise LieError("dimension mismatch")
    H = inv.H
    HT = linalg.transpose(H)
    HTinv = linalg.inverse(HT)
    Hinv = linalg.inverse(H)
    e = inv.eih
    v1 = [a * e for a in _matvec(HTinv, _gvec_conj(x.v2))]
    v2 = [a * e for a in _matvec(H, _gvec_conj(x.v1))]
    L = _gneg(_gmul(_gmul(HTinv, _gT(_gconj(x.L))), HT))
    S02 = _gmul(_gmul(HTinv, _gconj(x.S0m2)), Hinv)
    S0m2 = _gmul(_gmul(H, _gconj(x.S02)), HT)
    return CspElement(s, _conj(x.c), L, S02, S0m2, v1, v2, _conj(x.u) * (e * e))


# structure group ------------------------------------------------------------

@dataclass
class GroupElement00:
    b: GaussianRational
    B: list

    def __post_init__(self):
        self.b = gr(self.b)
        self.B = linalg.mat(self.B)
        if not self.b:
            raise LieError("b must be nonzero")
        if linalg.rank(self.B) != len(self.B):
            raise LieError("B must be invertible")

    @classmethod
    def identity(cls, s: int) -> "GroupElement00":
        return cls(ONE, linalg.eye(s))

    def __mul__(self, other: "GroupElement00") -> "GroupElement00":
        return GroupElement00(self.b * other.b, linalg.matmul(self.B, other.B))

    def inverse(self) -> "GroupElement00":
        return GroupElement00(self.b.inverse(), linalg.inverse(self.B))

    def matrix(self) -> list:
        s = len(self.B)
        n = 2 * s + 2
        M = linalg.zeros(n, n)
        M[0][0] = self.b
        M[n - 1][n - 1] = self.b.inverse()
        BinvT = linalg.transpose(linalg.inverse(self.B))
        for i in range(s):
            for j in range(s):
                M[1 + i][1 + j] = self.B[i][j]
                M[1 + s + i][1 + s + j] = BinvT[i][j]
        return M

    def adjoint_inverse(self, x: CspElement) -> CspElement:
        """Ad_{a^{-1}} x = a^{-1} x a for a constant element x."""
        a = self.matrix()
        ainv = linalg.inverse(a)
        return CspElement.disassemble(_gmul(_gmul(ainv, x.assemble()), a), x.s)

    def phase(self) -> GaussianRational:
        return self.b / self.b.conjugate()


def act(g: GroupElement00, target, kind: Optional[str] = None, correction=None):
    """Right action of (b, B) on an involution, a Xi matrix or an Omega matrix.

    ``kind`` is needed for bare matrices: ``"xi"`` or ``"omega"``.  For Omega the
    optional ``correction`` is the Maurer-Cartan term C (default 0).
    """
    B = g.B
    Binv = linalg.inverse(B)
    if isinstance(target, Involution):
        H = linalg.mul_all(linalg.transpose(B), target.H, linalg.conj(B))
        return Involution(H, g.phase() * target.eih)
    M = linalg.mat(target)
    if kind == "xi":
        return linalg.scale(linalg.mul_all(Binv, M, linalg.conj(B)), g.phase())
    if kind == "omega":
        out = linalg.mul_all(Binv, M, B)
        if correction is not None:
            out = linalg.add(out, linalg.mat(correction))
        return out
    raise LieError("act needs kind='xi' or kind='omega' for matrix targets")


# exp / log ------------------------------------------------------------------

def _series_matrix(x) -> SeriesMatrix:
    if isinstance(x, SeriesMatrix):
        return x
    M = x.assemble() if isinstance(x, CspElement) else x
    ref = next((e for row in M for e in row if isinstance(e, TruncatedSeries)), None)
    if ref is None:
        raise LieError("exp/log need series-valued entries")
    return SeriesMatrix([[e if isinstance(e, TruncatedSeries)
                          else TruncatedSeries.const(ref.space, e, ref.order, ref.grading)
                          for e in row] for row in M])


def mat_exp(x) -> SeriesMatrix:
    X = _series_matrix(x)
    if any(e.constant() for row in X for e in row):
        raise LieError("exp needs constant-term free entries")
    n = X.rows
    ident = SeriesMatrix.identity(n, X.space, X.order, X.grading)
    acc = ident
    power = ident
    fact = ONE
    for k in range(1, X.order + 1):
        power = power @ X
        if power.is_zero():
            break
        fact = fact * k
        acc = acc + power * fact.inverse()
    return acc


def mat_log_unipotent(x) -> SeriesMatrix:
    M = _series_matrix(x)
    n = M.rows
    ident = SeriesMatrix.identity(n, M.space, M.order, M.grading)
    N = M - ident
    if any(e.constant() for row in N for e in row):
        raise LieError("log needs Id + N with N constant-term free")
    acc = SeriesMatrix.zeros(n, n, M.space, M.order, M.grading)
    power = ident
    for k in range(1, M.order + 1):
        power = power @ N
        if power.is_zero():
            break
        coeff = GaussianRational(1 if k % 2 else -1) / k
        acc = acc + power * coeff
    return acc


def mat_exp_log(x, op: str) -> SeriesMatrix:
    if op == "exp":
        return mat_exp(x)
    if op == "log_unipotent":
        return mat_log_unipotent(x)
    raise LieError(f"unknown operation {op!r}")
