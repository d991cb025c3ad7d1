"""Pointwise Koszul machinery on a split tangent space ``TM = F + T``.

Index conventions
-----------------
Frame indices ``0 .. n1-1`` span F and ``n1 .. n1+n2-1`` span T.

* ``structure[a, b, k]`` is the coefficient of ``e_k`` in ``[e_a, e_b]``.
* ``d_structure[d, a, b, k]`` is ``e_d`` applied to that coefficient.
* ``d_metric_F[d, i, j]`` is ``e_d (g_F(e_i, e_j))`` and likewise for T.
* ``clifford[i]`` is the action of the coframe element ``phi^i`` on E.
* ``connection[a]`` is the matrix ``A_a`` with ``nabla^E_{e_a} = e_a + A_a``.
* ``curvature[a][b]`` is ``K^E(e_a, e_b)`` (optional, left-invariant only).
* ``extra_connection[p][a]`` adds ``u^p * M`` to the full fiber connection in
  direction ``a``; it is empty for the standard construction.

The full fiber is ``E (x) Lambda T*`` with the exterior basis of
:mod:`bismutlab.clifford`; odd operators on the second factor carry the
Koszul sign of E.

Two independent routes produce the finite-part operator:
:func:`assemble_Du` works from the raw Koszul formula for ``g_F + u^{-1} g_T``
with Laurent coefficients, :func:`global_formula` from the closed-form
u-independent connections and the six named summands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from . import exact
from .clifford import build_exterior
from .exact import Mat
from .laurent import U, U_INV, LaurentMatrix, LaurentPoly, lift
from .uea import UEAElement, WeightedAlgebra

SCHEMA = "bismutlab.frame/1"


class LaurentSupportError(RuntimeError):
    """Assembled operator has Laurent powers outside {-1, 0, 1}."""


class NotOrthonormalizable(ValueError):
    pass


def _fr_array(values, shape):
    arr = np.empty(shape, dtype=object)
    flat = np.asarray(values, dtype=object).reshape(-1) if len(shape) else values
    for idx, v in zip(np.ndindex(*shape), flat):
        arr[idx] = Fraction(v)
    return arr


def _zeros(shape):
    return _fr_array([0] * int(np.prod(shape)), shape)


def _fr_eye(n):
    out = _zeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def _is_identity(m) -> bool:
    n = m.shape[0]
    return all(m[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def _inverse(m):
    n = m.shape[0]
    dm = DomainMatrix([[QQ(int(x.numerator), int(x.denominator)) for x in row] for row in m], (n, n), QQ)
    inv = dm.inv().to_list()
    return _fr_array([Fraction(int(x.numerator), int(x.denominator)) for row in inv for x in row], (n, n))


@dataclass(frozen=True, eq=False)
class FramePointData:
    n1: int
    n2: int
    structure: np.ndarray
    metric_F: np.ndarray
    metric_T: np.ndarray
    d_metric_F: np.ndarray
    d_metric_T: np.ndarray
    clifford: tuple
    grading: Mat
    connection: tuple
    left_invariant: bool = True
    d_structure: np.ndarray | None = None
    curvature: tuple | None = None
    extra_connection: dict = field(default_factory=dict)
    name: str = ""

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def F(self) -> range:
        return range(self.n1)

    @property
    def T(self) -> range:
        return range(self.n1, self.n)

    @property
    def dim_E(self) -> int:
        return self.grading.shape[0]

    @property
    def dim_fiber(self) -> int:
        return self.dim_E * 2**self.n2

    @cached_property
    def exterior(self):
        return build_exterior(self.n2)

    def is_orthonormal(self) -> bool:
        return _is_identity(self.metric_F) and _is_identity(self.metric_T)

    def fiber_degrees(self) -> tuple:
        """Form degree on the transverse factor of every full-fiber basis vector."""
        degs = self.exterior.degrees()
        return tuple(d for _ in range(self.dim_E) for d in degs)

    def fiber_grading(self) -> Mat:
        return exact.kron(self.grading, self.exterior.parity)

    def validate(self) -> "FramePointData":
        n, n1, n2 = self.n, self.n1, self.n2
        if n1 < 1 or n2 < 1:
            raise ValueError("both F and T must have positive rank")
        if self.structure.shape != (n, n, n):
            raise ValueError("structure constants have the wrong shape")
        for a in range(n):
            for b in range(n):
                for k in range(n):
                    if self.structure[a, b, k] != -self.structure[b, a, k]:
                        raise ValueError("structure constants are not antisymmetric")
        for g, dg, r in ((self.metric_F, self.d_metric_F, n1), (self.metric_T, self.d_metric_T, n2)):
            if g.shape != (r, r) or dg.shape != (n, r, r):
                raise ValueError("metric arrays have the wrong shape")
            if any(g[i, j] != g[j, i] for i in range(r) for j in range(r)):
                raise ValueError("metric is not symmetric")
            if any(_leading_minor(g, k) <= 0 for k in range(1, r + 1)):
                raise ValueError("metric is not positive definite")
            if any(dg[d, i, j] != dg[d, j, i] for d in range(n) for i in range(r) for j in range(r)):
                raise ValueError("metric derivative is not symmetric")
        if len(self.clifford) != n1 or len(self.connection) != n:
            raise ValueError("Clifford or connection data has the wrong length")
        if self.left_invariant:
            if any(v for v in self.d_metric_F.flat) or any(v for v in self.d_metric_T.flat):
                raise ValueError("left-invariant data must have constant metric coefficients")
            if self.d_structure is not None and any(v for v in self.d_structure.flat):
                raise ValueError("left-invariant data must have constant structure constants")
            if self.algebra().jacobi_defect():
                raise ValueError("structure constants violate the Jacobi identity")
        return self

    def algebra(self, weights=None, names=None) -> WeightedAlgebra:
        """The frame Lie algebra (meaningful for left-invariant data)."""
        n = self.n
        names = names or tuple(f"e{a}" for a in range(n))
        brackets = {}
        for a in range(n):
            for b in range(a + 1, n):
                vec = {k: self.structure[a, b, k] for k in range(n) if self.structure[a, b, k]}
                if vec:
                    brackets[(a, b)] = vec
        filtered = weights is not None
        weights = weights or (1,) * n
        return WeightedAlgebra(tuple(names), tuple(weights), brackets, filtered=filtered)

    def curvature_matrices(self) -> tuple:
        """``K^E(e_a, e_b)``; derived from the connection for left-invariant data."""
        if self.curvature is not None:
            return self.curvature
        if not self.left_invariant:
            raise ValueError("curvature needs second derivatives; only left-invariant data supported")
        A = self.connection
        out = []
        for a in range(self.n):
            row = []
            for b in range(self.n):
                k = exact.comm(A[a], A[b])
                for c in range(self.n):
                    if self.structure[a, b, c]:
                        k = k - exact.smul(self.structure[a, b, c], A[c])
                row.append(k)
            out.append(tuple(row))
        return tuple(out)

    # serialization
    def to_json(self) -> dict:
        def arr(x):
            return None if x is None else {"shape": list(x.shape), "values": [str(v) for v in x.flat]}

        return {
            "schema": SCHEMA,
            "name": self.name,
            "n1": self.n1,
            "n2": self.n2,
            "left_invariant": self.left_invariant,
            "structure": arr(self.structure),
            "d_structure": arr(self.d_structure),
            "metric_F": arr(self.metric_F),
            "metric_T": arr(self.metric_T),
            "d_metric_F": arr(self.d_metric_F),
            "d_metric_T": arr(self.d_metric_T),
            "clifford": [exact.to_json(m) for m in self.clifford],
            "grading": exact.to_json(self.grading),
            "connection": [exact.to_json(m) for m in self.connection],
            "curvature": None
            if self.curvature is None
            else [[exact.to_json(m) for m in row] for row in self.curvature],
            "extra_connection": {
                str(p): [exact.to_json(m) for m in mats] for p, mats in sorted(self.extra_connection.items())
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FramePointData":
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")

        def arr(x):
            return None if x is None else _fr_array([Fraction(v) for v in x["values"]], tuple(x["shape"]))

        return cls(
            n1=obj["n1"],
            n2=obj["n2"],
            structure=arr(obj["structure"]),
            metric_F=arr(obj["metric_F"]),
            metric_T=arr(obj["metric_T"]),
            d_metric_F=arr(obj["d_metric_F"]),
            d_metric_T=arr(obj["d_metric_T"]),
            clifford=tuple(exact.from_json(m) for m in obj["clifford"]),
            grading=exact.from_json(obj["grading"]),
            connection=tuple(exact.from_json(m) for m in obj["connection"]),
            left_invariant=obj["left_invariant"],
            d_structure=arr(obj["d_structure"]),
            curvature=None
            if obj["curvature"] is None
            else tuple(tuple(exact.from_json(m) for m in row) for row in obj["curvature"]),
            extra_connection={
                int(p): tuple(exact.from_json(m) for m in mats) for p, mats in obj["extra_connection"].items()
            },
            name=obj.get("name", ""),
        )


def _leading_minor(g, k):
    sub = g[:k, :k]
    dm = DomainMatrix([[QQ(int(x.numerator), int(x.denominator)) for x in row] for row in sub], (k, k), QQ)
    return dm.det()


def make_frame_data(n1, n2, structure, clifford, grading, connection, metric_F=None, metric_T=None,
                    d_metric_F=None, d_metric_T=None, d_structure=None, left_invariant=True,
                    curvature=None, extra_connection=None, name="") -> FramePointData:
    """Convenience constructor filling identity metrics and zero derivatives."""
    n = n1 + n2
    st = structure if isinstance(structure, np.ndarray) else _zeros((n, n, n))
    if not isinstance(structure, np.ndarray):
        for (a, b), vec in structure.items():
            for k, v in vec.items():
                st[a, b, k] = Fraction(v)
                st[b, a, k] = -Fraction(v)
    return FramePointData(
        n1=n1,
        n2=n2,
        structure=st,
        metric_F=_fr_eye(n1) if metric_F is None else metric_F,
        metric_T=_fr_eye(n2) if metric_T is None else metric_T,
        d_metric_F=_zeros((n, n1, n1)) if d_metric_F is None else d_metric_F,
        d_metric_T=_zeros((n, n2, n2)) if d_metric_T is None else d_metric_T,
        clifford=tuple(clifford),
        grading=grading,
        connection=tuple(connection),
        left_invariant=left_invariant,
        d_structure=d_structure,
        curvature=curvature,
        extra_connection=extra_connection or {},
        name=name,
    ).validate()


# ---------------------------------------------------------------------------
# orthonormalization


def _rational_sqrt(q: Fraction) -> Fraction:
    if q < 0:
        raise NotOrthonormalizable("negative pivot")
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num != q.numerator or den * den != q.denominator:
        raise NotOrthonormalizable(f"pivot {q} has no rational square root")
    return Fraction(num, den)


def rational_cholesky(g) -> np.ndarray:
    """Lower-triangular ``L`` with ``g = L L^T``; raises if a pivot is irrational."""
    r = g.shape[0]
    L = _zeros((r, r))
    for j in range(r):
        s = g[j, j] - sum(L[j, k] ** 2 for k in range(j))
        L[j, j] = _rational_sqrt(s)
        for i in range(j + 1, r):
            L[i, j] = (g[i, j] - sum(L[i, k] * L[j, k] for k in range(j))) / L[j, j]
    return L


def _apply(M, arr, axis):
    """Contract ``M[new, old]`` against ``arr`` along ``axis``."""
    return np.moveaxis(np.tensordot(M, arr, axes=([1], [axis])), 0, axis)


def orthonormalize(data: FramePointData) -> FramePointData:
    """Replace the frame by ``e' = P e`` with ``P = blockdiag(L_F^{-1}, L_T^{-1})``.

    ``P`` is constant, so brackets and derivatives transform linearly and the
    new metrics are the identity at the point.  Clifford data is taken to
    already refer to the orthonormalized coframe.
    """
    if data.is_orthonormal():
        return data
    n, n1 = data.n, data.n1
    PF = _inverse(rational_cholesky(data.metric_F))
    PT = _inverse(rational_cholesky(data.metric_T))
    P = _zeros((n, n))
    P[:n1, :n1] = PF
    P[n1:, n1:] = PT
    Pinv = _inverse(P)
    st = _apply(P, _apply(P, _apply(Pinv.T, data.structure, 2), 1), 0)
    dst = None
    if data.d_structure is not None:
        dst = _apply(P, _apply(P, _apply(P, _apply(Pinv.T, data.d_structure, 3), 2), 1), 0)
    gF = PF.dot(data.metric_F).dot(PF.T)
    gT = PT.dot(data.metric_T).dot(PT.T)
    dgF = _apply(P, _apply(PF, _apply(PF, data.d_metric_F, 2), 1), 0)
    dgT = _apply(P, _apply(PT, _apply(PT, data.d_metric_T, 2), 1), 0)

    def mix(mats):
        return tuple(
            sum((exact.smul(P[a, b], mats[b]) for b in range(n) if P[a, b]), exact.zeros(*mats[0].shape))
            for a in range(n)
        )

    curv = None
    if data.curvature is not None:
        dim = data.dim_E
        curv = tuple(
            tuple(
                sum(
                    (
                        exact.smul(P[a, b] * P[d, c], data.curvature[b][c])
                        for b in range(n)
                        for c in range(n)
                        if P[a, b] and P[d, c]
                    ),
                    exact.zeros(dim),
                )
                for d in range(n)
            )
            for a in range(n)
        )
    extra = {p: mix(m) for p, m in data.extra_connection.items()}
    return replace(
        data,
        structure=st,
        d_structure=dst,
        metric_F=gF,
        metric_T=gT,
        d_metric_F=dgF,
        d_metric_T=dgT,
        connection=mix(data.connection),
        curvature=curv,
        extra_connection=extra,
    ).validate()


# ---------------------------------------------------------------------------
# scalar tensors


def _check_index(data, *idx):
    for i in idx:
        if not 0 <= i < data.n:
            raise IndexError(f"frame index {i} out of range")


def omega_F(data, U, Y, Z) -> Fraction:
    """``iota_U Omega_F(Y, Z) = g_T(U^T, [Z, Y]^T)``; zero unless ``U`` is in T."""
    _check_index(data, U, Y, Z)
    if U < data.n1 or Y >= data.n1 or Z >= data.n1:
        return Fraction(0)
    n1 = data.n1
    return sum(
        (data.metric_T[U - n1, nu - n1] * data.structure[Z, Y, nu] for nu in data.T), Fraction(0)
    )


def omega_T(data, X, U, V) -> Fraction:
    """``iota_X Omega_T(U, V) = g_F(X^F, [V, U]^F)``; zero unless ``X`` is in F."""
    _check_index(data, X, U, V)
    if X >= data.n1 or U < data.n1 or V < data.n1:
        return Fraction(0)
    return sum((data.metric_F[X, k] * data.structure[V, U, k] for k in data.F), Fraction(0))


def lie_metric_F(data, V, X, Y) -> Fraction:
    """``L_V g_F(X, Y)`` with brackets projected to F."""
    _check_index(data, V, X, Y)
    g = data.metric_F
    out = data.d_metric_F[V, X, Y]
    for k in data.F:
        out -= data.structure[V, X, k] * g[k, Y] + data.structure[V, Y, k] * g[X, k]
    return out


def lie_metric_T(data, Z, U, V) -> Fraction:
    """``L_Z g_T(U, V)`` with brackets projected to T; ``U, V`` are T indices."""
    _check_index(data, Z, U, V)
    n1 = data.n1
    g = data.metric_T
    out = data.d_metric_T[Z, U - n1, V - n1]
    for k in data.T:
        out -= data.structure[Z, U, k] * g[k - n1, V - n1] + data.structure[Z, V, k] * g[U - n1, k - n1]
    return out


# ---------------------------------------------------------------------------
# route A: raw Koszul for g_F + u^{-1} g_T


class KoszulLaurent:
    """Levi-Civita data of ``g_{M,u}`` at the point, with Laurent coefficients."""

    def __init__(self, data: FramePointData):
        self.data = data
        n, n1 = data.n, data.n1
        G = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
        DG = [[[LaurentPoly() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for i in data.F:
            for j in data.F:
                G[i][j] = LaurentPoly.const(data.metric_F[i, j])
                for d in range(n):
                    DG[d][i][j] = LaurentPoly.const(data.d_metric_F[d, i, j])
        for i in data.T:
            for j in data.T:
                G[i][j] = LaurentPoly.monomial(-1, data.metric_T[i - n1, j - n1])
                for d in range(n):
                    DG[d][i][j] = LaurentPoly.monomial(-1, data.d_metric_T[d, i - n1, j - n1])
        gFi, gTi = _inverse(data.metric_F), _inverse(data.metric_T)
        Ginv = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
        for i in data.F:
            for j in data.F:
                Ginv[i][j] = LaurentPoly.const(gFi[i, j])
        for i in data.T:
            for j in data.T:
                Ginv[i][j] = LaurentPoly.monomial(1, gTi[i - n1, j - n1])
        self.G, self.DG, self.Ginv = G, DG, Ginv

    def g(self, x: dict, y: dict) -> LaurentPoly:
        out = LaurentPoly()
        for a, xa in x.items():
            for b, yb in y.items():
                out = out + self.G[a][b] * (xa * yb)
        return out

    def br(self, a, b) -> dict:
        return {k: v for k, v in enumerate(self.data.structure[a, b]) if v}

    @cached_property
    def koszul(self):
        """``K[a][b][c] = g(nabla_{e_a} e_b, e_c)``."""
        n = self.data.n
        DG, br, g = self.DG, self.br, self.g
        K = [[[None] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    twice = (
                        DG[a][b][c]
                        + DG[b][c][a]
                        - DG[c][a][b]
                        + g(br(a, b), {c: 1})
                        - g(br(b, c), {a: 1})
                        + g(br(c, a), {b: 1})
                    )
                    K[a][b][c] = twice * Fraction(1, 2)
        return K

    @cached_property
    def christoffel(self):
        """``Gamma[a][b][d]``: coefficient of ``e_d`` in ``nabla_{e_a} e_b``."""
        n = self.data.n
        K, Gi = self.koszul, self.Ginv
        out = [[[LaurentPoly() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for d in range(n):
                    acc = LaurentPoly()
                    for c in range(n):
                        if Gi[c][d]:
                            acc = acc + K[a][b][c] * Gi[c][d]
                    out[a][b][d] = acc
        return out

    def _same_block(self, b, d):
        n1 = self.data.n1
        return (b < n1) == (d < n1)

    @cached_property
    def connection_F(self):
        """``nabla^{F,u}``: F-projection of the Levi-Civita connection on F."""
        d = self.data
        return [[[self.christoffel[a][i][j] for j in d.F] for i in d.F] for a in range(d.n)]

    @cached_property
    def connection_T(self):
        d = self.data
        return [[[self.christoffel[a][m][v] for v in d.T] for m in d.T] for a in range(d.n)]

    def shape_form(self, transverse=None):
        """``omega[a][b][c] = g_{M,u}(S_u(e_a) e_b, e_c)``.

        ``transverse`` optionally replaces the diagonal T-block connection
        (a table indexed like :attr:`connection_T`); the shape form is then
        taken relative to ``nabla^{F,u} + transverse``.
        """
        d = self.data
        n, n1 = d.n, d.n1
        Gam = self.christoffel
        S = [[[LaurentPoly() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if not self._same_block(b, c):
                        S[a][b][c] = Gam[a][b][c]
                    elif transverse is not None and b >= n1:
                        S[a][b][c] = Gam[a][b][c] - transverse[a][b - n1][c - n1]
        out = [[[LaurentPoly() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    acc = LaurentPoly()
                    for e in range(n):
                        if S[a][b][e] and self.G[e][c]:
                            acc = acc + S[a][b][e] * self.G[e][c]
                    out[a][b][c] = acc
        return out


def shape_form(data: FramePointData):
    """Shape form from the closed-form identities (no Koszul expansion)."""
    n = data.n
    half = Fraction(1, 2)
    out = [[[LaurentPoly() for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                val = LaurentPoly()
                if a < data.n1:
                    if b < data.n1 <= c:
                        val = LaurentPoly({0: -half * lie_metric_F(data, c, a, b), -1: -half * omega_F(data, c, a, b)})
                    elif c < data.n1 <= b:
                        val = -LaurentPoly(
                            {0: -half * lie_metric_F(data, b, a, c), -1: -half * omega_F(data, b, a, c)}
                        )
                else:
                    if c < data.n1 <= b:
                        val = LaurentPoly({-1: -half * lie_metric_T(data, c, a, b), 0: -half * omega_T(data, c, a, b)})
                    elif b < data.n1 <= c:
                        val = -LaurentPoly(
                            {-1: -half * lie_metric_T(data, b, a, c), 0: -half * omega_T(data, b, a, c)}
                        )
                out[a][b][c] = val
    return out


# ---------------------------------------------------------------------------
# route B: closed-form u-independent connections


def nabla_F0(data: FramePointData):
    """``G[a][i][j]``: coefficient of ``e_j`` in ``nabla^{F,0}_{e_a} e_i``."""
    n1 = data.n1
    g = data.metric_F
    st = data.structure

    def gF(x: int, vec) -> Fraction:  # g_F(e_x, vec^F)
        return sum((g[x, k] * vec[k] for k in data.F), Fraction(0))

    twice = _zeros((data.n, n1, n1))  # 2 g_F(nabla_a e_i, e_j)
    for a in range(data.n):
        for i in data.F:
            for j in data.F:
                if a < n1:
                    X, Y, Z = a, i, j
                    v = (
                        data.d_metric_F[X, Y, Z]
                        - gF(Y, st[X, Z])
                        - data.d_metric_F[Z, X, Y]
                        + gF(X, st[Z, Y])
                        + data.d_metric_F[Y, Z, X]
                        - gF(Z, st[Y, X])
                    )
                else:
                    T, Y, Z = a, i, j
                    v = data.d_metric_F[T, Y, Z] - gF(Y, st[T, Z]) - gF(Z, st[Y, T])
                twice[a, i, j] = v
    gi = _inverse(g)
    return np.einsum("aik,kj->aij", twice, gi) / 2


def nabla_T0(data: FramePointData):
    """``G[a][m][v]``: coefficient of ``f_v`` in ``nabla^{T,0}_{e_a} f_m`` (T-local indices)."""
    n1, n2 = data.n1, data.n2
    g = data.metric_T
    st = data.structure
    dg = data.d_metric_T

    def gT(x: int, vec) -> Fraction:
        return sum((g[x - n1, k - n1] * vec[k] for k in data.T), Fraction(0))

    twice = _zeros((data.n, n2, n2))
    for a in range(data.n):
        for U in data.T:
            for V in data.T:
                if a >= n1:
                    T = a
                    v = (
                        dg[T, U - n1, V - n1]
                        - gT(U, st[T, V])
                        - dg[V, T - n1, U - n1]
                        + gT(T, st[V, U])
                        + dg[U, V - n1, T - n1]
                        - gT(V, st[U, T])
                    )
                else:
                    X = a
                    v = dg[X, U - n1, V - n1] - gT(U, st[X, V]) - gT(V, st[U, X])
                twice[a, U - n1, V - n1] = v
    gi = _inverse(g)
    return np.einsum("aik,kj->aij", twice, gi) / 2


# ---------------------------------------------------------------------------
# operators on the full fiber


@dataclass(frozen=True, eq=False)
class ConstantOperator:
    """``sum_a derivative[a] * e_a + zeroth`` with exact matrix coefficients."""

    derivative: tuple
    zeroth: Mat

    @property
    def dim(self) -> int:
        return self.zeroth.shape[0]

    @classmethod
    def zero(cls, n: int, dim: int) -> "ConstantOperator":
        return cls(tuple(exact.zeros(dim) for _ in range(n)), exact.zeros(dim))

    def __add__(self, other):
        return ConstantOperator(
            tuple(a + b for a, b in zip(self.derivative, other.derivative)), self.zeroth + other.zeroth
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return ConstantOperator(tuple(exact.smul(c, m) for m in self.derivative), exact.smul(c, self.zeroth))

    def __eq__(self, other):
        if not isinstance(other, ConstantOperator):
            return NotImplemented
        return all(a == b for a, b in zip(self.derivative, other.derivative)) and self.zeroth == other.zeroth

    def is_zero(self) -> bool:
        return all(exact.is_zero(m) for m in self.derivative) and exact.is_zero(self.zeroth)

    def to_uea(self, algebra: WeightedAlgebra, degrees=None) -> UEAElement:
        terms = {(a,): m for a, m in enumerate(self.derivative)}
        terms[()] = self.zeroth
        return UEAElement(algebra, self.dim, terms, degrees)

    def to_json(self) -> dict:
        return {
            "derivative": [exact.to_json(m) for m in self.derivative],
            "zeroth": exact.to_json(self.zeroth),
        }


@dataclass(frozen=True, eq=False)
class LaurentOperator:
    derivative: tuple
    zeroth: LaurentMatrix

    @property
    def support(self) -> frozenset:
        out = set(self.zeroth.support)
        for m in self.derivative:
            out |= m.support
        return frozenset(out)

    def coefficient(self, k: int) -> ConstantOperator:
        return ConstantOperator(tuple(m.coeff(k) for m in self.derivative), self.zeroth.coeff(k))


def finite_part(op: LaurentOperator) -> ConstantOperator:
    return op.coefficient(0)


class FiberOps:
    """Exact operators on ``E (x) Lambda T*`` for one data set."""

    def __init__(self, data: FramePointData):
        self.data = data
        ext = data.exterior
        self.ext = ext
        self.dE = data.dim_E
        self.dL = ext.dim
        self.kappa = data.grading
        self.IE = exact.eye(self.dE)
        self.IL = exact.eye(self.dL)
        self.dim = self.dE * self.dL

    def on_E(self, m: Mat) -> Mat:
        return exact.kron(m, self.IL)

    def on_L_even(self, m: Mat) -> Mat:
        return exact.kron(self.IE, m)

    def on_L_odd(self, m: Mat) -> Mat:
        return exact.kron(self.kappa, m)

    def c(self, i) -> Mat:
        return self.on_E(self.data.clifford[i])

    def eps(self, mu_local) -> Mat:
        return self.on_L_odd(self.ext.wedge[mu_local])

    def iota(self, mu_local) -> Mat:
        return self.on_L_odd(self.ext.contract[mu_local])

    def transverse_derivation(self, gamma_rows) -> Mat:
        """Derivation of Lambda T* induced by ``nabla f_m = sum_v gamma[m][v] f_v``."""
        out = exact.zeros(self.dL)
        for m, row in enumerate(gamma_rows):
            for v, coef in enumerate(row):
                if coef:
                    out = out - exact.smul(coef, self.ext.wedge[m] * self.ext.contract[v])
        return out

    def clifford_two_form(self, omega_F_pairs) -> Mat:
        """``c(w) = 1/2 sum_ij w(e_i, e_j) c_i c_j`` on E."""
        cl = self.data.clifford
        out = exact.zeros(self.dE)
        for (i, j), w in omega_F_pairs.items():
            if w:
                out = out + exact.smul(Fraction(w) / 2, cl[i] * cl[j])
        return out


def _laurent_transverse_derivation(ops: FiberOps, gamma) -> LaurentMatrix:
    """Laurent version of :meth:`FiberOps.transverse_derivation` lifted to the full fiber."""
    powers = set()
    for row in gamma:
        for p in row:
            powers |= p.support
    coeffs = {}
    for k in powers:
        rows = [[p.coeff(k) for p in row] for row in gamma]
        coeffs[k] = ops.on_L_even(ops.transverse_derivation(rows))
    return LaurentMatrix((ops.dim, ops.dim), coeffs)


def _clifford_map(ops: FiberOps, data: FramePointData, iota_twist: Mat | None):
    """``m_u(theta^a)`` for every frame direction."""
    out = []
    for i in data.F:
        out.append(lift(ops.c(i)))
    for mu in range(data.n2):
        eps = lift(ops.eps(mu))
        iota = ops.iota(mu)
        if iota_twist is not None:
            iota = exact.kron(iota_twist, ops.IL) * iota
        out.append(eps - LaurentMatrix.const(iota) * U)
    return out


def assemble_Du(
    data: FramePointData, *, transverse: str = "u", iota_twist: Mat | None = None, strict: bool = True
) -> LaurentOperator:
    """Dirac family ``m_u o (nabla^{E,u} + nabla^{T,u} + 1/2 m_u omega_u)``.

    ``transverse="0"`` uses the u-independent transverse connection (and the
    matching shape form) instead of ``nabla^{T,u}``; it produces the
    Bismut-type comparison operator.  ``iota_twist`` multiplies every
    contraction in the transverse Clifford action, i.e. ``eps - u K iota``.
    """
    data = orthonormalize(data)
    ops = FiberOps(data)
    kz = KoszulLaurent(data)
    n, n1 = data.n, data.n1
    dim = ops.dim
    m = _clifford_map(ops, data, iota_twist)
    if transverse == "u":
        gamma_T = kz.connection_T
        omega = kz.shape_form()
    elif transverse == "0":
        gamma_T = [[[LaurentPoly.const(p.coeff(0)) for p in row] for row in rows] for rows in kz.connection_T]
        omega = kz.shape_form(transverse=gamma_T)
    else:
        raise ValueError("transverse must be 'u' or '0'")
    zeroth = LaurentMatrix.zero(dim)
    for a in range(n):
        conn = lift(ops.on_E(data.connection[a]))
        if a >= n1:
            cO = ops.clifford_two_form({(i, j): omega_F(data, a, i, j) for i in data.F for j in data.F})
            conn = conn + LaurentMatrix.const(ops.on_E(cO)) * (U_INV * Fraction(1, 4))
        conn = conn + _laurent_transverse_derivation(ops, gamma_T[a])
        two_form = LaurentMatrix.zero(dim)
        for b in range(n):
            for c in range(n):
                w = omega[a][b][c]
                if w:
                    two_form = two_form + (m[b] * m[c]) * w
        conn = conn + two_form * Fraction(1, 4)
        for p, mats in data.extra_connection.items():
            conn = conn + LaurentMatrix(mats[a].shape, {p: mats[a]})
        zeroth = zeroth + m[a] * conn
    op = LaurentOperator(tuple(m), zeroth)
    allowed = {-1, 0, 1} if strict else {-1, 0, 1, 2}
    if not op.support <= allowed:
        raise LaurentSupportError(f"Laurent support {sorted(op.support)} outside {sorted(allowed)}")
    if 2 in op.support and iota_twist is None and transverse == "u":
        if op.zeroth.coeff(2) != transverse_quadratic_term(data):
            raise LaurentSupportError("u^2 coefficient differs from the transverse quadratic term")
    return op


def transverse_quadratic_term(data: FramePointData) -> Mat:
    """``u^2`` coefficient of the family: ``-1/4 sum Omega_T(e_i; f_mu, f_nu) c_i iota_mu iota_nu``.

    It vanishes when ``n2 = 1`` or ``[T, T]`` has no F-component.
    """
    data = orthonormalize(data)
    ops = FiberOps(data)
    n1 = data.n1
    acc = exact.zeros(ops.dim)
    for i in data.F:
        for mu in range(data.n2):
            for nu in range(data.n2):
                w = omega_T(data, i, n1 + mu, n1 + nu)
                if w:
                    acc = acc - exact.smul(w / 4, ops.c(i) * ops.iota(mu) * ops.iota(nu))
    return acc


@dataclass(frozen=True, eq=False)
class GlobalFormula:
    summands: dict
    total: ConstantOperator


SUMMAND_COEFFICIENTS = {
    "horizontal_dirac": Fraction(1),
    "transverse_de_rham": Fraction(1),
    "iota_c_omega_F": Fraction(1, 4),
    "eps_trace_lie_g_F": Fraction(1, 4),
    "c_eps_omega_T": Fraction(-1, 2),
    "c_trace_lie_g_T": Fraction(1, 4),
}


def _zeroth_only(data, m: Mat) -> ConstantOperator:
    return ConstantOperator(tuple(exact.zeros(m.shape[0]) for _ in range(data.n)), m)


def global_formula(data: FramePointData) -> GlobalFormula:
    """Six named summands (unscaled) plus their weighted total.

    A nonzero ``extra_connection`` contributes a seventh summand, the finite
    part of ``sum_a m_u(theta^a) extra_a(u)``.
    """
    data = orthonormalize(data)
    ops = FiberOps(data)
    n, n1, n2 = data.n, data.n1, data.n2
    dim = ops.dim
    GT = nabla_T0(data)
    Z = exact.zeros(dim)

    def lam(a):
        return ops.on_L_even(ops.transverse_derivation(GT[a]))

    deriv = [Z] * n
    zeroth = Z
    for i in data.F:
        deriv[i] = ops.c(i)
        zeroth = zeroth + ops.c(i) * (ops.on_E(data.connection[i]) + lam(i))
    horizontal = ConstantOperator(tuple(deriv), zeroth)

    deriv = [Z] * n
    zeroth = Z
    for mu in range(n2):
        a = n1 + mu
        deriv[a] = ops.eps(mu)
        zeroth = zeroth + ops.eps(mu) * (ops.on_E(data.connection[a]) + lam(a))
    de_rham = ConstantOperator(tuple(deriv), zeroth)

    cl = [ops.c(i) for i in data.F]
    acc = Z
    for mu in range(n2):
        for i in data.F:
            for j in data.F:
                w = omega_F(data, n1 + mu, i, j)
                if w:
                    acc = acc + exact.smul(w / 2, cl[i] * cl[j] * ops.iota(mu))
    iota_c = _zeroth_only(data, acc)

    acc = Z
    for mu in range(n2):
        tr = sum((lie_metric_F(data, n1 + mu, i, i) for i in data.F), Fraction(0))
        if tr:
            acc = acc + exact.smul(tr, ops.eps(mu))
    eps_tr = _zeroth_only(data, acc)

    acc = Z
    for i in data.F:
        for mu in range(n2):
            for nu in range(n2):
                w = omega_T(data, i, n1 + mu, n1 + nu)
                if w:
                    acc = acc + exact.smul(w / 2, cl[i] * ops.eps(mu) * ops.eps(nu))
    c_eps = _zeroth_only(data, acc)

    acc = Z
    for i in data.F:
        tr = sum((lie_metric_T(data, i, n1 + mu, n1 + mu) for mu in range(n2)), Fraction(0))
        if tr:
            acc = acc + exact.smul(tr, cl[i])
    c_tr = _zeroth_only(data, acc)

    summands = {
        "horizontal_dirac": horizontal,
        "transverse_de_rham": de_rham,
        "iota_c_omega_F": iota_c,
        "eps_trace_lie_g_F": eps_tr,
        "c_eps_omega_T": c_eps,
        "c_trace_lie_g_T": c_tr,
    }
    total = ConstantOperator.zero(n, dim)
    for name, op in summands.items():
        total = total + op.scale(SUMMAND_COEFFICIENTS[name])
    if data.extra_connection:
        m = _clifford_map(ops, data, None)
        acc = LaurentMatrix.zero(dim)
        for a in range(n):
            for p, mats in data.extra_connection.items():
                acc = acc + m[a] * LaurentMatrix(mats[a].shape, {p: mats[a]})
        summands["extra_connection"] = _zeroth_only(data, acc.finite_part())
        total = total + summands["extra_connection"]
    return GlobalFormula(summands, total)


def trace_forms_clifford(data: FramePointData) -> dict:
    """Double-Clifford local forms of the two trace summands (for cross-checking)."""
    data = orthonormalize(data)
    ops = FiberOps(data)
    n1, n2 = data.n1, data.n2
    cl = [ops.c(i) for i in data.F]
    eps_tr = exact.zeros(ops.dim)
    for mu in range(n2):
        for i in data.F:
            for j in data.F:
                w = lie_metric_F(data, n1 + mu, i, j)
                if w:
                    eps_tr = eps_tr - exact.smul(w, cl[i] * cl[j] * ops.eps(mu))
    c_tr = exact.zeros(ops.dim)
    for i in data.F:
        for mu in range(n2):
            for nu in range(n2):
                w = lie_metric_T(data, i, n1 + mu, n1 + nu)
                if w:
                    c_tr = c_tr - exact.smul(
                        w, ops.eps(mu) * cl[i] * ops.iota(nu) + ops.iota(mu) * cl[i] * ops.eps(nu)
                    )
    return {"eps_trace_lie_g_F": eps_tr, "c_trace_lie_g_T": c_tr}


def contact_formula(data: FramePointData) -> ConstantOperator:
    """``D^F + eps_theta nabla_T + 1/4 c(dtheta) iota_T + 1/4 eps o trLg_F``.

    Requires one transverse direction with ``L_X g_T = 0`` along F.
    """
    data = orthonormalize(data)
    _require_contact(data)
    return _contact_like(data, None)


def _require_contact(data):
    if data.n2 != 1:
        raise ValueError("contact formula needs a single transverse direction")
    n1 = data.n1
    if any(lie_metric_T(data, i, n1, n1) for i in data.F):
        raise ValueError("transverse metric is not invariant along F")


def _contact_like(data, gamma: Mat | None) -> ConstantOperator:
    g = global_formula(data).summands
    ops = FiberOps(data)
    n1 = data.n1
    c_dtheta = ops.on_E(ops.clifford_two_form({(i, j): omega_F(data, n1, i, j) for i in data.F for j in data.F}))
    coef = exact.smul(Fraction(1, 4), exact.eye(ops.dim)) if gamma is None else ops.on_E(gamma)
    twist = _zeroth_only(data, coef * c_dtheta * ops.iota(0))
    return g["horizontal_dirac"] + g["transverse_de_rham"] + twist + g["eps_trace_lie_g_F"].scale(Fraction(1, 4))


def gamma_twisted(data: FramePointData, gamma: Mat, *, route: str = "formula") -> ConstantOperator:
    """Finite part of the gamma-twisted family (``c(theta) = eps - 4 u gamma iota``).

    ``route="formula"`` uses ``D^F + eps nabla_T + gamma c(dtheta) iota_T + 1/4 eps trLg_F``;
    ``route="assembled"`` rebuilds the Laurent family with the twisted
    Clifford action and extracts the finite part.
    """
    data = orthonormalize(data)
    _require_contact(data)
    if not exact.is_zero(gamma * data.grading - data.grading * gamma):
        raise ValueError("gamma must be even")
    if route == "formula":
        return _contact_like(data, gamma)
    if route == "assembled":
        return finite_part(assemble_Du(data, iota_twist=exact.smul(4, gamma)))
    raise ValueError("route must be 'formula' or 'assembled'")


# ---------------------------------------------------------------------------
# Clifford compatibility and left-invariant identities


def clifford_compatibility_defect(data: FramePointData) -> list:
    """Directions where ``[A_a, c(phi^j)] != c(nabla^{F,0}_a phi^j)``."""
    data = orthonormalize(data)
    G = nabla_F0(data)
    bad = []
    cl = data.clifford
    for a in range(data.n):
        for j in data.F:
            rhs = exact.zeros(data.dim_E)
            for k in data.F:
                if G[a, k, j]:
                    rhs = rhs - exact.smul(G[a, k, j], cl[k])
            if exact.comm(data.connection[a], cl[j]) != rhs:
                bad.append((a, j))
    return bad


def _require_invariant(data):
    if not data.left_invariant:
        raise ValueError("identity needs second derivatives; only left-invariant data is supported")


def curvature_F0(data: FramePointData) -> np.ndarray:
    """``R[a, b, i, j]``: coefficient of ``e_j`` in ``R^{F,0}(e_a, e_b) e_i``."""
    _require_invariant(data)
    G = nabla_F0(data)  # G[a, i, j]
    n, n1 = data.n, data.n1
    M = [G[a].T for a in range(n)]  # M[a][j, i] = G[a, i, j], acts on column vectors
    R = _zeros((n, n, n1, n1))
    for a in range(n):
        for b in range(n):
            curv = M[a].dot(M[b]) - M[b].dot(M[a])
            for c in range(n):
                if data.structure[a, b, c]:
                    curv = curv - M[c] * data.structure[a, b, c]
            for i in range(n1):
                for j in range(n1):
                    R[a, b, i, j] = curv[j, i]
    return R


def _nabla_vec(data, alg, vec: dict) -> UEAElement:
    dim = data.dim_E
    out = UEAElement(alg, dim)
    for a, v in vec.items():
        if v:
            out = out + UEAElement(alg, dim, {(a,): exact.smul(v, exact.eye(dim)), (): exact.smul(v, data.connection[a])})
    return out


@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    residual: object


def weitzenbock_check(data: FramePointData) -> IdentityResult:
    """Square of the horizontal Dirac operator versus Bochner + torsion + curvature terms."""
    _require_invariant(data)
    data = orthonormalize(data)
    alg = data.algebra()
    dim = data.dim_E
    cl = data.clifford
    D = UEAElement(alg, dim)
    for i in data.F:
        D = D + cl[i] * _nabla_vec(data, alg, {i: 1})
    lhs = D * D

    G = nabla_F0(data)
    rhs = UEAElement(alg, dim)
    for i in data.F:
        ni = _nabla_vec(data, alg, {i: 1})
        rhs = rhs - ni * ni + _nabla_vec(data, alg, {j: G[i, i, j] for j in data.F})
    K = data.curvature_matrices()
    for i in data.F:
        for j in data.F:
            cc = cl[i] * cl[j]
            tilde = {k: data.structure[j, i, k] for k in data.T}  # [e_j, e_i]^T
            rhs = rhs - (exact.smul(Fraction(1, 2), cc)) * _nabla_vec(data, alg, tilde)
            rhs = rhs + UEAElement(alg, dim, {(): exact.smul(Fraction(1, 2), cc * K[i][j])})
    residual = lhs - rhs
    return IdentityResult(residual.is_zero(), residual)


def _lie_F_along(data, vec: dict, X, Y) -> Fraction:
    return sum((v * lie_metric_F(data, V, X, Y) for V, v in vec.items() if v), Fraction(0))


def _tilde_omega(data, X, Y) -> dict:
    return {k: data.structure[Y, X, k] for k in data.T if data.structure[Y, X, k]}


def bianchi_defect_check(data: FramePointData) -> IdentityResult:
    _require_invariant(data)
    data = orthonormalize(data)
    R = curvature_F0(data)
    g = data.metric_F
    F = list(data.F)
    bad = {}

    def gR(a, b, i, w):
        return sum((R[a, b, i, j] * g[j, w] for j in F), Fraction(0))

    for X in F:
        for Y in F:
            for Zi in F:
                for W in F:
                    lhs = gR(X, Y, Zi, W) + gR(Zi, X, Y, W) + gR(Y, Zi, X, W)
                    rhs = Fraction(1, 2) * (
                        _lie_F_along(data, _tilde_omega(data, Y, Zi), X, W)
                        + _lie_F_along(data, _tilde_omega(data, X, Y), Zi, W)
                        + _lie_F_along(data, _tilde_omega(data, Zi, X), Y, W)
                    )
                    if lhs != rhs:
                        bad[(X, Y, Zi, W)] = lhs - rhs
    return IdentityResult(not bad, bad)


def bianchi_rhs_vanishes(data: FramePointData) -> bool:
    """Whether the cyclic Lie-derivative sum is identically zero on F."""
    data = orthonormalize(data)
    F = list(data.F)
    for X in F:
        for Y in F:
            for Zi in F:
                for W in F:
                    s = (
                        _lie_F_along(data, _tilde_omega(data, Y, Zi), X, W)
                        + _lie_F_along(data, _tilde_omega(data, X, Y), Zi, W)
                        + _lie_F_along(data, _tilde_omega(data, Zi, X), Y, W)
                    )
                    if s:
                        return False
    return True


def ricci_F0(data) -> np.ndarray:
    R = curvature_F0(data)
    F = list(data.F)
    out = _zeros((data.n1, data.n1))
    for X in F:
        for Y in F:
            out[X, Y] = sum((R[X, i, i, Y] for i in F), Fraction(0))
    return out


def _c_two_form(data, form) -> Mat:
    cl = data.clifford
    out = exact.zeros(data.dim_E)
    for i in data.F:
        for j in data.F:
            if form[i, j]:
                out = out + exact.smul(form[i, j] / 2, cl[i] * cl[j])
    return out


def contraction_terms(data: FramePointData) -> dict:
    """Named pieces of the Clifford-contracted curvature identity (matrices on E)."""
    _require_invariant(data)
    data = orthonormalize(data)
    R = curvature_F0(data)
    F = list(data.F)
    n1 = data.n1
    cl = data.clifford
    lhs = exact.zeros(data.dim_E)
    for k in F:
        for l in F:
            for i in F:
                for j in F:
                    if R[k, l, i, j]:
                        lhs = lhs + exact.smul(R[k, l, i, j] / 8, cl[k] * cl[l] * cl[i] * cl[j])

    def L(x1, x2, x3, x4):  # L_{tilde Omega(x1, x2)} g_F(x3, x4)
        return _lie_F_along(data, _tilde_omega(data, x1, x2), x3, x4)

    tr34 = _zeros((n1, n1))
    tr23a14 = _zeros((n1, n1))
    for X in F:
        for Y in F:
            perp = [l for l in F if l not in (X, Y)]
            tr34[X, Y] = sum((L(X, Y, l, l) for l in perp), Fraction(0))
            tr23a14[X, Y] = sum(((L(X, l, l, Y) - L(Y, l, l, X)) / 2 for l in perp), Fraction(0))
    ric = ricci_F0(data)
    sym_trace = sum((ric[i, i] for i in F), Fraction(0))
    aric = _zeros((n1, n1))
    for X in F:
        for Y in F:
            aric[X, Y] = (ric[X, Y] - ric[Y, X]) / 2
    return {
        "lhs": lhs,
        "c_tr34": _c_two_form(data, tr34),
        "c_tr23_a14": _c_two_form(data, tr23a14),
        "trace_sym_ric": exact.smul(sym_trace, exact.eye(data.dim_E)),
        "c_antisym_ric": _c_two_form(data, aric),
    }


def curvature_contraction_check(data: FramePointData) -> IdentityResult:
    t = contraction_terms(data)
    rhs = (
        exact.smul(Fraction(1, 8), t["c_tr34"])
        - exact.smul(Fraction(1, 4), t["c_tr23_a14"])
        + exact.smul(Fraction(1, 4), t["trace_sym_ric"])
        - exact.smul(Fraction(1, 2), t["c_antisym_ric"])
    )
    residual = t["lhs"] - rhs
    return IdentityResult(exact.is_zero(residual), residual)


def clifford_curvature(data: FramePointData, a: int, b: int) -> Mat:
    """``c(R^{F,0}(e_a, e_b)) = 1/4 g_F(R e_i, e_j) c_i c_j``."""
    R = curvature_F0(data)
    cl = data.clifford
    out = exact.zeros(data.dim_E)
    for i in data.F:
        for j in data.F:
            if R[a, b, i, j]:
                out = out + exact.smul(R[a, b, i, j] / 4, cl[i] * cl[j])
    return out


class CliffordCommutationError(ValueError):
    pass


def fes_split(data: FramePointData) -> tuple:
    """Twisting curvature ``F^{E/S} = K^E - c(R^{F,0})``, checked to commute with Clifford."""
    _require_invariant(data)
    data = orthonormalize(data)
    K = data.curvature_matrices()
    out = []
    for a in range(data.n):
        row = []
        for b in range(data.n):
            f = K[a][b] - clifford_curvature(data, a, b)
            for c in data.clifford:
                if not exact.is_zero(exact.comm(f, c)):
                    raise CliffordCommutationError(f"F^(E/S)({a},{b}) does not commute with the Clifford action")
            row.append(f)
        out.append(tuple(row))
    return tuple(out)


def spin_connection(data_like, clifford, G) -> tuple:
    """``A_a = 1/4 sum_jk g(nabla_a e_j, e_k) c_j c_k`` for connection table ``G[a, j, k]``."""
    n1 = len(clifford)
    dim = clifford[0].shape[0]
    out = []
    for a in range(G.shape[0]):
        acc = exact.zeros(dim)
        for j in range(n1):
            for k in range(n1):
                if G[a, j, k]:
                    acc = acc + exact.smul(G[a, j, k] / 4, clifford[j] * clifford[k])
        out.append(acc)
    return tuple(out)


def form_derivation(exterior, G) -> tuple:
    """Derivation of Lambda F* induced by a connection table ``G[a, i, j]``."""
    out = []
    for a in range(G.shape[0]):
        acc = exact.zeros(exterior.dim)
        for i in range(exterior.rank):
            for j in range(exterior.rank):
                if G[a, i, j]:
                    acc = acc - exact.smul(G[a, i, j], exterior.wedge[i] * exterior.contract[j])
        out.append(acc)
    return tuple(out)
