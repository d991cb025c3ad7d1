"""Exact sparse matrices over the Gaussian rationals.

Thin helpers around :class:`sympy.polys.matrices.DomainMatrix` with the
``QQ_I`` domain.  Every algebraic module in the package builds its fiber
operators with these, so identities can be checked with ``==`` instead of a
tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

DOMAIN = QQ_I
Mat = DomainMatrix

_GAUSS = type(QQ_I.one)


def scalar(x):
    """Convert ``x`` to an exact Gaussian rational.

    Accepts ints, Fractions, Gaussian rationals, ``(re, im)`` pairs and
    Python complex numbers whose parts are exactly representable.
    """
    if isinstance(x, _GAUSS):
        return x
    if isinstance(x, tuple):
        re, im = x
        return QQ_I(_qq(re), _qq(im))
    if isinstance(x, complex):
        return QQ_I(_qq(Fraction(x.real)), _qq(Fraction(x.imag)))
    return QQ_I(_qq(x), QQ(0))


def _qq(x):
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, (int, Rational)) or hasattr(x, "numerator"):
        return QQ(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def to_complex(z) -> complex:
    return complex(float(z.x), float(z.y))


def conj_scalar(z):
    return QQ_I(z.x, -z.y)


def zeros(rows: int, cols: int | None = None) -> Mat:
    return DomainMatrix({}, (rows, rows if cols is None else cols), DOMAIN)


def eye(n: int) -> Mat:
    return DomainMatrix({i: {i: DOMAIN.one} for i in range(n)}, (n, n), DOMAIN)


def diag(values) -> Mat:
    values = [scalar(v) for v in values]
    n = len(values)
    return DomainMatrix({i: {i: v} for i, v in enumerate(values) if v}, (n, n), DOMAIN)


def from_rows(rows) -> Mat:
    rows = [[scalar(v) for v in row] for row in rows]
    shape = (len(rows), len(rows[0]) if rows else 0)
    dod = {}
    for i, row in enumerate(rows):
        entries = {j: v for j, v in enumerate(row) if v}
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, shape, DOMAIN)


def from_dict(entries: dict, shape) -> Mat:
    dod: dict = {}
    for (i, j), v in entries.items():
        v = scalar(v)
        if v:
            dod.setdefault(i, {})[j] = v
    return DomainMatrix(dod, tuple(shape), DOMAIN)


def entries(A: Mat):
    """Iterate over the nonzero ``(i, j, value)`` triples of ``A``."""
    for i, row in A.to_sparse().to_dod().items():
        for j, v in row.items():
            if v:
                yield i, j, v


def smul(c, A: Mat) -> Mat:
    c = scalar(c)
    if not c:
        return zeros(*A.shape)
    return A.mul(c)


def kron(A: Mat, B: Mat) -> Mat:
    (ra, ca), (rb, cb) = A.shape, B.shape
    dod: dict = {}
    b_entries = list(entries(B))
    for i, j, a in entries(A):
        for k, l, b in b_entries:
            dod.setdefault(i * rb + k, {})[j * cb + l] = a * b
    return DomainMatrix(dod, (ra * rb, ca * cb), DOMAIN)


def block_diag(*blocks: Mat) -> Mat:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    dod: dict = {}
    r0 = c0 = 0
    for b in blocks:
        for i, j, v in entries(b):
            dod.setdefault(r0 + i, {})[c0 + j] = v
        r0 += b.shape[0]
        c0 += b.shape[1]
    return DomainMatrix(dod, (rows, cols), DOMAIN)


def submatrix(A: Mat, rows, cols) -> Mat:
    rpos = {r: k for k, r in enumerate(rows)}
    cpos = {c: k for k, c in enumerate(cols)}
    dod: dict = {}
    for i, j, v in entries(A):
        if i in rpos and j in cpos:
            dod.setdefault(rpos[i], {})[cpos[j]] = v
    return DomainMatrix(dod, (len(rows), len(cols)), DOMAIN)


def is_zero(A: Mat) -> bool:
    return not any(True for _ in entries(A))


def comm(A: Mat, B: Mat) -> Mat:
    return A * B - B * A


def anticomm(A: Mat, B: Mat) -> Mat:
    return A * B + B * A


def adjoint(A: Mat) -> Mat:
    dod: dict = {}
    for i, j, v in entries(A):
        dod.setdefault(j, {})[i] = conj_scalar(v)
    return DomainMatrix(dod, (A.shape[1], A.shape[0]), DOMAIN)


def to_numpy(A: Mat) -> np.ndarray:
    out = np.zeros(A.shape, dtype=complex)
    for i, j, v in entries(A):
        out[i, j] = to_complex(v)
    return out


def max_abs(A: Mat) -> Fraction:
    """Largest |Re| or |Im| among the entries, as an exact Fraction."""
    best = Fraction(0)
    for _, _, v in entries(A):
        for part in (v.x, v.y):
            best = max(best, abs(Fraction(int(part.numerator), int(part.denominator))))
    return best


def _qq_str(q) -> str:
    return str(Fraction(int(q.numerator), int(q.denominator)))


def to_json(A: Mat) -> dict:
    """Sparse JSON form: shape plus ``[row, col, re, im]`` with rational strings."""
    return {
        "shape": list(A.shape),
        "entries": [[i, j, _qq_str(v.x), _qq_str(v.y)] for i, j, v in sorted(entries(A), key=lambda t: t[:2])],
    }


def from_json(obj: dict) -> Mat:
    return from_dict({(i, j): (Fraction(re), Fraction(im)) for i, j, re, im in obj["entries"]}, obj["shape"])
