"""Peter-Weyl blocks of S^3 and the spectra of the contact operators on them.

Level ``m`` is the matrix space ``End(V_m)`` of dimension ``(m+1)^2`` where
``V_m`` holds the degree-``m`` polynomials in ``z1, z2`` (basis
``z1^(m-j) z2^j``).  With ``E = z1 d/dz2``, ``F = z2 d/dz1`` and
``H = z1 d/dz1 - z2 d/dz2`` the frame acts by right multiplication with

    A_X = i(E + F),  A_Y = E - F,  A_T = iH,

so that ``[X, Y] = 2T``, ``[Y, T] = 2X``, ``[T, X] = 2Y`` and
``-X^2 - Y^2 - T^2 = m(m + 2)`` on the block.  ``convention="unitary"``
conjugates by ``diag(sqrt(binomial(m, j)))`` (skew-Hermitian fields).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt

import numpy as np

from . import exact
from .exact import Mat

CDV = np.array([[0.0, -1.0], [1.0, 0.0]])
EVEN_COEFF = Fraction(5, 2)
ODD_COEFFS = {"dtheta": Fraction(3, 2), "literal": Fraction(-3, 4)}


def _spin_matrices(m: int):
    """Exact ``E, F, H`` on ``V_m`` (columns are images of basis vectors)."""
    E, F, H = {}, {}, {}
    for j in range(m + 1):
        # z1^(m-j) z2^j
        if m - j > 0:  # z2 d/dz1: raises j
            F[(j + 1, j)] = m - j
        if j > 0:  # z1 d/dz2: lowers j
            E[(j - 1, j)] = j
        H[(j, j)] = m - 2 * j
    shape = (m + 1, m + 1)
    return exact.from_dict(E, shape), exact.from_dict(F, shape), exact.from_dict(H, shape)


def _transpose(A: Mat) -> Mat:
    return exact.from_dict({(j, i): v for i, j, v in exact.entries(A)}, (A.shape[1], A.shape[0]))


def _right_mult(A: Mat) -> Mat:
    """``M -> M A`` on row-major vectorized ``(m+1) x (m+1)`` matrices."""
    return exact.kron(exact.eye(A.shape[0]), _transpose(A))


@dataclass(frozen=True, eq=False)
class FourierBlock:
    m: int
    X: Mat
    Y: Mat
    T: Mat

    @property
    def dim(self) -> int:
        return (self.m + 1) ** 2

    def fields(self) -> tuple:
        return self.X, self.Y, self.T

    def numeric(self, convention: str = "exact") -> tuple:
        """Field matrices as complex arrays; ``"unitary"`` conjugates to skew-Hermitian form."""
        mats = [exact.to_numpy(F) for F in self.fields()]
        if convention == "exact":
            return tuple(mats)
        if convention != "unitary":
            raise ValueError("convention must be 'exact' or 'unitary'")
        s = np.sqrt([comb(self.m, j) for j in range(self.m + 1)])
        # conjugate V_m by S = diag(s); right multiplication by A becomes right mult by S^-1 A S
        S = np.kron(np.diag(s), np.diag(s))
        Sinv = np.kron(np.diag(1 / s), np.diag(1 / s))
        return tuple(S @ F @ Sinv for F in mats)


def block_fields(m: int) -> FourierBlock:
    if m < 0:
        raise ValueError("level must be nonnegative")
    E, F, H = _spin_matrices(m)
    AX = exact.smul(1j, E + F)
    AY = E - F
    AT = exact.smul(1j, H)
    return FourierBlock(m, _right_mult(AX), _right_mult(AY), _right_mult(AT))


def casimir(block: FourierBlock) -> Mat:
    X, Y, T = block.fields()
    return -(X * X) - Y * Y - T * T


def even_operator(m: int, convention: str = "exact") -> np.ndarray:
    """``Delta_{S^3} + T^2 + 5/2 c T = -X^2 - Y^2 + 5/2 c T`` on ``block (x) C^2``."""
    return _contact_operator(m, float(EVEN_COEFF), convention)


def odd_operator(m: int, variant: str = "dtheta", convention: str = "exact") -> np.ndarray:
    """``-X^2 - Y^2 + a c T`` with ``a = 3/2`` (``"dtheta"``) or ``a = -3/4`` (``"literal"``)."""
    return _contact_operator(m, float(ODD_COEFFS[variant]), convention)


def _contact_operator(m: int, coeff: float, convention: str) -> np.ndarray:
    X, Y, T = block_fields(m).numeric(convention)
    I2 = np.eye(2)
    return np.kron(-(X @ X) - Y @ Y, I2) + coeff * np.kron(T, CDV)


def formula_spectrum(m: int, shift: Fraction) -> list:
    """``m(m+2) - k^2 +- shift k`` for ``k = -m, -m+2, ..., m``, each with multiplicity ``m + 1``."""
    out = []
    for k in range(-m, m + 1, 2):
        for s in (1, -1):
            out += [Fraction(m * (m + 2) - k * k) + s * shift * k] * (m + 1)
    return sorted(out)


@dataclass
class SpectrumMatch:
    m: int
    computed: np.ndarray
    expected: list
    max_error: float
    matches: bool

    def rows(self):
        """``(m, eigenvalue, multiplicity, formula-match)`` rows for CSV output."""
        vals, counts = np.unique(np.round(self.computed.real, 9), return_counts=True)
        exp = {float(v) for v in self.expected}
        return [(self.m, float(v), int(c), any(abs(v - e) < 1e-9 for e in exp)) for v, c in zip(vals, counts)]


def match_spectrum(op: np.ndarray, m: int, shift: Fraction, tol: float = 1e-9) -> SpectrumMatch:
    """Bijective sorted matching of computed eigenvalues against the formula multiset."""
    ev = np.linalg.eigvals(op)
    imag = float(np.max(np.abs(ev.imag))) if ev.size else 0.0
    computed = np.sort(ev.real)
    expected = formula_spectrum(m, shift)
    err = float(np.max(np.abs(computed - np.array([float(v) for v in expected])))) if ev.size else 0.0
    err = max(err, imag)
    return SpectrumMatch(m, computed, expected, err, err <= tol)


def quadratic_solutions(bound: int = 100) -> set:
    """Integer ``(m, k)`` with ``m(m+2) - k^2 + 5/2 k = 0``, i.e. ``2m^2 + 4m - 2k^2 + 5k = 0``.

    Exhaustive over ``|m|, |k| <= bound``.  Outside the box there is nothing:
    ``k = (5 +- sqrt(25 + 16 m (m + 2))) / 4`` needs ``25 + 16 m(m+2)`` to be a
    square ``s^2``, and ``s^2 - (4m + 4)^2 = 9`` forces ``|4m + 4| <= 4``.
    """
    box = {(m, k) for m in range(-bound, bound + 1) for k in range(-bound, bound + 1)
           if 2 * m * m + 4 * m - 2 * k * k + 5 * k == 0}
    analytic = set()
    for m in range(-2, 1):  # |4m + 4| <= 4
        disc = 25 + 16 * m * (m + 2)
        s = isqrt(disc)
        if s * s == disc:
            for num in (5 + s, 5 - s):
                if num % 4 == 0:
                    analytic.add((m, num // 4))
    if not analytic <= box:
        raise AssertionError("analytic solutions missing from the search box")
    return box


# ---------------------------------------------------------------------------
# kernel of the contact operator built from frame data


def frame_operator_on_block(op, block: FourierBlock, convention: str = "exact") -> np.ndarray:
    """Realize a constant-coefficient frame operator on ``block (x) fiber``."""
    fields = block.numeric(convention)
    out = np.kron(np.eye(block.dim), exact.to_numpy(op.zeroth))
    for F, M in zip(fields, op.derivative):
        out = out + np.kron(F, exact.to_numpy(M))
    return out


def _hopf_data():
    from .models import su2_forms_model

    return su2_forms_model().data


def _nullity(A: np.ndarray, tol: float = 1e-9) -> int:
    if A.shape[1] == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    return A.shape[1] - int(np.sum(s > tol * scale))


def block_kernel(m: int, data=None, convention: str = "exact", tol: float = 1e-9) -> tuple:
    """Graded kernel dimensions of the asymptotic operator on level ``m``."""
    from .frame_geometry import global_formula

    data = data or _hopf_data()
    op = global_formula(data).total
    D = frame_operator_on_block(op, block_fields(m), convention)
    par = np.real(np.diag(exact.to_numpy(data.fiber_grading())))
    par = np.tile(par, block_fields(m).dim)
    even, odd = np.where(par > 0)[0], np.where(par < 0)[0]
    return _nullity(D[:, even], tol), _nullity(D[:, odd], tol)


def full_kernel(M_max: int, convention: str = "exact") -> tuple:
    if M_max < 0:
        raise ValueError("M_max must be nonnegative")
    data = _hopf_data()
    ev = od = 0
    for m in range(M_max + 1):
        e, o = block_kernel(m, data, convention)
        ev += e
        od += o
    return ev, od


def per_block_kernels(M_max: int) -> list:
    data = _hopf_data()
    return [block_kernel(m, data) for m in range(M_max + 1)]


def exact_bracket_check(m: int) -> bool:
    b = block_fields(m)
    X, Y, T = b.fields()
    two = lambda A: exact.smul(2, A)  # noqa: E731
    return (
        exact.comm(X, Y) == two(T)
        and exact.comm(Y, T) == two(X)
        and exact.comm(T, X) == two(Y)
        and casimir(b) == exact.smul(m * (m + 2), exact.eye(b.dim))
    )


def t_eigenvalues(m: int) -> list:
    """``T`` is diagonal in the polynomial basis; its entries are ``i k``."""
    T = block_fields(m).T
    return sorted(exact.to_complex(T[i, i].element).imag for i in range(T.shape[0]))


__all__ = [
    "FourierBlock",
    "block_fields",
    "block_kernel",
    "casimir",
    "even_operator",
    "exact_bracket_check",
    "formula_spectrum",
    "full_kernel",
    "match_spectrum",
    "odd_operator",
    "quadratic_solutions",
    "t_eigenvalues",
]

