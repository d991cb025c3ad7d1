"""Clifford algebras, exterior modules and Z2-graded tensor products.

Conventions
-----------
* Negative definite: ``c(v) c(w) + c(w) c(v) = -2 <v, w>``.
* Exterior basis: the basis vector with index ``k`` is the wedge of the
  generators whose bit is set in ``k``; generator ``a`` of a rank ``n``
  module sits at bit ``n - 1 - a``.  With this ordering
  ``kron(exterior(n1), exterior(n2))`` is literally ``exterior(n1 + n2)``
  once the second factor's operators carry the Koszul sign.
* Graded operators are pairs ``(matrix, parity)``; the graded tensor
  product follows the Koszul rule ``(1 x b)(m x w) = (-1)^{|b||m|} m x bw``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from . import exact
from .exact import Mat


class InvalidRank(ValueError):
    pass


_PAULI_X = exact.from_rows([[0, 1], [1, 0]])
_PAULI_Y = exact.from_rows([[0, -1j], [1j, 0]])
_PAULI_Z = exact.from_rows([[1, 0], [0, -1]])
_I2 = exact.eye(2)


def _kron_all(factors) -> Mat:
    out = exact.eye(1)
    for f in factors:
        out = exact.kron(out, f)
    return out


@dataclass(frozen=True)
class CliffordData:
    rank: int
    generators: tuple
    grading: Mat

    @property
    def dim(self) -> int:
        return self.grading.shape[0]

    def parities(self) -> list[int]:
        """0 for even basis vectors, 1 for odd ones."""
        g = self.grading
        return [0 if g[i, i].element.x > 0 else 1 for i in range(self.dim)]

    def action(self, covector) -> Mat:
        """Clifford action of ``sum_a covector[a] * phi^a``."""
        out = exact.zeros(self.dim)
        for coef, gen in zip(covector, self.generators):
            out = out + exact.smul(coef, gen)
        return out


def _check_rank(n):
    if not isinstance(n, int) or n < 1:
        raise InvalidRank(f"rank must be a positive integer, got {n!r}")


def build_clifford(n: int) -> CliffordData:
    """Jordan-Wigner realization on ``(C^2)^{ceil(n/2)}`` graded by ``Z^{x m}``."""
    _check_rank(n)
    m = ceil(n / 2)
    gens = []
    for a in range(n):
        k, which = divmod(a, 2)
        pauli = _PAULI_X if which == 0 else _PAULI_Y
        factors = [_PAULI_Z] * k + [pauli] + [_I2] * (m - k - 1)
        gens.append(exact.smul(1j, _kron_all(factors)))
    return CliffordData(n, tuple(gens), _kron_all([_PAULI_Z] * m))


@dataclass(frozen=True)
class ExteriorModule:
    rank: int
    wedge: tuple
    contract: tuple
    degree: Mat
    parity: Mat

    @property
    def dim(self) -> int:
        return 2 ** self.rank

    def clifford_u(self, a: int, u) -> Mat:
        """``c_u(psi_a) = eps_a - u iota_a``; squares to ``-u``."""
        return self.wedge[a] - exact.smul(u, self.contract[a])

    def degrees(self) -> list[int]:
        return [bin(k).count("1") for k in range(self.dim)]


def _bit(n, a):
    return 1 << (n - 1 - a)


def build_exterior(n: int) -> ExteriorModule:
    _check_rank(n)
    dim = 2**n
    wedge, contract = [], []
    for a in range(n):
        bit = _bit(n, a)
        higher = ~((bit << 1) - 1) & (dim - 1)  # bits of generators b < a
        eps, iota = {}, {}
        for k in range(dim):
            sign = -1 if bin(k & higher).count("1") % 2 else 1
            if k & bit:
                iota[(k ^ bit, k)] = sign
            else:
                eps[(k | bit, k)] = sign
        wedge.append(exact.from_dict(eps, (dim, dim)))
        contract.append(exact.from_dict(iota, (dim, dim)))
    degs = [bin(k).count("1") for k in range(dim)]
    return ExteriorModule(
        n,
        tuple(wedge),
        tuple(contract),
        exact.diag(degs),
        exact.diag([(-1) ** d for d in degs]),
    )


@dataclass(frozen=True)
class BimoduleData:
    rank: int
    left: tuple
    right: tuple
    exterior: ExteriorModule


def build_bimodule(n: int) -> BimoduleData:
    """Left ``eps - iota`` and right ``kappa (eps + iota)`` actions on the exterior algebra.

    The right action is minus right Clifford multiplication, so it squares to
    ``-1`` and commutes with every left action.
    """
    ext = build_exterior(n)
    left = tuple(e - i for e, i in zip(ext.wedge, ext.contract))
    right = tuple(ext.parity * (e + i) for e, i in zip(ext.wedge, ext.contract))
    return BimoduleData(n, left, right, ext)


@dataclass(frozen=True)
class Graded:
    """A matrix together with a grading involution on its space."""

    matrix: Mat
    grading: Mat

    def parity(self) -> int | None:
        """0 if even, 1 if odd, None if of mixed parity."""
        m, g = self.matrix, self.grading
        if exact.is_zero(g * m - m * g):
            return 0
        if exact.is_zero(g * m + m * g):
            return 1
        return None


def graded_tensor(A: Graded, B: Graded) -> tuple[Graded, Graded]:
    """Embed ``A`` and ``B`` into the graded tensor product of their spaces.

    Returns ``(A x 1, 1 x B)``; the second carries the Koszul sign
    ``grading_A ** |B|``.
    """
    na, nb = A.matrix.shape[0], B.matrix.shape[0]
    if A.grading.shape[0] != na or B.grading.shape[0] != nb:
        raise ValueError("dimension mismatch between operator and grading")
    pb = B.parity()
    if pb is None:
        raise ValueError("second factor must be homogeneous")
    grading = exact.kron(A.grading, B.grading)
    left = exact.kron(A.matrix, exact.eye(nb))
    right = exact.kron(A.grading if pb else exact.eye(na), B.matrix)
    return Graded(left, grading), Graded(right, grading)


def lift_left(op: Mat, dim_right: int) -> Mat:
    """``op x 1`` on a tensor product with a right factor of size ``dim_right``."""
    return exact.kron(op, exact.eye(dim_right))


def lift_right(op: Mat, left_grading: Mat, odd: bool) -> Mat:
    """``1 x op`` with the Koszul sign when ``op`` is odd."""
    n = left_grading.shape[0]
    return exact.kron(left_grading if odd else exact.eye(n), op)
