"""Unitary representations of two-step nilpotent Lie algebras and Rockland sweeps.

Representations act on truncated Hermite spaces.  In a Darboux splitting
``tau B(q_k, p_l) = delta_kl alpha_k`` of the skew form at a central covector
``tau``, the generators act by

* ``pi(q_k) = -i x_k`` and ``pi(p_k) = alpha_k d/dx_k``,
* ``pi(z) = i tau(z)`` on the centre,
* ``pi(y) = i eta(y)`` on the kernel block ``I``.

The Hermite basis in ``x_k = sqrt(alpha_k) y_k`` makes ``-pi(p)^2 - pi(q)^2``
diagonal with entries ``alpha_k (2n + 1)``.  With ``N`` levels per
coordinate a word of length ``d`` is exact on basis vectors whose levels are
all ``<= N - 1 - d``; every reported number uses only those columns.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import exact
from .frame_geometry import FramePointData, orthonormalize
from .uea import UEAElement, WeightedAlgebra, cosymbol

DEFAULT_LAMBDAS = (1.0, -1.0, 2.0, -2.0, 0.5, -0.5)
DEFAULT_NS = (8, 16, 32)


class TruncationTooSmall(ValueError):
    pass


class DegenerateForm(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class TwoStepAlgebra:
    """``[x, y] = sum_mu B[x, y, mu] z_mu`` on orthonormal layers ``R^n1 + R^n2``."""

    n1: int
    n2: int
    B: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (self.n1, self.n1, self.n2):
            raise ValueError("bracket tensor has the wrong shape")
        if not np.allclose(B, -B.transpose(1, 0, 2), atol=0):
            raise ValueError("bracket tensor is not antisymmetric")
        rows = B.reshape(self.n1 * self.n1, self.n2)
        if np.linalg.matrix_rank(rows) < self.n2:
            raise ValueError("bracket map onto the second layer is not surjective")
        object.__setattr__(self, "B", B)
        if not self.names:
            names = tuple(f"x{i + 1}" for i in range(self.n1)) + tuple(f"z{m + 1}" for m in range(self.n2))
            object.__setattr__(self, "names", names)

    @classmethod
    def from_frame(cls, data: FramePointData, names=()) -> "TwoStepAlgebra":
        """Osculating algebra at the point: the ``[F, F]^T`` part of the brackets."""
        data = orthonormalize(data)
        n1, n2 = data.n1, data.n2
        B = np.zeros((n1, n1, n2))
        for i in range(n1):
            for j in range(n1):
                for mu in range(n2):
                    B[i, j, mu] = float(data.structure[i, j, n1 + mu])
        return cls(n1, n2, B, tuple(names))

    def skew_form(self, tau) -> np.ndarray:
        return np.tensordot(self.B, np.asarray(tau, dtype=float), axes=([2], [0]))

    def weighted_algebra(self) -> WeightedAlgebra:
        brackets = {}
        for i in range(self.n1):
            for j in range(i + 1, self.n1):
                vec = {self.n1 + mu: _frac(self.B[i, j, mu]) for mu in range(self.n2) if self.B[i, j, mu]}
                if vec:
                    brackets[(i, j)] = vec
        return WeightedAlgebra(self.names, (1,) * self.n1 + (2,) * self.n2, brackets)


def _frac(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**6)


@dataclass(frozen=True)
class Splitting:
    kernel: np.ndarray  # columns span I
    q: np.ndarray  # columns q_k
    p: np.ndarray  # columns p_k
    alpha: np.ndarray
    rank: int


def darboux_split(alg: TwoStepAlgebra, tau, tol: float = 1e-10) -> Splitting:
    """Orthonormal Darboux basis of ``tau B`` with ``alpha_1 >= alpha_2 >= ...``.

    Each ``q_k`` comes from an eigenspace of ``-A^2`` and ``p_k = A^T q_k / alpha_k``,
    so ``q_k^T A p_k = alpha_k``.
    """
    tau = np.asarray(tau, dtype=float)
    if not np.any(tau):
        raise ValueError("tau must be nonzero")
    A = alg.skew_form(tau)
    w, V = np.linalg.eigh(-A @ A)
    scale = max(1.0, float(np.max(np.abs(w))))
    keep = w > tol * scale
    qs, ps, alphas = [], [], []
    chosen = np.zeros((alg.n1, 0))
    for idx in np.argsort(-w):
        if not keep[idx]:
            continue
        v = V[:, idx] - chosen @ (chosen.T @ V[:, idx])
        if np.linalg.norm(v) < 1e-8:
            continue
        q = v / np.linalg.norm(v)
        a = float(np.sqrt(w[idx]))
        p = A.T @ q / a
        qs.append(q)
        ps.append(p)
        alphas.append(a)
        chosen = np.column_stack([chosen, q, p])
    kernel = V[:, ~keep]
    near = (w > 1e-3 * tol * scale) & (w < 1e3 * tol * scale)
    if np.any(near):
        warnings.warn(f"skew form is numerically near-degenerate; using rank {2 * len(alphas)}", DegenerateForm)
    return Splitting(
        kernel=kernel,
        q=np.column_stack(qs) if qs else np.zeros((alg.n1, 0)),
        p=np.column_stack(ps) if ps else np.zeros((alg.n1, 0)),
        alpha=np.array(alphas),
        rank=2 * len(alphas),
    )


def _ladder(N: int):
    a = sp.diags(np.sqrt(np.arange(1, N)), 1, format="csr")
    return a, a.T.tocsr()


@dataclass(frozen=True, eq=False)
class SchrodingerRep:
    alg: TwoStepAlgebra
    tau: np.ndarray
    eta: np.ndarray
    split: Splitting
    N: int
    generators: tuple = field(repr=False)

    @property
    def modes(self) -> int:
        return len(self.split.alpha)

    @property
    def dim(self) -> int:
        return self.N**self.modes

    def exact_columns(self, degree: int) -> np.ndarray:
        """Basis indices whose Hermite levels are all ``<= N - 1 - degree``."""
        top = self.N - 1 - degree
        if top < 0:
            return np.zeros(0, dtype=int)
        idx = []
        for levels in itertools.product(range(self.N), repeat=self.modes):
            if max(levels, default=0) <= top:
                idx.append(np.ravel_multi_index(levels, (self.N,) * self.modes) if self.modes else 0)
        return np.array(idx, dtype=int)


def schrodinger_rep(alg: TwoStepAlgebra, tau, N: int, eta=None) -> SchrodingerRep:
    if N < 4:
        raise TruncationTooSmall(f"N = {N} < 4")
    tau = np.asarray(tau, dtype=float)
    split = darboux_split(alg, tau)
    m = len(split.alpha)
    eta = np.zeros(split.kernel.shape[1]) if eta is None else np.asarray(eta, dtype=float)
    a, ad = _ladder(N)
    y = (a + ad) / np.sqrt(2)
    dy = (a - ad) / np.sqrt(2)
    eyeN = sp.identity(N, format="csr")
    dim = N**m

    def on_mode(k, op):
        factors = [eyeN] * m
        factors[k] = op
        out = sp.identity(1, format="csr")
        for f in factors:
            out = sp.kron(out, f, format="csr")
        return out

    Q = [on_mode(k, -1j * np.sqrt(alpha) * y) for k, alpha in enumerate(split.alpha)]
    P = [on_mode(k, np.sqrt(alpha) * dy) for k, alpha in enumerate(split.alpha)]
    ident = sp.identity(dim, format="csr", dtype=complex)
    gens = []
    for i in range(alg.n1):
        op = sp.csr_matrix((dim, dim), dtype=complex)
        for k in range(m):
            op = op + split.q[i, k] * Q[k] + split.p[i, k] * P[k]
        for r in range(split.kernel.shape[1]):
            op = op + 1j * split.kernel[i, r] * eta[r] * ident
        gens.append(op.tocsr())
    for mu in range(alg.n2):
        gens.append((1j * tau[mu] * ident).tocsr())
    return SchrodingerRep(alg, tau, eta, split, N, tuple(gens))


def finite_rep(alg: TwoStepAlgebra, xi) -> tuple:
    """One-dimensional representation: ``x -> i xi(x)`` on layer 1, centre -> 0."""
    xi = np.asarray(xi, dtype=float)
    gens = [sp.csr_matrix(np.array([[1j * xi[i]]])) for i in range(alg.n1)]
    gens += [sp.csr_matrix((1, 1), dtype=complex) for _ in range(alg.n2)]
    return tuple(gens)


def evaluate(x: UEAElement, generators) -> sp.csr_matrix:
    """``sum_mono pi(mono) (x) coefficient`` on ``rep space (x) fiber``."""
    dim = generators[0].shape[0]
    out = sp.csr_matrix((dim * x.dim, dim * x.dim), dtype=complex)
    ident = sp.identity(dim, format="csr", dtype=complex)
    for mono, coef in x.terms.items():
        op = ident
        for g in mono:
            op = op @ generators[g]
        out = out + sp.kron(op, sp.csr_matrix(exact.to_numpy(coef)), format="csr")
    return out.tocsr()


def word_degree(x: UEAElement) -> int:
    return max((len(m) for m in x.terms), default=0)


def fiber_columns(rep_cols: np.ndarray, fiber_dim: int) -> np.ndarray:
    return (rep_cols[:, None] * fiber_dim + np.arange(fiber_dim)[None, :]).ravel()


@dataclass
class SampleReport:
    label: str
    parameter: list
    min_singular: dict  # N -> value
    min_form: dict  # N -> value (Hermitian part compression)
    converged: bool


@dataclass
class RocklandReport:
    verdict: str
    samples: list
    tol: float
    note: str = "sampled representations only; a pass is evidence, not proof"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "tol": self.tol,
            "note": self.note,
            "samples": [
                {
                    "label": s.label,
                    "parameter": s.parameter,
                    "min_singular": {str(k): v for k, v in s.min_singular.items()},
                    "min_form": {str(k): v for k, v in s.min_form.items()},
                    "converged": s.converged,
                }
                for s in self.samples
            ],
        }


DENSE_LIMIT = 1500


def _bottom_eig(H: sp.csr_matrix, shift: float) -> float:
    """Smallest eigenvalue of a sparse Hermitian matrix known to lie above ``shift``."""
    return float(spla.eigsh(H.tocsc(), k=1, sigma=shift, which="LM", return_eigenvectors=False)[0])


def _min_singular(mat: sp.csr_matrix, cols: np.ndarray) -> float:
    block = mat[:, cols]
    if len(cols) <= DENSE_LIMIT:
        return float(np.linalg.svd(block.toarray(), compute_uv=False)[-1])
    gram = (block.conj().T @ block).tocsr()
    return float(np.sqrt(max(_bottom_eig(gram, -1e-3), 0.0)))


def _min_form(mat: sp.csr_matrix, cols: np.ndarray) -> float:
    block = mat[cols][:, cols]
    herm = (block + block.conj().T) / 2
    if len(cols) <= DENSE_LIMIT:
        return float(sla.eigvalsh(herm.toarray())[0])
    # Gershgorin gives a shift strictly below the spectrum
    H = herm.tocsr()
    radius = np.asarray(abs(H).sum(axis=1)).ravel() - np.abs(H.diagonal())
    lower = float(np.min(H.diagonal().real - radius))
    return _bottom_eig(H, lower - 1.0)


def central_samples(n2: int, lambdas=DEFAULT_LAMBDAS) -> list:
    dirs = [np.eye(n2)[k] for k in range(n2)]
    if n2 > 1:
        dirs.append(np.ones(n2) / np.sqrt(n2))
    return [lam * d for d in dirs for lam in lambdas]


def xi_samples(n1: int) -> list:
    return [s * np.eye(n1)[k] for k in range(n1) for s in (1.0, -1.0)]


def rockland_check(x: UEAElement, alg: TwoStepAlgebra, *, taus=None, xis=None, Ns=DEFAULT_NS,
                   tol: float = 1e-8, conv_tol: float = 1e-6) -> RocklandReport:
    """Injectivity sweep over Schrodinger and one-dimensional representations.

    Verdict ``"fail (witness)"`` if some sample has a minimal singular value
    below ``tol`` at the largest ``N``; ``"inconclusive"`` if a sample did not
    converge across ``Ns``; otherwise ``"pass (sampled)"``.
    """
    taus = central_samples(alg.n2) if taus is None else taus
    xis = xi_samples(alg.n1) if xis is None else xis
    deg = word_degree(x)
    samples = []
    for tau in taus:
        sv, form = {}, {}
        for N in Ns:
            rep = schrodinger_rep(alg, tau, N)
            cols = fiber_columns(rep.exact_columns(deg), x.dim)
            mat = evaluate(x, rep.generators)
            sv[N] = _min_singular(mat, cols)
            form[N] = _min_form(mat, cols)
        vals = [sv[N] for N in Ns]
        converged = len(vals) < 2 or abs(vals[-1] - vals[-2]) <= conv_tol * max(1.0, abs(vals[-1]))
        samples.append(SampleReport("schrodinger", [float(t) for t in tau], sv, form, converged))
    for xi in xis:
        mat = evaluate(x, finite_rep(alg, xi))
        cols = np.arange(mat.shape[0])
        s = _min_singular(mat, cols)
        samples.append(SampleReport("character", [float(t) for t in xi], {0: s}, {0: _min_form(mat, cols)}, True))
    if any(min(s.min_singular.values()) < tol for s in samples):
        verdict = "fail (witness)"
    elif not all(s.converged for s in samples):
        verdict = "inconclusive"
    else:
        verdict = "pass (sampled)"
    return RocklandReport(verdict, samples, tol)


def oscillator_spectrum(alpha: float, N: int) -> np.ndarray:
    """Eigenvalues of ``-pi(p)^2 - pi(q)^2`` compressed to Hermite levels ``0..N-1``.

    The representation is built with two spare levels, so the compression is exact.
    """
    alg = TwoStepAlgebra(2, 1, np.array([[[0.0], [1.0]], [[-1.0], [0.0]]]))
    rep = schrodinger_rep(alg, [alpha], N + 2)
    q, p = rep.generators[0], rep.generators[1]
    op = (-(p @ p) - (q @ q)).toarray()
    cols = rep.exact_columns(2)
    return np.sort(np.linalg.eigvalsh(op[np.ix_(cols, cols)]))


def per_mode_bound(alpha: float, N: int = 32, sign: int = 1) -> float:
    """``eigmin(-alpha^2 d^2 + x^2 + sign (3i/4) alpha J)`` with ``J^2 = -1``."""
    n = np.arange(N - 2)
    osc = np.diag(alpha * (2 * n + 1.0))
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    op = np.kron(osc, np.eye(2)) + sign * 0.75j * alpha * np.kron(np.eye(N - 2), J)
    return float(np.linalg.eigvalsh(op)[0])


# ---------------------------------------------------------------------------
# model operator and cosymbols of the frame-geometry operators


def frame_uea_algebra(data: FramePointData, names=()) -> WeightedAlgebra:
    """Osculating graded algebra: F weight 1, T weight 2, only ``[F, F]^T`` brackets."""
    data = orthonormalize(data)
    n1, n = data.n1, data.n
    names = tuple(names) or tuple(f"e{a}" for a in range(n))
    brackets = {}
    for i in range(n1):
        for j in range(i + 1, n1):
            vec = {k: data.structure[i, j, k] for k in data.T if data.structure[i, j, k]}
            if vec:
                brackets[(i, j)] = vec
    return WeightedAlgebra(names, (1,) * n1 + (2,) * data.n2, brackets)


def model_operator(data: FramePointData, algebra: WeightedAlgebra | None = None) -> UEAElement:
    """``c(phi^i) E_i + eps(psi^mu) F_mu + 1/4 sum_mu iota_mu c(iota_{f_mu} Omega)``.

    Built straight from the brackets ``[e_j, e_i]^T``, independent of the
    Laurent and closed-form routes.
    """
    from .frame_geometry import FiberOps

    data = orthonormalize(data)
    algebra = algebra or frame_uea_algebra(data)
    ops = FiberOps(data)
    n1 = data.n1
    terms = {}
    for i in data.F:
        terms[(i,)] = ops.c(i)
    for mu in range(data.n2):
        terms[(n1 + mu,)] = ops.eps(mu)
    acc = exact.zeros(ops.dim)
    for mu in range(data.n2):
        for i in data.F:
            for j in data.F:
                w = data.structure[j, i, n1 + mu]  # g_T(f_mu, [e_j, e_i]^T)
                if w:
                    acc = acc + exact.smul(w / 8, ops.iota(mu) * ops.c(i) * ops.c(j))
    terms[()] = acc
    return UEAElement(algebra, ops.dim, terms, data.fiber_degrees())


def operator_to_uea(op, data: FramePointData, algebra: WeightedAlgebra | None = None) -> UEAElement:
    data = orthonormalize(data)
    algebra = algebra or frame_uea_algebra(data)
    return op.to_uea(algebra, data.fiber_degrees())


def graded_cosymbol(op, data: FramePointData, algebra: WeightedAlgebra | None = None) -> UEAElement:
    """Graded order-1 cosymbol of a first-order frame operator."""
    return cosymbol(operator_to_uea(op, data, algebra), 1, graded=True)


def laplace_cosymbol(op, data: FramePointData, algebra: WeightedAlgebra | None = None) -> UEAElement:
    """Order-2 Heisenberg cosymbol of the square of a first-order frame operator."""
    x = operator_to_uea(op, data, algebra)
    return cosymbol(x * x, 2, graded=False)


def restrict_fiber(x: UEAElement, indices) -> UEAElement:
    """Compress every coefficient to the given fiber basis vectors."""
    idx = list(indices)
    terms = {m: exact.submatrix(c, idx, idx) for m, c in x.terms.items()}
    degrees = None if x.degrees is None else tuple(x.degrees[i] for i in idx)
    return UEAElement(x.algebra, len(idx), terms, degrees)


def character_matrix(op, data: FramePointData, eta) -> np.ndarray:
    """Image of the model operator in the character ``E_i -> i eta_i``, ``F_mu -> 0``."""
    x = model_operator(data) if op is None else op
    alg = TwoStepAlgebra.from_frame(data)
    return evaluate(x, finite_rep(alg, eta)).toarray()
