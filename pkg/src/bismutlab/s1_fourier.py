"""Kernel of the asymptotic operator on a principal circle bundle, mode by mode.

A section ``eta + theta ^ tau`` in Fourier mode ``m`` is killed iff

    D eta + 1/4 cOmega kappa tau = 0,    i m kappa eta + D tau = 0,

which on the even summand (``eta`` even, ``tau`` odd) reads
``D eta - 1/4 cOmega tau = 0`` and ``D tau + i m eta = 0``.  Eliminating
``eta`` gives ``cOmega tau = (4i/m) D^2 tau`` for ``m != 0`` on both summands;
for ``m = 0`` the kernel is ``Ker D`` in the ``eta`` slot plus those
``tau in Ker D`` with ``cOmega tau`` orthogonal to ``Ker D^*``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

SCHEMA = "bismutlab.s1/1"
PERP_TOL = 1e-10


class MissingMetric(ValueError):
    """Mode zero needs an inner product to decide orthogonality."""


class InvalidModeProblem(ValueError):
    pass


@dataclass(eq=False)
class ModeProblem:
    m: int
    D: np.ndarray
    c_omega: np.ndarray
    grading: np.ndarray  # diagonal entries +-1
    inner: np.ndarray | None = field(default=None)  # Gram matrix; None means undeclared
    label: str = ""

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=complex)
        self.c_omega = np.asarray(self.c_omega, dtype=complex)
        self.grading = np.asarray(self.grading, dtype=float).ravel()
        n = self.grading.size
        if self.D.shape != (n, n) or self.c_omega.shape != (n, n):
            raise InvalidModeProblem("dimensions are inconsistent")
        if not np.all(np.abs(np.abs(self.grading) - 1) == 0):
            raise InvalidModeProblem("grading entries must be +-1")
        same = np.equal.outer(self.grading, self.grading)
        scale = max(1.0, np.abs(self.D).max(initial=0.0))
        if np.abs(self.D[same]).max(initial=0.0) > 1e-12 * scale:
            raise InvalidModeProblem("D must be odd")
        if np.abs(self.c_omega[~same]).max(initial=0.0) > 1e-12 * max(1.0, np.abs(self.c_omega).max(initial=0.0)):
            raise InvalidModeProblem("cOmega must be even")
        if self.inner is not None:
            self.inner = np.asarray(self.inner, dtype=complex)
            if self.inner.shape != (n, n) or np.abs(self.inner[~same]).max(initial=0.0) > 1e-12:
                raise InvalidModeProblem("inner product must be block diagonal for the grading")

    @property
    def dim(self) -> int:
        return self.grading.size

    def parity_indices(self, sign: int) -> np.ndarray:
        return np.where(self.grading == sign)[0]

    def gram(self) -> np.ndarray:
        if self.inner is None:
            raise MissingMetric("mode 0 requires a declared inner product")
        return self.inner

    def adjoint_D(self) -> np.ndarray:
        G = self.gram()
        return np.linalg.solve(G, self.D.conj().T @ G)


def _null_space(A: np.ndarray, tol: float = PERP_TOL) -> np.ndarray:
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=complex)
    return sla.null_space(A, rcond=tol)


def _nullity(A: np.ndarray, tol: float = PERP_TOL) -> int:
    return _null_space(A, tol).shape[1]


def _summand_dim(p: ModeProblem, eta_sign: int) -> int:
    eta = p.parity_indices(eta_sign)
    tau = p.parity_indices(-eta_sign)
    if p.m != 0:
        M = p.c_omega - (4j / p.m) * (p.D @ p.D)
        return _nullity(M[np.ix_(tau, tau)])
    G = p.gram()
    n_eta = _nullity(p.D[:, eta])
    K_tau = _null_space(p.D[:, tau])  # coordinates in the tau block
    K_adj = _null_space(p.adjoint_D()[:, tau])
    if K_tau.shape[1] == 0:
        return n_eta
    if K_adj.shape[1] == 0:
        return n_eta + K_tau.shape[1]
    Gt = G[np.ix_(tau, tau)]
    pairing = K_adj.conj().T @ Gt @ p.c_omega[np.ix_(tau, tau)] @ K_tau
    scale = max(1.0, np.linalg.norm(p.c_omega, 2))
    s = np.linalg.svd(pairing, compute_uv=False)
    return n_eta + K_tau.shape[1] - int(np.sum(s > PERP_TOL * scale))


def mode_kernel(p: ModeProblem) -> tuple:
    """``(even summand, odd summand)`` dims via the eliminated conditions."""
    return _summand_dim(p, 1), _summand_dim(p, -1)


def block_system(p: ModeProblem) -> np.ndarray:
    """The assembled operator on ``(eta, tau)``."""
    K = np.diag(p.grading).astype(complex)
    return np.block([[p.D, 0.25 * p.c_omega @ K], [1j * p.m * K, p.D]])


def direct_block_kernel(p: ModeProblem) -> tuple:
    """Brute-force null space of :func:`block_system` split by total parity."""
    S = block_system(p)
    n = p.dim
    out = []
    for eta_sign in (1, -1):
        cols = np.concatenate([p.parity_indices(eta_sign), n + p.parity_indices(-eta_sign)])
        out.append(_nullity(S[:, cols]))
    return tuple(out)


@dataclass
class TotalReport:
    per_mode: list
    totals: tuple
    oracle_totals: tuple
    mode_range: tuple | None

    @property
    def agree(self) -> bool:
        return all(r["mode_kernel"] == r["direct"] for r in self.per_mode)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "per_mode": self.per_mode,
            "totals": list(self.totals),
            "oracle_totals": list(self.oracle_totals),
            "agree": self.agree,
            "mode_range": list(self.mode_range) if self.mode_range else None,
            "warning": "finite mode range: totals are a truncation",
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def assemble_total(problems) -> TotalReport:
    per_mode, tot, otot = [], [0, 0], [0, 0]
    for p in problems:
        a, b = mode_kernel(p), direct_block_kernel(p)
        per_mode.append({"label": p.label, "m": p.m, "dim": p.dim, "mode_kernel": list(a), "direct": list(b)})
        tot = [tot[0] + a[0], tot[1] + a[1]]
        otot = [otot[0] + b[0], otot[1] + b[1]]
    ms = [p["m"] for p in per_mode]
    rng = (min(ms), max(ms)) if ms else None
    return TotalReport(per_mode, tuple(tot), tuple(otot), rng)


# ---------------------------------------------------------------------------
# random instances


def random_problem(seed: int, dim: int | None = None, m: int | None = None, degenerate: bool | None = None) -> ModeProblem:
    """Random graded instance; ``degenerate`` plants kernels so both routes see nonzero dims."""
    rng = np.random.default_rng(seed)
    dim = dim or int(rng.integers(2, 13))
    m = int(rng.integers(-5, 6)) if m is None else m
    degenerate = bool(rng.integers(0, 2)) if degenerate is None else degenerate
    n_even = int(rng.integers(1, dim)) if dim > 1 else 1
    grading = np.array([1.0] * n_even + [-1.0] * (dim - n_even))
    ev, od = np.arange(n_even), np.arange(n_even, dim)

    def cplx(r, c):
        return rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))

    B = cplx(len(od), len(ev))
    if degenerate and min(len(ev), len(od)) > 1:
        k = int(rng.integers(1, min(len(ev), len(od))))
        B = cplx(len(od), k) @ cplx(k, len(ev))  # low rank: planted kernel
    D = np.zeros((dim, dim), dtype=complex)
    D[np.ix_(od, ev)] = B
    D[np.ix_(ev, od)] = B.conj().T
    C = np.zeros((dim, dim), dtype=complex)
    C[np.ix_(ev, ev)] = cplx(len(ev), len(ev))
    C[np.ix_(od, od)] = cplx(len(od), len(od))
    if degenerate:
        if m != 0:
            # shift so cOmega - (4i/m) D^2 drops rank on each parity block
            target = (4j / m) * (D @ D)
            for idx in (ev, od):
                r = max(len(idx) - 1, 0)
                low = cplx(len(idx), r) @ cplx(r, len(idx)) if r else np.zeros((len(idx), len(idx)))
                C[np.ix_(idx, idx)] = target[np.ix_(idx, idx)] + low
        elif rng.integers(0, 2):
            C[:] = 0
    return ModeProblem(m, D, C, grading, np.eye(dim), label=f"random-{seed}")


# ---------------------------------------------------------------------------
# instances from the Hopf fibration


def _fiber_pieces(data):
    """Split the assembled frame operator into the pieces of the mode system.

    The full fiber is ``E (x) Lambda[theta]`` with index ``2 e + l``.
    Returns per-direction and zeroth-order blocks ``(eta<-eta, eta<-tau, tau<-eta)``.
    """
    from . import exact
    from .frame_geometry import global_formula

    op = global_formula(data).total
    dE = data.dim_E
    eta_idx = np.arange(dE) * 2
    tau_idx = eta_idx + 1

    def split(M):
        A = exact.to_numpy(M)
        return A[np.ix_(eta_idx, eta_idx)], A[np.ix_(eta_idx, tau_idx)], A[np.ix_(tau_idx, eta_idx)], A[np.ix_(tau_idx, tau_idx)]

    return [split(M) for M in op.derivative], split(op.zeroth)


def hopf_mode_problems(max_level: int, modes: range | None = None) -> list:
    """One :class:`ModeProblem` per (Peter-Weyl level, Fourier mode) of the Hopf forms model."""
    from . import exact
    from .hopf_spectral import _hopf_data, block_fields

    data = _hopf_data()
    if data.n2 != 1:
        raise InvalidModeProblem("circle bundles only")
    deriv, zeroth = _fiber_pieces(data)
    kappa = np.real(np.diag(exact.to_numpy(data.grading)))
    T_dir = data.n1
    out = []
    for level in range(max_level + 1):
        X, Y, T = block_fields(level).numeric("unitary")
        fields = (X, Y, T)
        Id = np.eye(block_fields(level).dim)
        D = np.kron(Id, zeroth[0]) + sum(np.kron(F, d[0]) for a, (F, d) in enumerate(zip(fields, deriv)) if a != T_dir)
        C = 4 * (np.kron(Id, zeroth[1]) + sum(np.kron(F, d[1]) for F, d in zip(fields, deriv))) @ np.kron(Id, np.diag(kappa))
        # tau <- eta block is kappa nabla_T
        nabla_T = np.kron(Id, np.diag(kappa)) @ (np.kron(Id, zeroth[2]) + sum(np.kron(F, d[2]) for F, d in zip(fields, deriv)))
        grading = np.tile(kappa, Id.shape[0])
        # restrict to the weights of nabla_T, parity by parity
        pieces = {}
        for sign in (1, -1):
            idx = np.where(grading == sign)[0]
            H = -1j * nabla_T[np.ix_(idx, idx)]
            if np.abs(H - H.conj().T).max(initial=0.0) > 1e-9:
                raise InvalidModeProblem("nabla_T is not skew-Hermitian")
            w, V = np.linalg.eigh((H + H.conj().T) / 2)
            full = np.zeros((grading.size, idx.size), dtype=complex)
            full[idx] = V
            for k in np.unique(np.round(w).astype(int)):
                sel = np.abs(w - k) < 1e-8
                if np.any(np.abs(w[np.abs(w - k) < 0.5] - k) > 1e-8):
                    raise InvalidModeProblem("non-integral weight")
                pieces.setdefault(int(k), []).append((sign, full[:, sel]))
        for k in sorted(pieces):
            if modes is not None and k not in modes:
                continue
            Q = np.hstack([q for _, q in pieces[k]])
            g = np.concatenate([[s] * q.shape[1] for s, q in pieces[k]])
            Dm, Cm = Q.conj().T @ D @ Q, Q.conj().T @ C @ Q
            if np.abs(D @ Q - Q @ Dm).max(initial=0.0) > 1e-9 or np.abs(C @ Q - Q @ Cm).max(initial=0.0) > 1e-9:
                raise InvalidModeProblem("operator does not preserve the weight space")
            out.append(ModeProblem(k, Dm, Cm, g, np.eye(g.size), label=f"hopf-level{level}-mode{k}"))
    return out


__all__ = [
    "InvalidModeProblem",
    "MissingMetric",
    "ModeProblem",
    "TotalReport",
    "assemble_total",
    "block_system",
    "direct_block_kernel",
    "hopf_mode_problems",
    "mode_kernel",
    "random_problem",
]
