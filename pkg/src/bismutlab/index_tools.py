"""Winding numbers, the odd-integer index sum, and the twisted spectral gap test."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA = "bismutlab.index/1"
HIT_TOL = 1e-12
ANGLE_GUARD = 1e-9


class SampleAtCenter(ValueError):
    pass


class Undersampled(ValueError):
    """Some argument increment reached pi; refine the loop."""


class LoopHitsOddInteger(ValueError):
    pass


class NonCommutingTwist(ValueError):
    pass


@dataclass(frozen=True)
class SampledLoop:
    samples: tuple  # complex; closed, last connects to first

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(complex(z) for z in self.samples))
        if len(self.samples) < 3:
            raise ValueError("a loop needs at least 3 samples")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=complex)

    def rotated(self, k: int) -> "SampledLoop":
        s = self.samples
        k %= len(s)
        return SampledLoop(s[k:] + s[:k])

    def refined(self) -> "SampledLoop":
        """Insert segment midpoints (same polygon)."""
        z = self.array
        mid = (z + np.roll(z, -1)) / 2
        return SampledLoop(np.column_stack([z, mid]).ravel())

    def shifted(self, c: complex) -> "SampledLoop":
        return SampledLoop(self.array + c)

    def bounding_box(self) -> tuple:
        z = self.array
        return z.real.min(), z.real.max(), z.imag.min(), z.imag.max()


def circle_loop(center: complex, radius: float, n: int = 256, turns: int = 1) -> SampledLoop:
    t = np.arange(n * abs(turns)) * 2 * np.pi / n
    return SampledLoop(center + radius * np.exp(1j * np.sign(turns or 1) * t))


def _segment_distance(z0: np.ndarray, z1: np.ndarray, c: complex) -> np.ndarray:
    d = z1 - z0
    L2 = np.abs(d) ** 2
    t = np.clip(np.where(L2 > 0, ((c - z0) * d.conj()).real / np.where(L2 > 0, L2, 1), 0), 0, 1)
    return np.abs(z0 + t * d - c)


def winding(loop: SampledLoop, center: complex) -> int:
    """Sum of principal argument increments about ``center`` over ``2 pi``."""
    z = loop.array - center
    if np.any(np.abs(z) < HIT_TOL):
        raise SampleAtCenter(f"a sample equals the center {center}")
    inc = np.angle(np.roll(z, -1) / z)
    if np.any(np.abs(inc) >= np.pi - ANGLE_GUARD):
        raise Undersampled(f"argument increment reached pi about {center}")
    w = inc.sum() / (2 * np.pi)
    n = round(w)
    if abs(w - n) > 1e-6:
        raise Undersampled("non-integral winding")
    return int(n)


def odd_range(components) -> range:
    """Odd integers inside the joint bounding box; windings vanish outside it."""
    boxes = [c.bounding_box() for c in components]
    if not boxes:
        return range(1, 1, 2)
    lo = min(b[0] for b in boxes)
    hi = max(b[1] for b in boxes)
    if min(b[2] for b in boxes) > 0 or max(b[3] for b in boxes) < 0:
        return range(1, 1, 2)
    first = math.ceil(lo)
    first += (first % 2 == 0)
    return range(first, math.floor(hi) + 1, 2)


def index_formula(components, k_range=None) -> int:
    """``sum over odd k of k * sum_j W(L_j, k)``."""
    components = list(components)
    ks = odd_range(components) if k_range is None else [k for k in k_range if k % 2]
    total = 0
    for k in ks:
        for loop in components:
            z = loop.array
            if np.any(_segment_distance(z, np.roll(z, -1), complex(k)) < HIT_TOL):
                raise LoopHitsOddInteger(f"loop meets {k}")
            total += k * winding(loop, k)
    return total


def small_circle_index(k0: int, pairing: int, radius: float = 0.5, n: int = 128) -> tuple:
    """``(index, expected)`` for ``gamma - 1`` circling ``k0 - 1`` with multiplicity ``pairing``."""
    if k0 % 2:
        raise ValueError("k0 must be even")
    loop = circle_loop(k0 - 1, radius, n, turns=pairing)
    return index_formula([loop]), (k0 - 1) * pairing


def loops_from_csv(path) -> list:
    """Rows ``component, t, re, im``; samples ordered by ``t`` within each component."""
    rows = {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.setdefault(r["component"], []).append((float(r["t"]), complex(float(r["re"]), float(r["im"]))))
    return [SampledLoop([z for _, z in sorted(v)]) for _, v in sorted(rows.items())]


def loops_to_csv(components, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "t", "re", "im"])
        for j, loop in enumerate(components):
            for t, z in enumerate(loop.samples):
                w.writerow([j, t, repr(z.real), repr(z.imag)])


# ---------------------------------------------------------------------------
# spectral disjointness for the twisted operator


def oscillator_levels(alpha, n_max: int, lam: float = 1.0) -> np.ndarray:
    """``|lam| * sum_j alpha_j (2 n_j + 1)`` for ``0 <= n_j <= n_max``."""
    alpha = np.asarray(alpha, dtype=float)
    vals = {abs(lam) * float(np.dot(alpha, 2 * np.array(n) + 1)) for n in itertools.product(range(n_max + 1), repeat=alpha.size)}
    return np.array(sorted(vals))


@dataclass
class DisjointnessProblem:
    gamma: np.ndarray
    c_dtheta: np.ndarray
    alpha: tuple
    n_max: int = 20
    lam: float = 1.0
    grading: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=complex)
        self.c_dtheta = np.asarray(self.c_dtheta, dtype=complex)
        self.alpha = tuple(float(a) for a in self.alpha)
        if any(a <= 0 for a in self.alpha):
            raise ValueError("alpha must be positive")
        C = self.gamma @ self.c_dtheta - self.c_dtheta @ self.gamma
        if np.abs(C).max(initial=0.0) > 1e-10 * max(1.0, np.abs(self.gamma).max()):
            raise NonCommutingTwist("gamma must commute with c(dtheta)")
        if self.grading is not None:
            g = np.asarray(self.grading, dtype=float).ravel()
            odd = ~np.equal.outer(g, g)
            if np.abs(self.gamma[odd]).max(initial=0.0) > 1e-12:
                raise ValueError("gamma must be even")

    def adjoint(self) -> "DisjointnessProblem":
        return DisjointnessProblem(self.gamma.conj().T, self.c_dtheta, self.alpha, self.n_max, self.lam, self.grading)


@dataclass
class DisjointnessReport:
    passed: bool
    gap: float
    twist_spectrum: list
    closest: tuple
    lam: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "verdict": "pass" if self.passed else "fail",
            "gap": self.gap,
            "closest": [str(self.closest[0]), self.closest[1]],
            "twist_spectrum": [str(z) for z in self.twist_spectrum],
            "lambda": self.lam,
            "note": self.note,
        }


def twist_spectrum(p: DisjointnessProblem) -> np.ndarray:
    M = 1j * (p.gamma - np.eye(p.gamma.shape[0])) @ p.c_dtheta
    ev = np.linalg.eigvals(M)
    return np.concatenate([ev, -ev])


def disjointness_check(p: DisjointnessProblem, tol: float = 1e-9) -> DisjointnessReport:
    spec = twist_spectrum(p)
    levels = oscillator_levels(p.alpha, p.n_max, p.lam)
    dist = np.abs(spec[:, None] - levels[None, :])
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    gap = float(dist[i, j])
    note = "pass means the graded Rockland precondition holds at this lambda" if gap > tol else ""
    if p.lam != 1.0:
        note += "; only lambda = 1 is part of the stated hypothesis"
    return DisjointnessReport(gap > tol, gap, sorted(spec, key=lambda z: (z.real, z.imag)), (spec[i], float(levels[j])), p.lam, note)


def forms_twist(gamma_value: complex):
    """Twist on ``Lambda F*`` of a contact 3-manifold: ``gamma`` on ``E_i``, 1 on ``E_-i`` and on ``F*``.

    Returns ``(gamma_tilde, c_dtheta, grading)`` with ``c(dtheta) = c_0 c_1``, which on
    ``Lambda^ev F*`` in the basis ``1, e^0 ^ e^1`` is ``[[0, -1], [1, 0]]``.
    """
    from . import exact
    from .clifford import build_bimodule

    bim = build_bimodule(2)
    c0, c1 = (exact.to_numpy(c) for c in bim.left)
    C = c0 @ c1
    par = np.real(np.diag(exact.to_numpy(bim.exterior.parity)))
    ev = np.where(par > 0)[0]
    G = np.eye(C.shape[0], dtype=complex)
    w, V = np.linalg.eig(C[np.ix_(ev, ev)])
    P_plus = np.zeros_like(G)
    sel = np.abs(w - 1j) < 1e-9
    Vi = V[:, sel]
    proj = Vi @ np.linalg.pinv(Vi)  # C is normal, so the eigenprojection is orthogonal
    P_plus[np.ix_(ev, ev)] = proj
    G = G + (gamma_value - 1) * P_plus
    return G, C, par


def forms_example(gamma_value: complex, n_max: int = 20, lam: float = 1.0) -> DisjointnessProblem:
    G, C, par = forms_twist(gamma_value)
    return DisjointnessProblem(G, C, (1.0,), n_max, lam, par)


__all__ = [
    "DisjointnessProblem",
    "DisjointnessReport",
    "LoopHitsOddInteger",
    "NonCommutingTwist",
    "SampleAtCenter",
    "SampledLoop",
    "Undersampled",
    "circle_loop",
    "disjointness_check",
    "forms_example",
    "forms_twist",
    "index_formula",
    "loops_from_csv",
    "loops_to_csv",
    "odd_range",
    "oscillator_levels",
    "small_circle_index",
    "twist_spectrum",
    "winding",
]

