"""Prebuilt frame data at a point: contact, su(2), two-step and random models.

Every builder returns a :class:`ModelEntry`; its ``data`` is already
orthonormal unless stated otherwise.  Entries whose expected results are
recorded carry them in ``expected`` as plain JSON-compatible values that
the test-suite regenerates from the computing modules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact
from .clifford import build_bimodule, build_clifford, build_exterior
from .frame_geometry import (
    FiberOps,
    FramePointData,
    KoszulLaurent,

    _zeros,
    form_derivation,
    make_frame_data,
    nabla_F0,
    omega_F,
    spin_connection,
)
from .laurent import LaurentMatrix

FIXTURE_DIR = Path(__file__).with_name("fixtures")


@dataclass(frozen=True, eq=False)
class ModelEntry:
    name: str
    data: FramePointData
    expected: dict = field(default_factory=dict)
    names: tuple = ()

    def to_json(self) -> dict:
        return {"name": self.name, "names": list(self.names), "expected": self.expected, "data": self.data.to_json()}

    @classmethod
    def from_json(cls, obj) -> "ModelEntry":
        return cls(obj["name"], FramePointData.from_json(obj["data"]), obj["expected"], tuple(obj["names"]))


def _structure(n, brackets) -> np.ndarray:
    st = _zeros((n, n, n))
    for (a, b), vec in brackets.items():
        for k, v in vec.items():
            st[a, b, k] += Fraction(v)
            st[b, a, k] -= Fraction(v)
    return st


def spin_type(n1, n2, structure, *, twist=None, name="", **metric) -> FramePointData:
    """Spinor module of rank ``n1`` with the spin lift of ``nabla^{F,0}``.

    ``twist`` is an optional list of ``n1 + n2`` square matrices ``B_a``;
    the module becomes ``S (x) C^k`` with connection ``A_a (x) 1 + 1 (x) B_a``.
    """
    cl = build_clifford(n1)
    bare = make_frame_data(n1, n2, structure, cl.generators, cl.grading,
                           [exact.zeros(cl.dim)] * (n1 + n2), **metric)
    A = spin_connection(bare, cl.generators, nabla_F0(bare))
    if twist is None:
        return replace(bare, connection=A, name=name).validate()
    k = twist[0].shape[0]
    Ik = exact.eye(k)
    return replace(
        bare,
        clifford=tuple(exact.kron(c, Ik) for c in cl.generators),
        grading=exact.kron(cl.grading, Ik),
        connection=tuple(exact.kron(a, Ik) + exact.kron(exact.eye(cl.dim), b) for a, b in zip(A, twist)),
        name=name,
    ).validate()


def heisenberg_structure(n: int) -> np.ndarray:
    """``[Q_j, P_k] = delta_jk T`` on the frame ``Q_1..Q_n, P_1..P_n, T``."""
    return _structure(2 * n + 1, {(j, n + j): {2 * n: 1} for j in range(n)})


def heisenberg_names(n: int) -> tuple:
    if n == 1:
        return ("Q", "P", "T")
    return tuple(f"Q{j + 1}" for j in range(n)) + tuple(f"P{j + 1}" for j in range(n)) + ("T",)


def heisenberg_model(n: int = 1) -> ModelEntry:
    if n < 1:
        raise ValueError("n must be at least 1")
    data = spin_type(2 * n, 1, heisenberg_structure(n), name=f"heisenberg{2 * n + 1}")
    return ModelEntry(data.name, data, {"rockland": "pass (sampled)"}, heisenberg_names(n))


def su2_structure() -> np.ndarray:
    """``[X,Y]=2T, [Y,T]=2X, [T,X]=2Y`` on the frame ``X, Y, T``."""
    return _structure(3, {(0, 1): {2: 2}, (1, 2): {0: 2}, (2, 0): {1: 2}})


def su2_model() -> ModelEntry:
    data = spin_type(2, 1, su2_structure(), name="su2")
    return ModelEntry(data.name, data, {}, ("X", "Y", "T"))


def su2_forms_model() -> ModelEntry:
    """``Lambda F*`` over the Hopf frame; the full fiber has dimension 8."""
    data = forms_model(su2_structure(), 2, 1, name="su2-forms")
    return ModelEntry(data.name, data, {}, ("X", "Y", "T"))


def quaternionic_structure() -> np.ndarray:
    """Two-step algebra on ``R^4 + R^3`` with brackets from the quaternion units.

    ``[e_a, e_b] = sum_mu <e_a, J_mu e_b> f_mu`` with ``J_mu`` left
    multiplication by ``i, j, k``; the three skew forms are independent so the
    bracket map onto the centre is surjective.
    """
    brackets = {}
    for mu, J in enumerate(quaternion_units()):
        for a in range(4):
            for b in range(a + 1, 4):
                if J[a][b]:
                    brackets.setdefault((a, b), {})[4 + mu] = J[a][b]
    return _structure(7, brackets)


def quaternion_units():
    """Matrices of left multiplication by ``i, j, k`` on ``H = R^4`` (basis 1, i, j, k)."""
    qi = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    qj = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    qk = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    return qi, qj, qk


def quaternionic_model() -> ModelEntry:
    data = spin_type(4, 3, quaternionic_structure(), name="quaternionic")
    names = ("X1", "X2", "X3", "X4", "Z1", "Z2", "Z3")
    return ModelEntry(data.name, data, {}, names)


# ---------------------------------------------------------------------------
# differential forms on F as the Clifford module


def forms_model(structure, n1, n2, name="") -> FramePointData:
    """``Lambda F*`` with left Clifford action and the connection induced by ``nabla^{F,0}``."""
    bim = build_bimodule(n1)
    ext = bim.exterior
    bare = make_frame_data(n1, n2, structure, bim.left, ext.parity, [exact.zeros(ext.dim)] * (n1 + n2))
    A = form_derivation(ext, nabla_F0(bare))
    return replace(bare, connection=A, name=name).validate()


def _laurent_extra(mats_by_dir) -> dict:
    """Split per-direction Laurent matrices into ``{power: per-direction matrices}``."""
    powers = sorted({p for m in mats_by_dir for p in m.support})
    return {p: tuple(m.coeff(p) for m in mats_by_dir) for p in powers}


def induced_forms_extra(data: FramePointData) -> list:
    """Per-direction Laurent correction turning the forms model into the ``nabla^{F,u}``-induced one.

    The standard construction adds ``u^{-1}/4 c^L(Omega_F)``; the induced
    connection of ``nabla^{F,u}`` instead adds the derivation of its ``u^{-1}``
    part.  Returns their difference lifted to the full fiber.
    """
    ops = FiberOps(data)
    kz = KoszulLaurent(data)
    ext = build_exterior(data.n1)
    out = []
    for a in range(data.n):
        table = np.empty((1, data.n1, data.n1), dtype=object)
        for i in data.F:
            for j in data.F:
                table[0, i, j] = kz.connection_F[a][i][j].coeff(-1)
        deriv = form_derivation(ext, table)[0]
        std = ops.clifford_two_form({(i, j): omega_F(data, a, i, j) for i in data.F for j in data.F})
        diff = deriv - exact.smul(Fraction(1, 4), std)
        out.append(LaurentMatrix((ops.dim, ops.dim), {-1: ops.on_E(diff)}))
    return out


def right_actions(data: FramePointData) -> list:
    """Right Clifford actions on the full fiber ``Lambda F* (x) Lambda T* = Lambda T*M``.

    ``R_b = (eps_b + u_b iota_b) kappa`` with ``u_b = 1`` on F and ``u`` on T,
    the right counterpart of ``m_u`` for the metric ``g_F + u^{-1} g_T``.
    """
    ext = build_exterior(data.n)
    kappa = ext.parity
    out = []
    for b in range(data.n):
        eps = ext.wedge[b] * kappa
        iota = ext.contract[b] * kappa
        if b < data.n1:
            out.append(LaurentMatrix.const(eps + iota))
        else:
            out.append(LaurentMatrix(eps.shape, {0: eps, 1: iota}))
    return out


def levi_civita_extra(data: FramePointData) -> list:
    """``-1/2 omega^R_u`` per direction, ``omega^R = 1/2 sum_bc omega(a; b, c) R_c R_b``."""
    kz = KoszulLaurent(data)
    omega = kz.shape_form()
    R = right_actions(data)
    dim = R[0].shape[0]
    out = []
    for a in range(data.n):
        acc = LaurentMatrix.zero(dim)
        for b in range(data.n):
            for c in range(data.n):
                if omega[a][b][c]:
                    acc = acc + (R[c] * R[b]) * omega[a][b][c]
        out.append(acc * Fraction(-1, 4))
    return out


def bimodule_bad_model() -> ModelEntry:
    """Heisenberg forms model with the connection induced by ``nabla^{F,u}``."""
    base = forms_model(heisenberg_structure(1), 2, 1)
    extra = _laurent_extra(induced_forms_extra(base))
    data = replace(base, extra_connection=extra, name="heisenberg3-forms-induced").validate()
    return ModelEntry(data.name, data, {"rockland": "fail (witness)"}, heisenberg_names(1))


def levi_civita_bad_model() -> ModelEntry:
    """Bimodule model plus ``-1/2 omega^R_u``: the Levi-Civita connection of ``Lambda T*M``."""
    base = forms_model(heisenberg_structure(1), 2, 1)
    per_dir = [a + b for a, b in zip(induced_forms_extra(base), levi_civita_extra(base))]
    data = replace(base, extra_connection=_laurent_extra(per_dir), name="heisenberg3-levi-civita").validate()
    return ModelEntry(data.name, data, {"rockland": "fail (witness)"}, heisenberg_names(1))


# ---------------------------------------------------------------------------
# random data


def _rng(seed):
    return np.random.default_rng(seed)


def _rand_q(rng, lo=-3, hi=3, den=(1, 2, 3, 4)):
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.choice(den)))


def random_spd(rng, r) -> np.ndarray:
    """``L L^T`` with rational lower-triangular ``L`` and positive rational diagonal."""
    L = _zeros((r, r))
    for i in range(r):
        L[i, i] = Fraction(int(rng.integers(1, 4)), int(rng.choice((1, 2))))
        for j in range(i):
            L[i, j] = _rand_q(rng, -1, 1, (1, 2))
    return L.dot(L.T)


def _random_sym_derivs(rng, n, r) -> np.ndarray:
    out = _zeros((n, r, r))
    for d in range(n):
        for i in range(r):
            for j in range(i, r):
                out[d, i, j] = out[d, j, i] = _rand_q(rng)
    return out


def _random_twist(rng, k, n) -> list:
    """Anti-Hermitian Gaussian-rational ``k x k`` matrices (unitary twisting connection)."""
    out = []
    for _ in range(n):
        ent = {}
        for i in range(k):
            ent[(i, i)] = (0, _rand_q(rng))
            for j in range(i + 1, k):
                re, im = _rand_q(rng), _rand_q(rng)
                ent[(i, j)] = (re, im)
                ent[(j, i)] = (-re, im)
        out.append(exact.from_dict(ent, (k, k)))
    return out


def random_frame(n1, n2, seed, *, invariant=False, orthonormal=False, twist=2, fibration=False) -> ModelEntry:
    """Random structure constants, metrics and (optionally) first derivatives.

    Non-invariant data only needs antisymmetric structure constants.
    ``fibration=True`` forces ``[F, F] in F`` so that ``Omega_F = 0``.
    """
    rng = _rng(seed)
    n = n1 + n2
    st = _zeros((n, n, n))
    for a in range(n):
        for b in range(a + 1, n):
            for k in range(n):
                if fibration and a < n1 and b < n1 and k >= n1:
                    continue
                if rng.random() < 0.6:
                    v = _rand_q(rng)
                    st[a, b, k], st[b, a, k] = v, -v
    if fibration and n2 >= 2 and not any(st[n1, n1 + 1, k] for k in range(n1)):
        st[n1, n1 + 1, 0], st[n1 + 1, n1, 0] = Fraction(1), Fraction(-1)
    metric = {}
    if not orthonormal:
        metric["metric_F"] = random_spd(rng, n1)
        metric["metric_T"] = random_spd(rng, n2)
    if not invariant:
        metric["d_metric_F"] = _random_sym_derivs(rng, n, n1)
        metric["d_metric_T"] = _random_sym_derivs(rng, n, n2)
        metric["left_invariant"] = False
        ds = _zeros((n, n, n, n))
        for idx in np.ndindex(n, n, n, n):
            d, a, b, k = idx
            if a < b and rng.random() < 0.3:
                v = _rand_q(rng)
                ds[d, a, b, k], ds[d, b, a, k] = v, -v
        metric["d_structure"] = ds
    tw = _random_twist(rng, twist, n) if twist else None
    data = _spin_type_general(n1, n2, st, tw, name=f"random-{n1}-{n2}-{seed}", **metric)
    return ModelEntry(data.name, data, {}, tuple(f"e{a}" for a in range(n)))


def _spin_type_general(n1, n2, st, twist, name, **metric) -> FramePointData:
    """Orthonormalize first, then attach the spin lift (which needs an orthonormal frame)."""
    from .frame_geometry import orthonormalize

    cl = build_clifford(n1)
    raw = make_frame_data(n1, n2, st, cl.generators, cl.grading, [exact.zeros(cl.dim)] * (n1 + n2), **metric)
    on = orthonormalize(raw)
    return spin_type(n1, n2, on.structure, twist=twist, name=name,
                     d_metric_F=on.d_metric_F, d_metric_T=on.d_metric_T,
                     d_structure=on.d_structure, left_invariant=on.left_invariant)


def random_two_step(n1, n2, seed) -> ModelEntry:
    """Random surjective two-step bracket ``[F, F] -> T`` with random SPD metrics and derivatives."""
    if n2 > n1 * (n1 - 1) // 2:
        raise ValueError("bracket cannot be surjective: n2 exceeds dim of Lambda^2 F")
    rng = _rng(seed)
    n = n1 + n2
    pairs = [(a, b) for a in range(n1) for b in range(a + 1, n1)]
    while True:
        st = _zeros((n, n, n))
        for a, b in pairs:
            for mu in range(n2):
                v = _rand_q(rng)
                st[a, b, n1 + mu], st[b, a, n1 + mu] = v, -v
        mat = np.array([[float(st[a, b, n1 + mu]) for a, b in pairs] for mu in range(n2)])
        if np.linalg.matrix_rank(mat) == n2:
            break
    metric = {
        "metric_F": random_spd(rng, n1),
        "metric_T": random_spd(rng, n2),
        "d_metric_F": _random_sym_derivs(rng, n, n1),
        "d_metric_T": _random_sym_derivs(rng, n, n2),
        "left_invariant": False,
    }
    data = _spin_type_general(n1, n2, st, None, name=f"two-step-{n1}-{n2}-{seed}", **metric)
    return ModelEntry(data.name, data, {}, tuple(f"e{a}" for a in range(n)))


def fibration_model(seed: int = 0, n1: int = 2, n2: int = 2) -> ModelEntry:
    """Integrable F (``Omega_F = 0``) with random, nonzero transverse curvature ``Omega_T``."""
    entry = random_frame(n1, n2, seed, fibration=True)
    data = replace(entry.data, name=f"fibration-{seed}")
    return ModelEntry(data.name, data, {}, entry.names)


# ---------------------------------------------------------------------------
# catalog and fixtures


def catalog() -> dict:
    return {
        e.name: e
        for e in (
            heisenberg_model(1),
            heisenberg_model(2),
            su2_model(),
            su2_forms_model(),
            quaternionic_model(),
            bimodule_bad_model(),
            levi_civita_bad_model(),
            fibration_model(0),
        )
    }


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.json"


def load_fixture(name: str) -> ModelEntry:
    return ModelEntry.from_json(json.loads(fixture_path(name).read_text()))


def write_fixtures(entries=None) -> list:
    FIXTURE_DIR.mkdir(exist_ok=True)
    paths = []
    for e in entries or catalog().values():
        p = fixture_path(e.name)
        p.write_text(json.dumps(e.to_json(), indent=1, sort_keys=True) + "\n")
        paths.append(p)
    return paths


__all__ = [
    "ModelEntry",
    "bimodule_bad_model",
    "catalog",
    "fibration_model",
    "forms_model",
    "heisenberg_model",
    "levi_civita_bad_model",
    "load_fixture",
    "quaternionic_model",
    "random_frame",
    "random_two_step",
    "right_actions",
    "spin_type",
    "su2_forms_model",
    "su2_model",
    "write_fixtures",
]

