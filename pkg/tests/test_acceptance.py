"""Acceptance suite: one check per criterion, each with its tolerance and time limit.

Run under pytest (a summary line per criterion is printed at the end) or
directly with ``python tests/test_acceptance.py``.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from bismutlab import frame_geometry as fg
from bismutlab import hopf_spectral as hs
from bismutlab import index_tools as it
from bismutlab import models as M
from bismutlab import nilpotent_rep as nr
from bismutlab import s1_fourier as s1

RESULTS = {}


def _gfd_instances():
    fixed = [M.heisenberg_model(1), M.heisenberg_model(2), M.su2_model(), M.fibration_model(0)]
    rand = []
    for s in range(51):
        rand.append([M.random_frame(2, 2, s), M.random_two_step(3, 2, s), M.random_frame(3, 1, s)][s % 3])
    return fixed + rand


def criterion_1():
    t = time.perf_counter()
    inst = _gfd_instances()
    bad = [e.name for e in inst if fg.finite_part(fg.assemble_Du(e.data, strict=False)) != fg.global_formula(e.data).total]
    dt = time.perf_counter() - t
    return not bad and dt < 10, f"{len(inst) - len(bad)}/{len(inst)} exact equalities in {dt:.2f}s (limit 10s)"


def criterion_2():
    inst = _gfd_instances() + [M.quaternionic_model(), M.bimodule_bad_model(), M.levi_civita_bad_model()]
    inst += [M.random_two_step(4, 3, s) for s in range(5)]
    bad = []
    for e in inst:
        sup = fg.assemble_Du(e.data, strict=False).support
        if not sup <= {-1, 0, 1}:
            bad.append(f"{e.name}:{sorted(sup)}")
    detail = f"{len(inst) - len(bad)}/{len(inst)} within {{-1,0,1}}"
    if bad:
        detail += f"; outside: {', '.join(bad[:3])}{' ...' if len(bad) > 3 else ''}"
    return not bad, detail


def criterion_3():
    rows = []
    for e in (M.heisenberg_model(1), M.heisenberg_model(2), M.su2_model()):
        d = e.data
        ok = (fg.weitzenbock_check(d).holds and fg.bianchi_defect_check(d).holds
              and fg.curvature_contraction_check(d).holds and fg.bianchi_rhs_vanishes(d))
        rows.append((e.name, ok))
    return all(ok for _, ok in rows), ", ".join(f"{n}={'0' if ok else 'nonzero'}" for n, ok in rows)


def criterion_4():
    t = time.perf_counter()
    worst = np.inf
    conv = True
    for e, alpha_sum in ((M.heisenberg_model(1), 1.0), (M.heisenberg_model(2), 2.0)):
        lap = nr.laplace_cosymbol(fg.global_formula(e.data).total, e.data)
        rep = nr.rockland_check(lap, nr.TwoStepAlgebra.from_frame(e.data), Ns=(8, 16, 32))
        for smp in rep.samples:
            if smp.label != "schrodinger":
                continue
            bound = abs(smp.parameter[0]) / 4 * alpha_sum
            worst = min(worst, min(v - bound for v in smp.min_form.values()))
            vals = [smp.min_form[N] for N in (8, 16, 32)]
            conv &= smp.converged and max(vals) - min(vals) <= 1e-6
    dt = time.perf_counter() - t
    return worst >= -1e-6 and conv and dt < 30, f"min(form - bound) = {worst:.2e}, converged={conv}, {dt:.2f}s (limit 30s)"


def criterion_5():
    out = []
    for e in (M.bimodule_bad_model(), M.levi_civita_bad_model()):
        lap = nr.laplace_cosymbol(fg.global_formula(e.data).total, e.data)
        rep = nr.rockland_check(lap, nr.TwoStepAlgebra.from_frame(e.data))
        smin = min(min(s.min_singular.values()) for s in rep.samples)
        out.append((e.name, rep.verdict == "fail (witness)" and smin < 1e-8, smin))
    return all(o[1] for o in out), ", ".join(f"{n}: sigma_min={s:.1e}" for n, _, s in out)


def criterion_6():
    rows = []
    for e in (M.heisenberg_model(1), M.heisenberg_model(2), M.quaternionic_model()):
        g = nr.graded_cosymbol(fg.global_formula(e.data).total, e.data)
        rows.append((e.name, g == nr.model_operator(e.data, g.algebra)))
    return all(ok for _, ok in rows), ", ".join(f"{n}={'equal' if ok else 'differ'}" for n, ok in rows)


def criterion_7():
    t = time.perf_counter()
    err, bound_ok = 0.0, True
    ok = True
    for m in range(11):
        ev = hs.match_spectrum(hs.even_operator(m), m, Fraction(5, 2))
        od = hs.match_spectrum(hs.odd_operator(m), m, Fraction(3, 2))
        ok &= ev.matches and od.matches
        err = max(err, ev.max_error, od.max_error)
        bound_ok &= od.computed.min() >= m / 2 - 1e-9
    sols = hs.quadratic_solutions()
    ok &= bound_ok and sols == {(-2, 0), (-1, 2), (0, 0)}
    dt = time.perf_counter() - t
    return ok and dt < 20, f"max error {err:.1e}, eigmin >= m/2: {bound_ok}, solutions {sorted(sols)}, {dt:.2f}s (limit 20s)"


def criterion_8():
    t = time.perf_counter()
    got = {M_max: hs.full_kernel(M_max) for M_max in range(2, 11)}
    dt = time.perf_counter() - t
    ok = all(v == (2, 0) for v in got.values())
    return ok and dt < 60, f"kernels {sorted(set(got.values()))} for M_max 2..10, {dt:.2f}s (limit 60s)"


def criterion_9():
    bad = [s for s in range(100) if s1.mode_kernel(s1.random_problem(s)) != s1.direct_block_kernel(s1.random_problem(s))]
    dims = [s1.random_problem(s).dim for s in range(100)]
    ms = [s1.random_problem(s).m for s in range(100)]
    hopf = s1.assemble_total(s1.hopf_mode_problems(6, range(-6, 7)))
    ok = not bad and max(dims) <= 12 and max(map(abs, ms)) <= 5 and hopf.agree and hopf.totals == (2, 0)
    return ok, f"{100 - len(bad)}/100 random agree; Hopf totals {hopf.totals}, routes agree={hopf.agree}"


def criterion_10():
    rng = np.random.default_rng(2024)
    n, wrong = 0, 0
    while n < 200:
        c = complex(*rng.uniform(-5, 5, 2))
        r = float(rng.uniform(0.2, 3))
        q = complex(*rng.uniform(-8, 8, 2))
        if abs(abs(q - c) - r) < 1e-2:
            continue
        n += 1
        wrong += it.winding(it.circle_loop(c, r, 256), q) != int(abs(q - c) < r)
    small = [(k0, p) for k0 in (-4, -2, 0, 2, 4) for p in (1, 2, 3)
             if it.small_circle_index(k0, p)[0] != (k0 - 1) * p]
    return wrong == 0 and not small, f"{200 - wrong}/200 windings correct; {15 - len(small)}/15 small-circle indices"


def criterion_11():
    circle = [3.0 + 0.5 * np.exp(2j * np.pi * k / 16) for k in range(16)]
    gaps = [it.disjointness_check(it.forms_example(g)) for g in circle]
    collide = it.disjointness_check(it.forms_example(2.0))
    ok = all(r.passed for r in gaps) and not collide.passed and collide.gap < 1e-12
    return ok, f"circle min gap {min(r.gap for r in gaps):.3f}; collision gap {collide.gap:.1e}"


CRITERIA = {
    1: ("route equality", criterion_1),
    2: ("Laurent support", criterion_2),
    3: ("curvature identities", criterion_3),
    4: ("Rockland positive", criterion_4),
    5: ("Rockland negative", criterion_5),
    6: ("graded cosymbol", criterion_6),
    7: ("Hopf spectrum", criterion_7),
    8: ("Hopf kernel", criterion_8),
    9: ("S1 oracle", criterion_9),
    10: ("index arithmetic", criterion_10),
    11: ("twist disjointness", criterion_11),
}


def _line(k, ok, detail):
    return f"criterion {k:2d} [{CRITERIA[k][0]}]: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, detail = CRITERIA[k][1]()
    RESULTS[k] = _line(k, ok, detail)
    assert ok, RESULTS[k]


if __name__ == "__main__":
    for k, (_, fn) in CRITERIA.items():
        print(_line(k, *fn()), flush=True)
