"""Batch verification entry point.

Exit codes: 0 all selected suites pass, 1 some check failed, 2 inconclusive
(unconverged truncation), 64 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA = "bismutlab.report/1"
EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
SUITES = ("verify-gfd", "laurent", "weitzenbock", "rockland", "hopf", "s1-kernel", "index")
MODEL_ALIASES = {
    "bimodule_bad": "heisenberg3-forms-induced",
    "levi_civita_bad": "heisenberg3-levi-civita",
}


class ConfigError(ValueError):
    pass


@dataclass
class SuiteResult:
    suite: str
    status: str  # pass | fail | inconclusive
    report: dict
    first_failure: str = ""
    tables: dict = field(default_factory=dict)  # file stem -> (header, rows)

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[self.status]


def workers() -> int:
    try:
        return max(1, int(os.environ.get("BISMUTLAB_WORKERS", "1")))
    except ValueError as exc:
        raise ConfigError("BISMUTLAB_WORKERS must be an integer") from exc


def pmap(fn, items) -> list:
    """Ordered map over a bounded process pool."""
    items = list(items)
    n = workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def resolve_model(name: str):
    from .models import catalog, load_fixture

    name = MODEL_ALIASES.get(name, name)
    if name.endswith(".json") or os.sep in name:
        from .models import ModelEntry

        return ModelEntry.from_json(json.loads(Path(name).read_text()))
    cat = catalog()
    if name in cat:
        return cat[name]
    try:
        return load_fixture(name)
    except FileNotFoundError as exc:
        raise ConfigError(f"unknown model {name!r}; known: {sorted(cat)}") from exc


# ---------------------------------------------------------------------------
# suites


def _random_instance(key):
    from .models import random_frame, random_two_step

    kind, seed = key
    if kind == "frame22":
        return random_frame(2, 2, seed)
    if kind == "frame31":
        return random_frame(3, 1, seed)
    return random_two_step(3, 2, seed)


def _gfd_one(key):
    from .frame_geometry import assemble_Du, finite_part, global_formula

    entry = resolve_model(key[1]) if key[0] == "model" else _random_instance(key)
    op = assemble_Du(entry.data, strict=False)
    equal = finite_part(op) == global_formula(entry.data).total
    return {"instance": entry.name, "equal": bool(equal), "laurent_support": sorted(op.support)}


def _gfd_keys(cfg) -> list:
    kinds = ("frame22", "two_step32", "frame31")
    keys = [("model", m) for m in cfg["models"]]
    keys += [(kinds[s % 3], s) for s in range(cfg["seeds"])]
    return keys


def suite_verify_gfd(cfg) -> SuiteResult:
    rows = pmap(_gfd_one, _gfd_keys(cfg))
    bad = [r["instance"] for r in rows if not r["equal"]]
    rep = {"instances": rows, "equal": len(rows) - len(bad), "total": len(rows)}
    return SuiteResult("verify-gfd", "fail" if bad else "pass", rep, f"route mismatch on {bad[0]}" if bad else "")


def suite_laurent(cfg) -> SuiteResult:
    from .frame_geometry import assemble_Du, transverse_quadratic_term

    rows = []
    for key in _gfd_keys(cfg):
        entry = resolve_model(key[1]) if key[0] == "model" else _random_instance(key)
        op = assemble_Du(entry.data, strict=False)
        sup = sorted(op.support)
        row = {"instance": entry.name, "support": sup, "within_pm1": set(sup) <= {-1, 0, 1}}
        if 2 in sup:
            row["u2_equals_transverse_term"] = op.zeroth.coeff(2) == transverse_quadratic_term(entry.data)
        rows.append(row)
    bad = [r["instance"] for r in rows if not r["within_pm1"]]
    rep = {"instances": rows, "note": "a u^2 term appears when n2 >= 2 and [T, T] has an F-component"}
    return SuiteResult("laurent", "fail" if bad else "pass", rep, f"support outside {{-1,0,1}} on {bad[0]}" if bad else "")


def suite_weitzenbock(cfg) -> SuiteResult:
    from .frame_geometry import (bianchi_defect_check, bianchi_rhs_vanishes, curvature_contraction_check,
                                 weitzenbock_check)

    rows, first = [], ""
    for name in cfg["identity_models"]:
        d = resolve_model(name).data
        row = {
            "model": name,
            "weitzenbock": weitzenbock_check(d).holds,
            "bianchi_defect": bianchi_defect_check(d).holds,
            "curvature_contraction": curvature_contraction_check(d).holds,
        }
        if d.n1 == 2:
            row["rank2_cyclic_sum"] = bianchi_rhs_vanishes(d)
        rows.append(row)
        for k, v in row.items():
            if v is False and not first:
                first = f"{k} fails on {name}"
    return SuiteResult("weitzenbock", "fail" if first else "pass", {"models": rows}, first)


def suite_rockland(cfg) -> SuiteResult:
    from . import frame_geometry as fg
    from . import nilpotent_rep as nr

    rows, status, first = [], "pass", ""
    for name in cfg["rockland_models"]:
        entry = resolve_model(name)
        d = entry.data
        alg = nr.TwoStepAlgebra.from_frame(d, entry.names)
        lap = nr.laplace_cosymbol(fg.global_formula(d).total, d)
        taus = nr.central_samples(alg.n2, cfg["lambdas"]) if cfg["lambdas"] else None
        rep = nr.rockland_check(lap, alg, taus=taus, Ns=tuple(cfg["N"]), tol=cfg["tol"])
        expect = cfg["expect"] if cfg["expect"] != "auto" else entry.expected.get("rockland", "pass (sampled)")
        expect = {"pass": "pass (sampled)", "fail": "fail (witness)"}.get(expect, expect)
        row = {"model": entry.name, "verdict": rep.verdict, "expected": expect, "report": rep.to_json()}
        rows.append(row)
        if rep.verdict == "inconclusive" and status == "pass":
            status, first = "inconclusive", f"unconverged truncation on {entry.name}"
        elif rep.verdict != expect:
            status, first = "fail", first or f"{entry.name}: verdict {rep.verdict!r}, expected {expect!r}"
    return SuiteResult("rockland", status, {"models": rows}, first)


def _hopf_level(m):
    from . import hopf_spectral as hs

    ev = hs.match_spectrum(hs.even_operator(m), m, hs.EVEN_COEFF)
    odd = {v: hs.match_spectrum(hs.odd_operator(m, v), m, hs.ODD_COEFFS["dtheta"]) for v in hs.ODD_COEFFS}
    eigmin = float(odd["dtheta"].computed.min())
    return m, ev, odd, eigmin


def suite_hopf(cfg) -> SuiteResult:
    from . import hopf_spectral as hs

    M = cfg["max_level"]
    levels = pmap(_hopf_level, range(M + 1))
    rows, per, first = [], [], ""
    for m, ev, odd, eigmin in levels:
        rows += [("even",) + r for r in ev.rows()] + [("odd",) + r for r in odd["dtheta"].rows()]
        per.append({
            "m": m,
            "even_matches": ev.matches,
            "odd_matches": {v: s.matches for v, s in odd.items()},
            "odd_eigmin": eigmin,
            "odd_bound_holds": eigmin >= m / 2 - 1e-9,
        })
        if not first and not ev.matches:
            first = f"even spectrum mismatch at m={m}"
        if not first and not odd["dtheta"].matches:
            first = f"odd spectrum mismatch at m={m}"
        if not first and eigmin < m / 2 - 1e-9:
            first = f"odd eigmin below m/2 at m={m}"
    kernel = hs.full_kernel(M) if M >= 2 else None
    blocks = hs.per_block_kernels(M)
    sols = sorted(hs.quadratic_solutions())
    if not first and kernel != (2, 0):
        first = f"kernel {kernel} != (2, 0)"
    if not first and sols != [(-2, 0), (-1, 2), (0, 0)]:
        first = f"quadratic solutions {sols}"
    literal = all(p["odd_matches"]["literal"] for p in per)
    rep = {
        "max_level": M,
        "levels": per,
        "kernel": list(kernel) if kernel else None,
        "per_block_kernel": [list(b) for b in blocks],
        "quadratic_solutions": [list(s) for s in sols],
        "odd_coefficient": {"matches_stated_spectrum": "dtheta (3/2)" if not literal else "both",
                            "literal_-3/4_matches": literal},
    }
    return SuiteResult("hopf", "fail" if first else "pass", rep, first,
                       {"hopf_spectrum": (("operator", "m", "eigenvalue", "multiplicity", "formula_match"), rows)})


def _s1_seed(seed):
    from . import s1_fourier as s1

    p = s1.random_problem(seed)
    return {"seed": seed, "m": p.m, "dim": p.dim, "mode_kernel": list(s1.mode_kernel(p)),
            "direct": list(s1.direct_block_kernel(p))}


def suite_s1(cfg) -> SuiteResult:
    from . import s1_fourier as s1

    rows = pmap(_s1_seed, range(cfg["seeds_s1"]))
    bad = [r["seed"] for r in rows if r["mode_kernel"] != r["direct"]]
    hopf = s1.assemble_total(s1.hopf_mode_problems(cfg["max_level"], range(-cfg["mode_range"], cfg["mode_range"] + 1)))
    first = f"routes disagree on seed {bad[0]}" if bad else ""
    if not first and not hopf.agree:
        first = "routes disagree on the Hopf instance"
    if not first and hopf.totals != (2, 0):
        first = f"Hopf totals {hopf.totals} != (2, 0)"
    rep = {"random": rows, "hopf": hopf.to_json()}
    return SuiteResult("s1-kernel", "fail" if first else "pass", rep, first)


def suite_index(cfg) -> SuiteResult:
    from . import index_tools as it

    rows, first = [], ""
    for k0 in (-4, -2, 0, 2, 4):
        for p in (1, 2, 3):
            got, want = it.small_circle_index(k0, p)
            rows.append({"k0": k0, "pairing": p, "index": got, "expected": want})
            if got != want and not first:
                first = f"index {got} != {want} at k0={k0}, pairing={p}"
    loops = None
    if cfg["loops"]:
        try:
            loops = it.loops_from_csv(cfg["loops"])
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read loops: {exc}") from exc
        try:
            rows.append({"csv": str(cfg["loops"]), "index": it.index_formula(loops)})
        except (it.LoopHitsOddInteger, it.SampleAtCenter, it.Undersampled) as exc:
            rows.append({"csv": str(cfg["loops"]), "error": str(exc)})
            first = first or f"loops from {cfg['loops']}: {exc}"
    rep_g = it.disjointness_check(it.forms_example(cfg["gamma"], lam=cfg["lam"]))
    if not rep_g.passed and not first:
        first = f"disjointness fails for gamma={cfg['gamma']} (gap {rep_g.gap:.3g})"
    rep = {"small_circles": rows, "disjointness": rep_g.to_json(), "gamma": str(cfg["gamma"])}
    return SuiteResult("index", "fail" if first else "pass", rep, first)


RUNNERS = {
    "verify-gfd": suite_verify_gfd,
    "laurent": suite_laurent,
    "weitzenbock": suite_weitzenbock,
    "rockland": suite_rockland,
    "hopf": suite_hopf,
    "s1-kernel": suite_s1,
    "index": suite_index,
}

DEFAULTS = {
    "models": ["heisenberg3", "heisenberg5", "su2", "su2-forms", "quaternionic", "fibration-0"],
    "seeds": 50,
    "identity_models": ["heisenberg3", "heisenberg5", "su2"],
    "rockland_models": ["heisenberg3", "heisenberg5", "bimodule_bad", "levi_civita_bad"],
    "expect": "auto",
    "N": [8, 16, 32],
    "lambdas": [],
    "tol": 1e-8,
    "max_level": 6,
    "mode_range": 6,
    "seeds_s1": 100,
    "loops": None,
    "gamma": 3.0,
    "lam": 1.0,
    "out": None,
}


# ---------------------------------------------------------------------------
# config and output


def _validate(cfg: dict) -> dict:
    unknown = set(cfg) - set(DEFAULTS) - {"suites"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if not cfg.get("suites"):
        raise ConfigError("no suite selected")
    for s in cfg["suites"]:
        if s not in RUNNERS:
            raise ConfigError(f"unknown suite {s!r}")
    if cfg["seeds"] < 0 or cfg["seeds_s1"] < 0 or cfg["max_level"] < 0 or cfg["mode_range"] < 0:
        raise ConfigError("counts must be nonnegative")
    if any(n < 4 for n in cfg["N"]):
        raise ConfigError("truncation N must be at least 4")
    if not cfg["tol"] > 0:
        raise ConfigError("tolerance must be positive")
    if cfg["lam"] == 0:
        raise ConfigError("lambda must be nonzero")
    if cfg["expect"] not in ("auto", "pass", "fail"):
        raise ConfigError("expect must be auto, pass or fail")
    try:
        cfg["gamma"] = complex(cfg["gamma"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("gamma must be a number") from exc
    return cfg


def _write(result: SuiteResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    body = {"schema": SCHEMA, "suite": result.suite, "status": result.status,
            "first_failure": result.first_failure, "report": result.report}
    (out / f"{result.suite}.json").write_text(json.dumps(body, indent=1, sort_keys=True, default=str) + "\n")
    for stem, (header, rows) in result.tables.items():
        with open(out / f"{stem}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


def run(cfg: dict, stream=None) -> int:
    stream = stream or sys.stdout
    cfg = _validate({**DEFAULTS, **cfg})
    codes = []
    for s in cfg["suites"]:
        res = RUNNERS[s](cfg)
        line = f"{s}: {res.status}"
        if res.first_failure:
            line += f" ({res.first_failure})"
        print(line, file=stream)
        if cfg["out"]:
            _write(res, Path(cfg["out"]))
        codes.append(res.exit_code)
    if EXIT_FAIL in codes:
        return EXIT_FAIL
    if EXIT_INCONCLUSIVE in codes:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bismutlab", description="Verification suites for adiabatic Dirac operators.")
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with config keys; flags override it")
    common.add_argument("--out", type=Path, help="directory for JSON reports and CSV tables")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("verify-gfd", parents=[common], help="finite part equals the global formula")
    g.add_argument("--seeds", type=int)
    g.add_argument("--models", type=_csv_list(str))
    g.add_argument("--laurent", action="store_true", help="also check the Laurent support")

    w = sub.add_parser("weitzenbock", parents=[common], help="curvature identities")
    w.add_argument("--models", dest="identity_models", type=_csv_list(str))

    r = sub.add_parser("rockland", parents=[common], help="sampled Rockland test")
    r.add_argument("--model", dest="rockland_models", action="append")
    r.add_argument("--expect", choices=("auto", "pass", "fail"))
    r.add_argument("--N", type=_csv_list(int))
    r.add_argument("--lambdas", type=_csv_list(float))
    r.add_argument("--tol", type=float, help="singular-value threshold for a witness")

    h = sub.add_parser("hopf", parents=[common], help="spectra and kernel on S^3")
    h.add_argument("--max-level", type=int)

    s = sub.add_parser("s1-kernel", parents=[common], help="Fourier-mode kernel versus block oracle")
    s.add_argument("--seeds", dest="seeds_s1", type=int)
    s.add_argument("--max-level", type=int)
    s.add_argument("--mode-range", type=int)

    i = sub.add_parser("index", parents=[common], help="winding arithmetic and twist disjointness")
    i.add_argument("--loops", type=Path, help="CSV with columns component,t,re,im")
    i.add_argument("--gamma", type=complex)
    i.add_argument("--lam", type=float)

    sub.add_parser("all", parents=[common], help="every suite")
    return p


def config_from_args(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    cfg = {}
    if args.config:
        try:
            cfg.update(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    for k, v in vars(args).items():
        if k in DEFAULTS and v is not None and k != "config":
            cfg[k] = v
    if args.command == "all":
        cfg.setdefault("suites", list(SUITES))
    elif args.command == "verify-gfd" and args.laurent:
        cfg["suites"] = ["verify-gfd", "laurent"]
    else:
        cfg["suites"] = [args.command]
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"bismutlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
