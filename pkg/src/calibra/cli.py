"""Batch verification runner.

Subcommands:
  algebra selftest                      identity battery on the flat models
  verify stenzel --immersion ... --p P --n N
  verify g2 --mode {assoc,coassoc} --surface ...
  verify spin7 --surface ...
  catalog list

Human-readable progress goes to stderr; the JSON report document goes to
--out PATH or stdout.  Exit code 0 iff every verdict passes, 1 on
verification failure (report still emitted), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .report import DefectReport

DEFAULT_TOL = 1e-8


def _env_tol() -> float:
    return float(os.environ.get("CALIBRA_TOL", DEFAULT_TOL))


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# algebra selftest
# ---------------------------------------------------------------------------

def run_algebra_selftest(trials: int = 1000, seed: int = 0) -> DefectReport:
    from . import octonion as oc
    from .exterior import form_from_dict, interior, sharp, wedge, flat

    rng = np.random.default_rng(seed)
    g2 = oc.g2_structure()
    s7 = oc.spin7_structure()
    table = oc.standard_octonions()
    defects = {}
    counts = {}

    # octonion table sanity
    err = 0.0
    for _ in range(trials):
        x, y = rng.standard_normal(8), rng.standard_normal(8)
        err = max(err, abs(np.linalg.norm(table.multiply(x, y))
                           - np.linalg.norm(x) * np.linalg.norm(y)))
        err = max(err, np.abs(table.multiply(x, table.multiply(x, y))
                              - table.multiply(table.multiply(x, x), y)).max())
    defects["octonion_axioms"] = err
    counts["octonion_axioms"] = 2 * trials

    # associator two routes and the metric identities
    err_assoc = err_phi = err_Phi = err_tc = 0.0
    for _ in range(trials):
        u, v, w = rng.standard_normal((3, 7))
        route1 = oc.associator(g2, u, v, w)
        route2 = -2.0 * sharp(g2.space, oc.assoc_defect(g2, u, v, w))
        err_assoc = max(err_assoc, np.abs(route1 - route2).max())
        cr = oc.cross7(g2, u, v)
        err_phi = max(err_phi, abs(g2.phi(u, v, w) - g2.space.inner(cr, w)))
        lhs = oc.cross7(g2, u, oc.cross7(g2, v, w))
        rhs = (-g2.space.inner(u, v) * w + g2.space.inner(u, w) * v
               - sharp(g2.space, oc.assoc_defect(g2, u, v, w)))
        err_tc = max(err_tc, np.abs(lhs - rhs).max())
        a, b, c, y = rng.standard_normal((4, 8))
        X = oc.triple_cross(s7, a, b, c)
        err_Phi = max(err_Phi, abs(s7.Phi(a, b, c, y) - s7.space.inner(X, y)))
    defects["associator_dual_route"] = err_assoc
    defects["phi_metric_identity"] = err_phi
    defects["Phi_metric_identity"] = err_Phi
    defects["triple_cross_expansion"] = err_tc
    counts["associator_dual_route"] = trials
    counts["metric_identities"] = 3 * trials

    # pi7 projector
    M = oc.pi7_matrix(s7)
    defects["pi7_idempotence"] = float(np.abs(M @ M - M).max())
    rank = int(np.sum(np.linalg.eigvalsh((M + M.T) / 2) > 0.5))
    defects["pi7_rank_error"] = float(abs(rank - 7))
    counts["pi7"] = 2

    # comass of the three calibrations
    comass_margin = 0.0
    for form, k in ((g2.phi, 3), (g2.star_phi, 4), (s7.Phi, 4)):
        m = oc.comass_check(form, k, trials=10_000, rng=rng)
        comass_margin = max(comass_margin, m - 1.0)
    defects["comass_excess"] = comass_margin
    counts["comass_frames"] = 30_000
    defects["comass_attained"] = abs(
        g2.phi(*np.eye(7)[:3]) - 1.0) + abs(s7.Phi(*np.eye(8)[4:]) - 1.0)

    # plane-intersection closure checks
    err_cl = 0.0
    for _ in range(200):
        u, v = rng.standard_normal((2, 7))
        q, _ = np.linalg.qr(np.array([u, v]).T)
        u, v = q.T
        w = oc.cross7(g2, u, v)
        plane = np.array([u, v, w / np.linalg.norm(w)])
        a = plane.T @ rng.standard_normal(3)
        b = plane.T @ rng.standard_normal(3)
        cr = oc.cross7(g2, a, b)
        resid = cr - plane.T @ (plane @ cr)
        err_cl = max(err_cl, np.linalg.norm(resid) / max(np.linalg.norm(cr), 1e-12))
        aa, bb, cc = rng.standard_normal((3, 8))
        X = oc.triple_cross(s7, aa, bb, cc)
        P4 = np.array([aa, bb, cc, X])
        d1 = P4.T @ rng.standard_normal(4)
        d2 = P4.T @ rng.standard_normal(4)
        d3 = P4.T @ rng.standard_normal(4)
        X2 = oc.triple_cross(s7, d1, d2, d3)
        resid = X2 - P4.T @ np.linalg.solve(P4 @ P4.T, P4 @ X2)
        err_cl = max(err_cl, np.linalg.norm(resid) / max(np.linalg.norm(X2), 1e-12))
    defects["plane_closure"] = err_cl
    counts["plane_closure"] = 400

    exact = 1e-12
    verdicts = {
        "octonion_axioms": defects["octonion_axioms"] <= exact * 10,
        "associator_dual_route": defects["associator_dual_route"] <= exact,
        "phi_metric_identity": defects["phi_metric_identity"] <= exact,
        "Phi_metric_identity": defects["Phi_metric_identity"] <= exact,
        "triple_cross_expansion": defects["triple_cross_expansion"] <= exact,
        "pi7_idempotence": defects["pi7_idempotence"] <= exact,
        "pi7_rank": defects["pi7_rank_error"] == 0,
        "comass": defects["comass_excess"] <= 1e-9,
        "comass_attained": defects["comass_attained"] <= exact,
        "plane_closure": defects["plane_closure"] <= 1e-10,
    }
    for name, n in counts.items():
        _log(f"selftest {name}: {n} checks")
    return DefectReport(
        structure="flat-models", immersion="none", immersion_params={},
        samples=trials, defects=defects, tolerance=exact, verdicts=verdicts,
        seed=seed)


# ---------------------------------------------------------------------------
# stenzel verification
# ---------------------------------------------------------------------------

def _stenzel_immersion(args):
    from . import immersions as im

    name = args.immersion
    if name == "equator":
        return im.catalog("equator", p=args.p, n=args.n)
    if name == "clifford_torus":
        return im.catalog("clifford_torus", n=args.n)
    if name == "latitude_sphere":
        return im.catalog("latitude_sphere", p=args.p, n=args.n, radius=args.radius)
    if name == "veronese":
        return im.catalog("veronese")
    if name == "graph_perturbation":
        return im.catalog("graph_perturbation", p=args.p, n=args.n,
                          amplitude=args.amplitude)
    raise SystemExit(2)


def run_stenzel(imm, profile_name: str, samples: int, tol: float,
                seed: int = 0) -> DefectReport:
    from .stenzel import PROFILES, slag_defect

    profile = PROFILES[profile_name]()
    rep = slag_defect(imm, profile, samples=samples, seed=seed)
    defects = {"lagrangian": rep.lagrangian_defect, "special": rep.special_defect}
    verdicts = {"lagrangian": rep.lagrangian_defect <= tol,
                "special": rep.special_defect <= tol}
    return DefectReport(
        structure=f"stenzel(T*S^{imm.ambient}, profile={profile_name})",
        immersion=imm.name, immersion_params=dict(imm.params), samples=samples,
        defects=defects, tolerance=tol, verdicts=verdicts, seed=seed,
        extra={"phase_power": rep.phase_power})


# ---------------------------------------------------------------------------
# exceptional-holonomy verification
# ---------------------------------------------------------------------------

def _surface(name: str, args) -> "object":
    from . import immersions as im

    if name == "equator":
        return im.catalog("equator", p=2, n=4)
    if name == "clifford_torus":
        return im.catalog("clifford_torus", n=4)
    if name == "latitude_sphere":
        return im.catalog("latitude_sphere", p=2, n=4, radius=args.radius)
    if name == "veronese":
        return im.catalog("veronese")
    if name == "graph_perturbation":
        return im.catalog("graph_perturbation", p=2, n=4, amplitude=args.amplitude)
    raise SystemExit(2)


def _fiber_values(rng, count: int, span: float = 2.0) -> np.ndarray:
    vals = span * (2.0 * rng.random(count) - 1.0)
    vals[0] = 0.0
    return vals


def run_g2(imm, mode: str, samples: int, tol: float, seed: int = 0,
           profile: str = "flat") -> DefectReport:
    from . import bs_g2
    from .immersions import sample_grid

    structure = bs_g2.flat_bs_g2() if profile == "flat" else bs_g2.curved_bs_g2()
    rng = np.random.default_rng(seed)
    grid = sample_grid(imm, samples, seed=seed)
    if mode == "assoc":
        worst = 0.0
        t1s = _fiber_values(rng, samples)
        for s, t1 in zip(grid, t1s):
            point = bs_g2.surface_point(imm, s)
            defect, _ = bs_g2.associative_defect(point, structure, float(t1))
            worst = max(worst, float(np.abs(defect.coeffs).max()))
        defects = {"associative": worst}
        verdicts = {"associative": worst <= tol}
    else:
        worst = np.zeros(4)
        worst_rev = np.zeros(4)
        t2s = _fiber_values(rng, samples)
        t3s = _fiber_values(rng, samples)
        for s, t2, t3 in zip(grid, t2s, t3s):
            point = bs_g2.surface_point(imm, s)
            vals = np.abs(bs_g2.coassociative_defect(point, structure,
                                                     float(t2), float(t3)))
            worst = np.maximum(worst, vals)
            vals_rev = np.abs(bs_g2.coassociative_defect(
                point.orientation_reversed(), structure, float(t2), float(t3)))
            worst_rev = np.maximum(worst_rev, vals_rev)
        best = worst if worst[2:].max() <= worst_rev[2:].max() else worst_rev
        defects = {f"coassociative_{i}": float(best[i]) for i in range(4)}
        verdicts = {"coassociative_auto": bool(best[:2].max() <= 1e-10),
                    "coassociative": bool(best[2:].max() <= tol)}
    return DefectReport(
        structure=f"asd-bundle-g2(profile={structure.name}, mode={mode})",
        immersion=imm.name, immersion_params=dict(imm.params), samples=samples,
        defects=defects, tolerance=tol, verdicts=verdicts, seed=seed)


def run_spin7(imm, samples: int, tol: float, seed: int = 0,
              profile: str = "flat") -> DefectReport:
    from . import bs_spin7
    from .bs_g2 import surface_point
    from .immersions import sample_grid

    structure = (bs_spin7.flat_bs_spin7() if profile == "flat"
                 else bs_spin7.curved_bs_spin7())
    rng = np.random.default_rng(seed)
    grid = sample_grid(imm, samples, seed=seed)
    t1s = _fiber_values(rng, samples)
    t2s = _fiber_values(rng, samples)
    worst_eta = 0.0
    worst_closure = 0.0
    agree = True
    for s, t1, t2 in zip(grid, t1s, t2s):
        point = surface_point(imm, s)
        cd = bs_spin7.cayley_defect(point, structure, float(t1), float(t2))
        frame = bs_spin7.cayley_frame(point, float(t1), float(t2))
        resid = bs_spin7.x_closure_check(frame, structure.at(float(np.hypot(t1, t2))))
        worst_eta = max(worst_eta, cd.norm())
        worst_closure = max(worst_closure, resid)
        agree &= (cd.norm() <= tol) == (resid <= tol)
    defects = {"cayley": worst_eta, "x_closure": worst_closure}
    verdicts = {"cayley": worst_eta <= tol, "x_closure": worst_closure <= tol,
                "verifiers_agree": agree}
    return DefectReport(
        structure=f"spinor-bundle-spin7(profile={structure.name})",
        immersion=imm.name, immersion_params=dict(imm.params), samples=samples,
        defects=defects, tolerance=tol, verdicts=verdicts, seed=seed)


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="calibra",
        description="numerical verification of calibrated subbundle constructions")
    ap.add_argument("--version", action="version", version=f"calibra {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="flat-model identity batteries")
    alg_sub = alg.add_subparsers(dest="algebra_command", required=True)
    selftest = alg_sub.add_parser("selftest", help="run all algebra invariants")
    _common_flags(selftest)
    selftest.add_argument("--trials", type=int, default=1000)

    cat = sub.add_parser("catalog", help="immersion catalog")
    cat_sub = cat.add_subparsers(dest="catalog_command", required=True)
    cat_sub.add_parser("list", help="list catalog immersions")

    ver = sub.add_parser("verify", help="verify a calibration condition")
    ver_sub = ver.add_subparsers(dest="target", required=True)

    st = ver_sub.add_parser("stenzel", help="conormal-bundle verification")
    _common_flags(st)
    st.add_argument("--immersion", required=True,
                    choices=["equator", "clifford_torus", "latitude_sphere",
                             "veronese", "graph_perturbation"])
    st.add_argument("--p", type=int, default=2)
    st.add_argument("--n", type=int, default=3)
    st.add_argument("--profile", choices=["flat", "quadratic"], default="flat")
    st.add_argument("--radius", type=float, default=0.8)
    st.add_argument("--amplitude", type=float, default=0.1)

    g2 = ver_sub.add_parser("g2", help="anti-self-dual-bundle verification")
    _common_flags(g2)
    g2.add_argument("--mode", choices=["assoc", "coassoc"], required=True)
    g2.add_argument("--surface", required=True,
                    choices=["equator", "clifford_torus", "latitude_sphere",
                             "veronese", "graph_perturbation"])
    g2.add_argument("--profile", choices=["flat", "curved"], default="flat")
    g2.add_argument("--radius", type=float, default=0.8)
    g2.add_argument("--amplitude", type=float, default=0.1)

    sp = ver_sub.add_parser("spin7", help="spinor-bundle verification")
    _common_flags(sp)
    sp.add_argument("--surface", required=True,
                    choices=["equator", "clifford_torus", "latitude_sphere",
                             "veronese", "graph_perturbation"])
    sp.add_argument("--profile", choices=["flat", "curved"], default="flat")
    sp.add_argument("--radius", type=float, default=0.8)
    sp.add_argument("--amplitude", type=float, default=0.1)
    return ap


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the report (non-deterministic)")


def _emit(report: DefectReport, args) -> int:
    text = report.to_json(include_timing=args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for cond, ok in report.verdicts.items():
        _log(f"{'PASS' if ok else 'FAIL'} {cond}: max defect "
             f"{report.defects.get(cond, report.defects.get(cond.rstrip('_0123456789'), 0.0)):.3e}")
    return 0 if report.passed else 1


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = args.tol if getattr(args, "tol", None) is not None else _env_tol()
    t0 = time.perf_counter()
    if args.command == "catalog":
        from .immersions import CATALOG_NAMES
        for name in CATALOG_NAMES:
            print(name)
        return 0
    if args.command == "algebra":
        report = run_algebra_selftest(trials=args.trials, seed=args.seed)
    elif args.command == "verify" and args.target == "stenzel":
        imm = _stenzel_immersion(args)
        report = run_stenzel(imm, args.profile, args.samples, tol, seed=args.seed)
    elif args.command == "verify" and args.target == "g2":
        imm = _surface(args.surface, args)
        report = run_g2(imm, args.mode, args.samples, tol, seed=args.seed,
                        profile=args.profile)
    elif args.command == "verify" and args.target == "spin7":
        imm = _surface(args.surface, args)
        report = run_spin7(imm, args.samples, tol, seed=args.seed,
                           profile=args.profile)
    else:  # pragma: no cover - argparse enforces choices
        return 2
    report.wall_time_s = time.perf_counter() - t0
    return _emit(report, args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
