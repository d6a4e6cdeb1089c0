"""Command-line entry point: ``thirring-walk <command> ...``.

Every command that writes files also writes ``manifest.json`` listing them.
Exit codes: 0 ok, 1 failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .core import TOL_ENV, WalkParams, principal_arccos, tol_scale, unitarity_error
from .oracle import build_dense, embed_on_ring, full_spectrum, gap_eigenvalues, residual
from .simulator import InitialState, SimulationConfig, build_initial, evolve
from .single_particle import SupportError, dispersion, eigenvector, walk_matrix
from .solutions import (
    NoBoundStateError,
    bound_state,
    continuous_bands,
    degeneracy_scan,
    localized_state,
    scan_bound_roots,
    scattering_state,
    stationary_solutions,
    transmission,
)
from .two_particle import omega_sr, symmetry_checks, two_eigenvector, w2_momentum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FIG4_CHI = (2 * math.pi / 3, 3 * math.pi / 7, -3 * math.pi / 7, -2 * math.pi / 3)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output helpers


def fmt(x) -> str:
    """Shortest round-trip decimal."""
    return repr(float(x))


class Writer:
    """Collects output files of one command and writes the manifest."""

    def __init__(self, out_dir, command: str, args: argparse.Namespace):
        self.out_dir = Path(out_dir) if out_dir else None
        self.command = command
        self.args = args
        self.files: list[str] = []
        self.started = datetime.now(timezone.utc).isoformat()
        if self.out_dir:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out_dir / name

    def csv(self, name: str, header, rows):
        if not self.out_dir:
            return
        with open(self.path(name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([v if isinstance(v, str) else fmt(v) for v in row])

    def json(self, name: str, payload):
        if not self.out_dir:
            return
        with open(self.path(name), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def manifest(self, extra=None):
        if not self.out_dir:
            return
        params = {k: v for k, v in vars(self.args).items() if k != "func"}
        payload = {
            "command": self.command,
            "version": __version__,
            "parameters": params,
            "seed": None,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "files": list(self.files),
            "tolerance_scale": tol_scale(),
            "tolerance_env": os.environ.get(TOL_ENV),
        }
        if extra:
            payload.update(extra)
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _angle(value, pi_units: bool) -> float:
    return float(value) * math.pi if pi_units else float(value)


def _angles(text: str | None, pi_units: bool) -> list[float]:
    if not text:
        return []
    return [_angle(v, pi_units) for v in text.split(",") if v.strip()]


def _params(args, chi: float = 0.0) -> WalkParams:
    if not 0.0 < args.mass < 1.0:
        raise UsageError(f"--mass must lie in (0, 1), got {args.mass}")
    return WalkParams(args.mass, chi)


def _maybe_plot(args, draw):
    if not getattr(args, "plot", False) or not args.out:
        return None
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping --plot", file=sys.stderr)
        return None
    fig = plt.figure(figsize=(6, 4.5))
    name = draw(fig)
    return name, fig


def _save_plot(writer: Writer, result):
    if result is None:
        return
    name, fig = result
    fig.savefig(writer.path(name), dpi=120, bbox_inches="tight")


# --------------------------------------------------------------------------
# commands


def cmd_bands(args) -> int:
    params = _params(args)
    chis = _angles(args.chi, args.pi_units)
    p_min = _angle(args.p_min, args.pi_units)
    p_max = _angle(args.p_max, args.pi_units) if args.p_max is not None else math.pi / 2
    if args.p_steps < 1:
        raise UsageError("--p-steps must be positive")
    for chi in chis:
        if abs(math.sin(chi)) < 1e-12:
            raise UsageError(f"chi={chi}: interaction trivial, no discrete spectrum")
    ps = np.linspace(p_min, p_max, args.p_steps)
    header = ["p", "band_edge_1", "band_edge_2", "band_edge_3", "band_edge_4"]
    header += [f"discrete_omega_{i + 1}" for i in range(len(chis))]
    rows, missing = [], 0
    for p in ps:
        b = continuous_bands(p, params)
        row = [p, *b["edges"]]
        for chi in chis:
            try:
                row.append(bound_state(p, chi, params.with_chi(chi), Z=4).omega)
            except (ValueError, NoBoundStateError):
                row.append(float("nan"))
                missing += 1
        rows.append(row)
    writer = Writer(args.out, "bands", args)
    writer.csv("bands.csv", header, rows)

    def draw(fig):
        ax = fig.add_subplot()
        arr = np.array(rows)
        for j in range(1, 5):
            ax.plot(arr[:, 0], arr[:, j], color="C0" if j < 3 else "C3")
        for j in range(5, arr.shape[1]):
            ax.plot(arr[:, 0], arr[:, j], "k")
        ax.set_xlabel("p")
        ax.set_ylabel("omega")
        return "bands.png"

    _save_plot(writer, _maybe_plot(args, draw))
    writer.manifest({"chi_values": chis, "discrete_missing": missing})
    if not args.out:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return EXIT_OK


def _amplitude_rows(state):
    for i, z in enumerate(state.z):
        row = [int(z)]
        for c in range(4):
            row += [state.amp[c, i].real, state.amp[c, i].imag]
        yield row


_AMP_HEADER = ["z"] + [f"{part}_{c}" for c in range(1, 5) for part in ("re", "im")]


def cmd_boundstate(args) -> int:
    chi = _angle(args.chi, args.pi_units)
    p = _angle(args.p, args.pi_units)
    params = _params(args, chi)
    if abs(math.sin(chi)) < 1e-12:
        sign = "1" if math.cos(chi) > 0 else "-1"
        raise UsageError(f"interaction trivial: e^{{i chi}}={sign}, no bound state")
    localized = any(abs(np.exp(1j * chi) - np.exp(s * 2j * p)) < 1e-9 for s in (1, -1))
    if localized:
        print("notice: exp(i chi) = exp(+-2ip), emitting the three-site localized state", file=sys.stderr)
        p_exact = p
        # snap chi onto the exact condition so the state is an exact eigenvector
        chi_exact = 2 * p if abs(np.exp(1j * chi) - np.exp(2j * p)) < 1e-9 else -2 * p
        sol = localized_state(p_exact, chi_exact, params, Z=max(1, args.window))
    else:
        try:
            sol = bound_state(p, chi, params, Z=args.window)
        except NoBoundStateError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_FAIL
    res = residual(sol)
    record = {
        "kind": sol.kind,
        "mass": args.mass,
        "chi": chi,
        "p": p,
        "k_re": None if sol.kind == "localized" else sol.k.real,
        "k_im": None if sol.kind == "localized" else sol.k.imag,
        "branch": sol.branch,
        "omega": sol.omega,
        "eigenvalue_re": sol.eigenvalue.real,
        "eigenvalue_im": sol.eigenvalue.imag,
        "decay_rate": sol.info.get("decay_rate"),
        "residual": res,
        "window": args.window,
    }
    writer = Writer(args.out, "boundstate", args)
    writer.json("solution.json", record)
    writer.csv("amplitudes.csv", _AMP_HEADER, _amplitude_rows(sol.state))
    writer.manifest()
    if not args.out:
        print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_scatter(args) -> int:
    chi = _angle(args.chi, args.pi_units)
    p = _angle(args.p, args.pi_units)
    k = _angle(args.k, args.pi_units)
    params = _params(args, chi)
    sol = scattering_state(p, k, chi, args.branch, params, Z=args.window)
    t = sol.transmission
    record = {
        "mass": args.mass,
        "chi": chi,
        "p": p,
        "k": k,
        "branch": sol.branch,
        "T_re": t.real,
        "T_im": t.imag,
        "abs_T": abs(t),
        "omega": sol.omega,
        "residual": residual(sol),
    }
    writer = Writer(args.out, "scatter", args)
    writer.json("scatter.json", record)
    writer.csv("amplitudes.csv", _AMP_HEADER, _amplitude_rows(sol.state))
    writer.manifest()
    if not args.out:
        print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_degeneracy(args) -> int:
    params = _params(args)
    p = _angle(args.p, args.pi_units)
    omega = _angle(args.omega, args.pi_units)
    result = degeneracy_scan(p, omega, params)
    record = {
        "mass": args.mass,
        "p": p,
        "omega": omega,
        "count": len(result["solutions"]),
        "solutions": [{"s": s, "r": r, "k": k} for s, r, k in result["solutions"]],
        "warning": result["warning"],
    }
    writer = Writer(args.out, "degeneracy", args)
    writer.json("degeneracy.json", record)
    writer.csv("degeneracy.csv", ["s", "r", "k"], ([str(s), str(r), k] for s, r, k in result["solutions"]))
    writer.manifest()
    if not args.out:
        print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_evolve(args) -> int:
    chi = _angle(args.chi, args.pi_units)
    params = _params(args, chi)
    initial = InitialState(kind=args.init, p0=_angle(args.p0, args.pi_units), width=args.width)
    try:
        config = SimulationConfig(params, L=args.size, steps=args.steps, initial=initial, boundary=args.boundary)
    except ValueError as err:
        raise UsageError(str(err)) from err
    if not args.out:
        raise UsageError("evolve needs --out-dir")
    state = build_initial(initial, config)
    every = args.snapshot_every or max(args.steps, 1)
    try:
        final, snaps = evolve(state, args.steps, config, snapshot_every=every)
    except SupportError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    writer = Writer(args.out, "evolve", args)
    L = config.L
    origin = L // 2
    x1, x2 = np.meshgrid(np.arange(L) - origin, np.arange(L) - origin, indexing="ij")
    summary = []
    for snap in snaps:
        mask = snap.prob > args.min_prob
        rows = zip(x1[mask].tolist(), x2[mask].tolist(), snap.prob[mask].tolist())
        writer.csv(
            f"prob_t{snap.t:05d}.csv", ["x1", "x2", "prob"],
            ([str(a), str(b), c] for a, b, c in rows),
        )
        summary.append({
            "t": snap.t,
            "total": snap.total,
            "diagonal_mass": snap.diagonal_mass,
            "std_y": snap.std_y(),
            "std_w": snap.std_w(),
        })
    writer.json("summary.json", {"snapshots": summary, "norm_final": final.norm()})

    def draw(fig):
        ax = fig.add_subplot()
        ax.imshow(snaps[-1].prob.T, origin="lower", cmap="viridis",
                  extent=(-origin, L - origin, -origin, L - origin))
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        return "prob_final.png"

    _save_plot(writer, _maybe_plot(args, draw))
    writer.manifest()
    return EXIT_OK


# --------------------------------------------------------------------------
# verification suite


def _check(name, value, tol, results):
    ok = bool(np.isfinite(value) and value <= tol)
    results.append((name, float(value), tol, ok))


def run_checks(level: str = "quick") -> list[tuple[str, float, float, bool]]:
    full = level == "full"
    s = tol_scale()
    rng = np.random.default_rng(20240101)
    results = []
    masses = (0.6, 0.7)

    err = 0.0
    for m in masses:
        prm = WalkParams(m)
        for p in np.linspace(-math.pi, math.pi, 9):
            err = max(err, unitarity_error(walk_matrix(p, prm)))
            for k in np.linspace(-math.pi, math.pi, 9):
                err = max(err, unitarity_error(w2_momentum(p, k, prm)))
    _check("unitarity W(p), W2(p,k)", err, 1e-12 * s, results)

    n_dense = 256 if full else 64
    prm = WalkParams(0.7)
    dense = build_dense(0.4, 1.1, prm, n_dense)
    _check(f"unitarity dense U2 N={n_dense}", dense.unitarity_error(), 1e-12 * s, results)

    grid = 50 if full else 10
    err = 0.0
    for m in masses:
        prm = WalkParams(m)
        for p in np.linspace(-3, 3, grid):
            for sgn in (1, -1):
                ev = eigenvector(p, sgn, prm)
                err = max(err, np.abs(walk_matrix(p, prm) @ ev.vec - ev.eigenvalue(prm) * ev.vec).max())
            for k in np.linspace(-3, 3, grid):
                for a in (1, -1):
                    for b in (1, -1):
                        v = two_eigenvector(p, k, a, b, prm).vec
                        lam = np.exp(-1j * omega_sr(p, k, a, b, prm))
                        err = max(err, np.abs(w2_momentum(p, k, prm) @ v - lam * v).max())
    _check("eigenvector residuals", err, 1e-12 * s, results)

    n_rand = 1000 if full else 100
    err = 0.0
    for _ in range(n_rand):
        p, k, chi = rng.uniform(-math.pi, math.pi, 3)
        for sgn in (1, -1):
            t = transmission(p, k, chi, sgn, prm)
            if not t.resonance:
                err = max(err, abs(abs(t.value) - 1))
    _check("|T+-| = 1 on real k", err, 1e-13 * s, results)

    err = 0.0
    for _ in range(100 if full else 10):
        p, k = rng.uniform(0.05, math.pi / 2 - 0.05), rng.uniform(0.05, math.pi / 2 - 0.05)
        chi = rng.uniform(-math.pi, math.pi)
        sol = scattering_state(p, k, chi, int(rng.choice([1, -1])), prm, Z=64)
        err = max(err, residual(sol))
    _check("scattering recurrence residual", err, 1e-10 * s, results)

    n_p = 100 if full else 12
    bad = 0
    gap_min = np.inf
    for chi in FIG4_CHI:
        prm_c = WalkParams(0.7, chi)
        for p in np.linspace(0.01, math.pi / 2 - 0.01, n_p):
            good = [r for r in scan_bound_roots(p, chi, prm_c) if r["abs_T"] <= 1e-10 * s]
            if len(good) != 1:
                bad += 1
                continue
            try:
                sol = bound_state(p, chi, prm_c, Z=16)
            except NoBoundStateError:
                bad += 1
                continue
            if abs(p - chi / 2) > 0.02:
                from .solutions import gap_distance

                gap_min = min(gap_min, gap_distance(sol.omega, p, prm_c))
    results.append(("bound-state uniqueness", float(bad), 0.0, bad == 0))
    results.append(("bound states inside gaps", float(gap_min), 0.0, bool(gap_min > 0)))

    err = 0.0
    for chi, p in ((FIG4_CHI[0], 0.3), (FIG4_CHI[2], 1.0)):
        prm_c = WalkParams(0.7, chi)
        try:
            sol = bound_state(p, chi, prm_c, Z=n_dense // 4)
        except NoBoundStateError:
            err = np.inf
            break
        spec = full_spectrum(build_dense(p, chi, prm_c, n_dense), "antisymmetric_p")
        idx = gap_eigenvalues(spec, p, prm_c)
        if len(idx) != 1:
            err = np.inf
            break
        err = max(err, abs(spec.eigenvalues[idx[0]] - sol.eigenvalue))
    _check(f"dense bound eigenvalue N={n_dense}", err, 1e-6 * s, results)

    err = 0.0
    for p in np.linspace(-1.4, 1.4, 20 if full else 5):
        for chi in (2 * p, -2 * p):
            err = max(err, residual(localized_state(p, chi, WalkParams(0.6, chi))))
    _check("localized states", err, 1e-13 * s, results)

    err = 0.0
    prm = WalkParams(0.6)
    for k in (0.4, 1.1, 2.3):
        for sol in stationary_solutions(prm, k, ny=64):
            for chi in (0.0, math.pi / 2, 2.0):
                err = max(err, residual(sol, chi=chi))
    _check("stationary states at p=0", err, 1e-10 * s, results)

    count = len(degeneracy_scan(math.pi / 6, 2.0, WalkParams(0.6))["solutions"])
    results.append(("degeneracy count at omega=2", float(count), 4.0, count == 4))

    sym = symmetry_checks(0.37, WalkParams(0.7))
    _check("symmetry identities", max(sym.values()), 1e-12 * s, results)
    return results


def cmd_verify(args) -> int:
    start = time.time()
    results = run_checks(args.level)
    width = max(len(r[0]) for r in results)
    failed = 0
    for name, value, tol, ok in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  value={value:.3e}  tol={tol:.1e}")
    print(f"{len(results) - failed}/{len(results)} checks passed in {time.time() - start:.1f}s")
    writer = Writer(args.out, "verify", args)
    writer.json("verify.json", [
        {"check": n, "value": v, "tolerance": t, "passed": ok} for n, v, t, ok in results
    ])
    writer.manifest()
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thirring-walk", description="Two-particle Thirring quantum walk.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, mass=True, out=True):
        if mass:
            sp.add_argument("--mass", type=float, required=True, help="mass parameter m in (0, 1)")
        sp.add_argument("--pi-units", action="store_true", help="angles are given in multiples of pi")
        if out:
            sp.add_argument("--out", "--out-dir", dest="out", default=None, help="output directory")

    sp = sub.add_parser("bands", help="continuous band edges and discrete spectrum over p")
    common(sp)
    sp.add_argument("--chi", default="", help="comma-separated couplings for discrete curves")
    sp.add_argument("--p-steps", type=int, default=200)
    sp.add_argument("--p-min", type=float, default=0.0)
    sp.add_argument("--p-max", type=float, default=None, help="default pi/2")
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(func=cmd_bands)

    sp = sub.add_parser("boundstate", help="bound (or localized) state at fixed p")
    common(sp)
    sp.add_argument("--chi", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--window", type=int, default=64, help="half-width Z of the z window")
    sp.set_defaults(func=cmd_boundstate)

    sp = sub.add_parser("scatter", help="scattering state and transmission coefficient")
    common(sp)
    sp.add_argument("--chi", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--branch", type=int, choices=(1, -1), default=1)
    sp.add_argument("--window", type=int, default=64)
    sp.set_defaults(func=cmd_scatter)

    sp = sub.add_parser("degeneracy", help="relative momenta sharing a quasi-energy")
    common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--omega", type=float, required=True)
    sp.set_defaults(func=cmd_degeneracy)

    sp = sub.add_parser("evolve", help="evolve two particles on the (x1, x2) lattice")
    common(sp)
    sp.add_argument("--chi", type=float, default=0.0)
    sp.add_argument("--init", choices=("singlet", "packet"), default="singlet")
    sp.add_argument("--p0", type=float, default=0.0, help="packet momentum (half total momentum)")
    sp.add_argument("--width", type=float, default=12.0, help="packet std in x1 + x2")
    sp.add_argument("--steps", type=int, default=32)
    sp.add_argument("--size", type=int, default=256)
    sp.add_argument("--snapshot-every", type=int, default=0, help="0: only initial and final")
    sp.add_argument("--boundary", choices=("guarded-open", "periodic"), default="guarded-open")
    sp.add_argument("--min-prob", type=float, default=0.0, help="omit CSV rows with prob <= this")
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("verify", help="run the invariant checks")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
