"""Command-line front end: reproducible CSV/JSON data products.

Float output is fixed at 17 significant digits and JSON keys are sorted, so
identical configurations produce byte-identical files.  Exit codes: 0 ok,
1 usage error, 2 numerical non-convergence, 3 reference-fixture mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import potential as pot
from .boundary import ConvergenceError, asymptotic_profile
from .potential import PhysicalParams, build_potential
from .spectral import (
    EigenstateRecord,
    ScalingCheckError,
    bound_state_norm_and_tail,
    eigenfunction,
    find_negative_spectrum,
    phase_shift_grid,
    scaling_check,
)
from .wavepacket import (
    default_k_grid,
    default_sigma_grid,
    evolve_many,
    gaussian_packet,
    observables,
    project,
)

# Reference values for the regression fixture (dimensionless eigenvalues of
# the standard cliff, the deep-state exterior probability for the fourth
# root, and the quadruple-scaling mismatch of the second/fourth pair).
REFERENCE_SPECTRUM = (
    -72.6416, -210.342, -715.831, -841.391, -2863.33, -3365.56,
    -11453.3, -13462.3, -45813.2, -53849.0, -183253.0,
)
REFERENCE_TAIL_PROBABILITY = 3.174e-16
REFERENCE_PAIR = (-210.342, -841.391)
REFERENCE_PAIR_RATIO_ERROR = 2.7e-5
SPECTRUM_RTOL = 1e-4
TAIL_RTOL = 0.05
PAIR_ERROR_ATOL = 0.5e-5


@dataclass
class RunConfig:
    command: str
    parameters: dict
    output_dir: Path
    physical: PhysicalParams = field(default_factory=PhysicalParams)


# ---------------------------------------------------------------------------
# deterministic serialization


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps_stable(obj, indent: int = 0) -> str:
    """JSON with sorted keys and fixed 17-significant-digit floats."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",\n".join(
            f'{pad}  "{k}": {dumps_stable(v, indent + 2).lstrip()}' for k, v in items)
        return f"{pad}{{\n{inner}\n{pad}}}" if items else f"{pad}{{}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        inner = ",\n".join(f"{pad}  {dumps_stable(v, indent + 2).lstrip()}" for v in seq)
        return f"{pad}[\n{inner}\n{pad}]" if seq else f"{pad}[]"
    if isinstance(obj, bool) or obj is None:
        return pad + json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return pad + str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return pad + format_float(float(obj))
    if isinstance(obj, str):
        return pad + json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_json(path: Path, obj) -> None:
    path.write_text(dumps_stable(obj) + "\n", encoding="utf-8", newline="\n")


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = [",".join(header)]
    for vals in zip(*columns):
        rows.append(",".join(format_float(v) for v in vals))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_potential(cfg: RunConfig) -> int:
    blocks = cfg.parameters["blocks"]
    samples = cfg.parameters["samples"]
    sigma_max = cfg.parameters["sigma_max"]
    spec = build_potential(blocks)
    sig, v = [], []
    for seg in reversed(spec.segments):     # ascending sigma
        pts = np.linspace(seg.sigma_left, seg.sigma_right, samples + 2)
        sig.append(pts)
        v.append(np.full(pts.size, -seg.kappa_sq))
    if sigma_max > 1.0:
        pts = np.linspace(1.0, sigma_max, samples + 2)
        sig.append(pts)
        v.append(np.zeros(pts.size))
    out = cfg.output_dir / "potential.csv"
    write_csv(out, ["sigma", "v"], [np.concatenate(sig), np.concatenate(v)])
    print(out)
    return 0


def _cmd_profiles(cfg: RunConfig) -> int:
    spec = build_potential(max(cfg.parameters["blocks"], 1))
    prof = asymptotic_profile(spec, cfg.parameters["kind"], cfg.parameters["blocks"],
                              cfg.parameters["samples_per_segment"])
    base = cfg.output_dir / f"profile_{prof.kind}"
    write_csv(base.with_suffix(".csv"), ["sigma", "value", "deriv"],
              [prof.grid, prof.values, prof.derivs])
    write_json(base.with_suffix(".json"), {
        "kind": prof.kind,
        "block_peaks": list(prof.block_peaks),
        "partial_norms": list(prof.partial_norms),
    })
    print(base.with_suffix(".csv"))
    print(base.with_suffix(".json"))
    return 0


def _cmd_eigen(cfg: RunConfig) -> int:
    spec = build_potential()
    rec = eigenfunction(spec, cfg.parameters["lam"],
                        sigma_max=cfg.parameters["sigma_max"],
                        samples=cfg.parameters["samples"])
    out = cfg.output_dir / f"eigen_{format_float(cfg.parameters['lam'])}.csv"
    write_csv(out, ["sigma", "psi"], [rec.grid, rec.values])
    print(out)
    return 0


def _cmd_phase(cfg: RunConfig) -> int:
    lo, hi, n = cfg.parameters["lgrid"]
    spec = build_potential()
    lams = np.geomspace(lo, hi, n)
    delta = phase_shift_grid(spec, lams, unwrap=not cfg.parameters["no_unwrap"])
    out = cfg.output_dir / "phase.csv"
    write_csv(out, ["lambda", "delta"], [lams, delta])
    print(out)
    return 0


def _spectrum_payload(cfg: RunConfig, report) -> dict:
    return {
        "roots": list(report.roots),
        "residuals": list(report.residuals),
        "energies_physical": [cfg.physical.energy_from_lambda(r) for r in report.roots],
        "bracketing_grid": report.bracketing_grid,
        "pairing": [
            {"index_shallow": p.index_shallow, "index_deep": p.index_deep,
             "lam_shallow": p.lam_shallow, "lam_deep": p.lam_deep,
             "ratio": p.ratio, "rel_error": p.rel_error}
            for p in report.pairing
        ],
        "failures": [{"bracket": list(f["bracket"]), "error": f["error"]}
                     for f in report.failures],
    }


def _cmd_spectrum(cfg: RunConfig) -> int:
    spec = build_potential()
    report = find_negative_spectrum(spec, cfg.parameters["lmin"],
                                    cfg.parameters["lmax"], cfg.parameters["ppd"])
    out = cfg.output_dir / "spectrum.json"
    write_json(out, _spectrum_payload(cfg, report))
    print(out)
    return 0


def _cmd_scaling_check(cfg: RunConfig) -> int:
    spec = build_potential()
    report = find_negative_spectrum(spec, cfg.parameters["lmin"],
                                    cfg.parameters["lmax"], cfg.parameters["ppd"])
    try:
        pairs = scaling_check(report, cfg.parameters["depth_threshold"],
                              cfg.parameters["rel_tol"])
        missing = []
    except ScalingCheckError as exc:
        pairs, missing = [], [str(exc)]
    out = cfg.output_dir / "scaling_check.json"
    write_json(out, {
        "depth_threshold": cfg.parameters["depth_threshold"],
        "rel_tol": cfg.parameters["rel_tol"],
        "pairs": [{"lam_shallow": p.lam_shallow, "lam_deep": p.lam_deep,
                   "ratio": p.ratio, "rel_error": p.rel_error} for p in pairs],
        "missing": missing,
    })
    print(out)
    return 0 if not missing else 3


def _cmd_evolve(cfg: RunConfig) -> int:
    conf_path = Path(cfg.parameters["config"])
    conf = json.loads(conf_path.read_text(encoding="utf-8"))
    center = conf.get("center", 3.0)
    width = conf.get("width", 0.3)
    momentum = conf.get("momentum", -8.0)
    taus = conf.get("tau_list", [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3])
    grid = np.linspace(conf.get("sigma_min", 2.0 ** -10),
                       conf.get("sigma_max", 8.0),
                       conf.get("n_sigma", 2 ** 14))
    n_k = conf.get("n_k", 2 ** 12)
    spec = build_potential()
    packet = gaussian_packet(center, width, momentum, grid)
    bound = ()
    if conf.get("include_bound", True):
        rep = find_negative_spectrum(spec, conf.get("bound_lambda_min", -2e5), -10.0)
        bound = rep.roots
    coeffs = project(spec, packet, default_k_grid(momentum, width, n_k),
                     bound_lambdas=bound)
    states = evolve_many(coeffs, taus)
    summary = []
    for i, st in enumerate(states):
        out = cfg.output_dir / f"evolve_{i:03d}.csv"
        write_csv(out, ["sigma", "re", "im", "abs2"],
                  [st.grid, st.values.real, st.values.imag, np.abs(st.values) ** 2])
        ob = observables(st)
        summary.append({
            "tau": st.tau,
            "file": out.name,
            "norm": ob["norm"],
            "mean_position": ob["mean_position"],
            "momentum_sign": ob["mean_momentum_sign"],
            "mean_momentum": ob["mean_momentum"],
            "prob_exterior": ob["prob_exterior"],
        })
        print(out)
    out = cfg.output_dir / "evolve_summary.json"
    write_json(out, {
        "config": {"center": center, "width": width, "momentum": momentum,
                   "n_sigma": grid.size, "n_k": n_k,
                   "include_bound": bool(len(bound))},
        "reconstruction_error": coeffs.reconstruction_error,
        "spectral_norm_sq": coeffs.spectral_norm_sq,
        "states": summary,
    })
    print(out)
    return 0


def _cmd_report(cfg: RunConfig) -> int:
    spec = build_potential()
    checks = []

    # potential data (block/stage geometry)
    _cmd_potential(RunConfig("potential", {"blocks": 8, "samples": 16,
                                           "sigma_max": 1.5}, cfg.output_dir))

    # scattering eigenfunctions at lambda = 20 and 40
    for lam in (20.0, 40.0):
        rec = eigenfunction(spec, lam, sigma_max=2.0, samples=2048)
        out = cfg.output_dir / f"eigen_{format_float(lam)}.csv"
        write_csv(out, ["sigma", "psi"], [rec.grid, rec.values])
        print(out)

    # spectrum against the reference list
    report = find_negative_spectrum(spec, -2e5, -10.0, 64)
    write_json(cfg.output_dir / "spectrum.json", _spectrum_payload(cfg, report))
    n_ok = len(report.roots) == len(REFERENCE_SPECTRUM)
    rel = [abs(r - p) / abs(p) for r, p in zip(report.roots, REFERENCE_SPECTRUM)]
    checks.append({
        "name": "spectrum",
        "computed_roots": list(report.roots),
        "reference_roots": list(REFERENCE_SPECTRUM),
        "max_rel_error": max(rel) if rel else math.inf,
        "tolerance": SPECTRUM_RTOL,
        "passed": bool(n_ok and rel and max(rel) <= SPECTRUM_RTOL),
    })

    # quadruple-scaling pair
    pair = next((p for p in report.pairing
                 if abs(p.lam_shallow - REFERENCE_PAIR[0]) < 1.0), None)
    pair_err = pair.rel_error if pair else math.inf
    checks.append({
        "name": "scaling_pair",
        "pair": list(REFERENCE_PAIR),
        "computed_ratio_error": pair_err,
        "reference_ratio_error": REFERENCE_PAIR_RATIO_ERROR,
        "tolerance_abs": PAIR_ERROR_ATOL,
        "passed": bool(abs(pair_err - REFERENCE_PAIR_RATIO_ERROR) <= PAIR_ERROR_ATOL),
    })

    # bound states for the first and fourth roots, with tail probability
    tail = math.nan
    if len(report.roots) >= 4:
        for idx in (0, 3):
            lam = report.roots[idx]
            rec = eigenfunction(spec, lam, sigma_max=1.5, samples=2048)
            out = cfg.output_dir / f"bound_{idx + 1}.csv"
            write_csv(out, ["sigma", "psi"], [rec.grid, rec.values])
            print(out)
        info = bound_state_norm_and_tail(spec, report.roots[3])
        tail = info["tail_probability"]
    checks.append({
        "name": "tail_probability",
        "computed": tail,
        "reference": REFERENCE_TAIL_PROBABILITY,
        "tolerance_rel": TAIL_RTOL,
        "passed": bool(abs(tail - REFERENCE_TAIL_PROBABILITY)
                       <= TAIL_RTOL * REFERENCE_TAIL_PROBABILITY),
    })

    ok = all(c["passed"] for c in checks)
    out = cfg.output_dir / "report_summary.json"
    write_json(out, {"checks": checks, "all_passed": ok})
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}")
    print(out)
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse default exits 2; the contract is 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _lgrid(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        lo, hi, num = float(a), float(b), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid spec {text!r}, want lo:hi:n") from exc
    if not (0 < lo < hi and num >= 2):
        raise argparse.ArgumentTypeError("need 0 < lo < hi and n >= 2")
    return lo, hi, num


def build_parser() -> _Parser:
    p = _Parser(prog="cliffspec",
                description="Spectral data products for the self-similar cliff "
                            "potential on the half-line.")
    p.add_argument("--output-dir", default=".", help="directory for output files")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=0.5)
    p.add_argument("--x0", type=float, default=1.0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("potential", help="sample v(sigma) = -kappa^2 (step data)")
    q.add_argument("--blocks", type=int, default=8)
    q.add_argument("--samples", type=int, default=16, help="interior points per segment")
    q.add_argument("--sigma-max", type=float, default=1.5)

    q = sub.add_parser("profiles", help="zero-energy profiles and their norms")
    q.add_argument("--kind", choices=("zeta", "phi"), required=True)
    q.add_argument("--blocks", type=int, default=20)
    q.add_argument("--samples-per-segment", type=int, default=64)

    q = sub.add_parser("eigen", help="sampled eigenfunction at one lambda")
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("--sigma-max", type=float, default=2.0)
    q.add_argument("--samples", type=int, default=2048)

    q = sub.add_parser("phase", help="scattering phase shift on a lambda grid")
    q.add_argument("--lgrid", type=_lgrid, default=(0.01, 100.0, 512),
                   help="geometric grid lo:hi:n, lambda > 0")
    q.add_argument("--no-unwrap", action="store_true")

    q = sub.add_parser("spectrum", help="negative spectrum scan")
    q.add_argument("--lmin", type=float, default=-2e5)
    q.add_argument("--lmax", type=float, default=-10.0)
    q.add_argument("--ppd", type=int, default=64, help="scan points per decade")

    q = sub.add_parser("scaling-check", help="verify the 4x eigenvalue pairing")
    q.add_argument("--lmin", type=float, default=-2e5)
    q.add_argument("--lmax", type=float, default=-10.0)
    q.add_argument("--ppd", type=int, default=64)
    q.add_argument("--depth-threshold", type=float, default=200.0)
    q.add_argument("--rel-tol", type=float, default=1e-3)

    q = sub.add_parser("evolve", help="spectral wave-packet evolution")
    q.add_argument("--config", required=True, help="JSON run configuration")

    sub.add_parser("report", help="full reproduction suite with fixture comparison")
    return p


_DISPATCH = {
    "potential": _cmd_potential,
    "profiles": _cmd_profiles,
    "eigen": _cmd_eigen,
    "phase": _cmd_phase,
    "spectrum": _cmd_spectrum,
    "scaling-check": _cmd_scaling_check,
    "evolve": _cmd_evolve,
    "report": _cmd_report,
}


def run(argv) -> int:
    """Parse argv, dispatch, and map failures to the documented exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "output_dir", "hbar", "mass", "x0")}
    try:
        physical = PhysicalParams(hbar=args.hbar, mass=args.mass, x0=args.x0)
    except ValueError as exc:
        print(f"cliffspec: error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = RunConfig(command=args.command, parameters=params,
                    output_dir=out_dir, physical=physical)
    try:
        return _DISPATCH[args.command](cfg)
    except ConvergenceError as exc:
        print(f"cliffspec: non-convergence: {exc} "
              f"(residual {exc.residual:.3e} after {exc.n_used} blocks)",
              file=sys.stderr)
        return 2
    except (pot.RangeError, ValueError, OSError) as exc:
        print(f"cliffspec: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
