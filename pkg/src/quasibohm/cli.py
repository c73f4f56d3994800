"""Command-line front end: scenario presets, flat-file configs, deterministic
CSV/JSON emission, and the chained no-chaos audit."""

import argparse
import cmath
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, kernels
from .eigenbasis import PiecewiseBox, build_harmonic, build_infinite_well, build_numeric
from .ensemble import (
    equilibrium_distance,
    equilibrium_quantiles,
    evolve_ensemble,
    stratified_uniform,
)
from .errors import (
    CapabilityError,
    DomainError,
    InvalidParameterError,
    NodeProximityError,
    NumericError,
    QuasibohmError,
    TrajectorySingularityError,
)
from .lyapunov import lyapunov_ratio, lyapunov_two_trajectory, lyapunov_variational
from .spectrum import analyze_trajectory
from .state import SuperpositionState
from .trajectory import evolve_cdf, evolve_ode, evolve_ode_with_tangent

PRESET_NAMES = ("two-mode-box", "harmonic-three", "doublewell-five")

FLOAT_FMT = "%.17g"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NODE = 4


@dataclass
class RunConfig:
    scenario: str = "two-mode-box"
    potential: str = ""            # inline potential spec; empty = use preset
    coefficients: str = ""         # inline complex coefficients, comma separated
    x0: float | None = None
    # fine enough that O(dx^2) basis error stays below the 1e-6 cross-method gate
    grid_points: int = 32768
    count: int = 5
    t_max: float | None = None
    sample_dt: float | None = None
    out_dir: str = "."
    threads: int = 0
    ode_rtol: float = 1e-11
    ode_atol: float = 1e-13
    cdf_tol: float = 1e-12
    node_eps: float = 1e-12
    ensemble_n: int = 1000
    ensemble_kind: str = "uniform"  # uniform | quantile
    method: str = "CDF"
    dump_positions: bool = False
    extras: dict = field(default_factory=dict)

    def validate(self):
        for name in ("ode_rtol", "ode_atol", "cdf_tol", "node_eps"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.t_max is not None and self.t_max <= 0:
            raise InvalidParameterError("t_max must be positive")
        if self.sample_dt is not None and self.sample_dt <= 0:
            raise InvalidParameterError("sample_dt must be positive")


def preset(name):
    """Named scenario presets as RunConfig objects."""
    if name not in PRESET_NAMES:
        raise InvalidParameterError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        )
    return RunConfig(scenario=name)


def _parse_complex_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j")
        if tok:
            out.append(complex(tok))
    return out


def _parse_potential(text, cfg):
    """Inline potentials: 'well:L', 'harmonic:m,omega', or
    'box:a-b=V;b-c=V;...' (hard walls at the outer edges)."""
    kind, _, body = text.partition(":")
    if kind == "well":
        return ("well", float(body))
    if kind == "harmonic":
        m, omega = (float(v) for v in body.split(","))
        return ("harmonic", m, omega)
    if kind == "box":
        segments = []
        for part in body.split(";"):
            rng, _, v = part.partition("=")
            a, _, b = rng.partition("-")
            segments.append(((float(a), float(b)), float(v)))
        return ("box", segments)
    raise InvalidParameterError(f"cannot parse potential spec {text!r}")


def build_scenario(cfg):
    """Resolve a RunConfig into (state, x0, expanded-parameters dict)."""
    info = {"scenario": cfg.scenario}
    if cfg.potential:
        pot = _parse_potential(cfg.potential, cfg)
        coeffs = _parse_complex_list(cfg.coefficients)
        if not coeffs:
            raise InvalidParameterError("inline scenarios require coefficients")
        count = len(coeffs)
        if pot[0] == "well":
            basis = build_infinite_well(pot[1], count)
        elif pot[0] == "harmonic":
            basis = build_harmonic(pot[1], pot[2], count)
        else:
            box = PiecewiseBox(pot[1][0][0][0], pot[1][-1][0][1], pot[1])
            basis = build_numeric(box, cfg.grid_points, count)
        x0 = cfg.x0 if cfg.x0 is not None else 0.5 * (basis.x_lo + basis.x_hi)
        info["potential"] = cfg.potential
    elif cfg.scenario == "two-mode-box":
        basis = build_infinite_well(np.pi, 2)
        coeffs = [1.0, 1.0]
        x0 = 1.0
        info["potential"] = "infinite well, L=pi"
    elif cfg.scenario == "harmonic-three":
        basis = build_harmonic(1.0, 1.0, 3)
        coeffs = [0.6, 0.64j, 0.48]
        x0 = 0.3
        info["potential"] = "harmonic, m=omega=1"
    elif cfg.scenario == "doublewell-five":
        box = PiecewiseBox(
            0.0, 10.0, [((0.0, 4.5), 0.0), ((4.5, 5.5), 5.0), ((5.5, 10.0), 0.0)]
        )
        basis = build_numeric(box, cfg.grid_points, 5)
        coeffs = [cmath.exp(1j * th) / np.sqrt(5) for th in range(5)]
        x0 = 2.5
        info["potential"] = "double square well [0,10], barrier V=5 on [4.5,5.5]"
    else:
        raise InvalidParameterError(
            f"unknown scenario {cfg.scenario!r}; valid presets: {', '.join(PRESET_NAMES)}"
        )
    if cfg.coefficients and not cfg.potential:
        coeffs = _parse_complex_list(cfg.coefficients)
    if cfg.x0 is not None:
        x0 = cfg.x0
    state = SuperpositionState(
        basis, coeffs, eps_node=cfg.node_eps, cdf_xtol=cfg.cdf_tol
    )
    info.update(
        {
            "x0": x0,
            "coefficients": [[c.real, c.imag] for c in state.coefficients],
            "energies": list(basis.energies),
            "omegas": list(state.frequencies),
            "hbar": basis.hbar,
            "mass": basis.mass,
            "domain": [basis.x_lo, basis.x_hi],
            "n_frequencies": state.n,
        }
    )
    return state, float(x0), info


# -- config / manifest plumbing ---------------------------------------------


def load_config(path):
    """Flat key=value text, JSON config, or a previously emitted manifest."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if "config" in data:
            data = data["config"]
    else:
        data = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                key, _, value = line.partition("=")
                data[key.strip()] = value.strip()
    cfg = RunConfig()
    for key, value in data.items():
        if value is None:
            continue
        key = key.replace("-", "_")
        if not hasattr(cfg, key) or key == "extras":
            raise InvalidParameterError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            value = str(value).lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            value = int(value)
        elif isinstance(current, float) or current is None:
            value = float(value)
        setattr(cfg, key, value)
    return cfg


def write_csv(path, header, columns):
    columns = [np.atleast_1d(np.asarray(c)) for c in columns]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(
                ",".join(
                    str(v) if isinstance(v, (str, int, np.integer)) else FLOAT_FMT % v
                    for v in row
                )
                + "\n"
            )


def write_manifest(path, subcommand, cfg, info, outputs, wall_clock, diagnostics):
    manifest = {
        "artifact_version": __version__,
        "subcommand": subcommand,
        "config": {k: v for k, v in asdict(cfg).items() if k != "extras"},
        "parameters": info,
        "outputs": outputs,
        "wall_clock_s": wall_clock,
        "diagnostics": diagnostics,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=float)
        fh.write("\n")


# -- subcommands -------------------------------------------------------------


def cmd_basis(cfg, out_dir):
    state, _, info = build_scenario(cfg)
    basis = state.basis
    xs = basis.sample_grid(1025)
    pm = basis.phi_matrix(xs)
    path = os.path.join(out_dir, "basis.csv")
    write_csv(
        path,
        ["x"] + [f"phi_{i}" for i in range(basis.count)],
        [xs] + [pm[i] for i in range(basis.count)],
    )
    epath = os.path.join(out_dir, "energies.csv")
    write_csv(epath, ["k", "E"], [np.arange(basis.count), basis.energies])
    return info, [path, epath], {}


def cmd_evolve(cfg, out_dir):
    state, x0, info = build_scenario(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else 100.0
    dt = cfg.sample_dt if cfg.sample_dt is not None else 0.1
    t = np.arange(0.0, t_max + 0.5 * dt, dt)
    ode = evolve_ode(state, x0, t, cfg.ode_rtol, cfg.ode_atol, drift_samples=0)
    cdf = evolve_cdf(state, x0, t)
    hvals = kernels.cdf_values_along(state.table, t, ode.positions, state.cdf_panels)
    drift = np.abs(hvals - hvals[0])
    rho = kernels.rho_along(state.table, t, ode.positions)
    path = os.path.join(out_dir, "trajectory.csv")
    write_csv(
        path,
        ["t", "x_ode", "x_cdf", "cdf_drift", "min_density"],
        [t, ode.positions, cdf.positions, drift, np.minimum.accumulate(rho)],
    )
    diag = {
        "max_cdf_drift": float(np.max(drift)),
        "cross_method_sup": float(np.max(np.abs(ode.positions - cdf.positions))),
        "ode": ode.diagnostics,
        "cdf": cdf.diagnostics,
    }
    return info, [path], diag


def cmd_lyapunov(cfg, out_dir):
    state, x0, info = build_scenario(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else 1000.0
    step = cfg.sample_dt if cfg.sample_dt is not None else 1.0
    t = np.arange(0.0, t_max + 0.5 * step, step)
    var = lyapunov_variational(state, x0, t, cfg.ode_rtol, cfg.ode_atol)
    traj = evolve_ode(state, x0, t, cfg.ode_rtol, cfg.ode_atol, drift_samples=0)
    rat = lyapunov_ratio(state, traj)
    two = lyapunov_two_trajectory(state, x0, t, renorm_every=step)
    # two-trajectory horizons are the renormalization boundaries = this grid
    lam_two = np.interp(rat.horizons, two.horizons, two.lambda_hat)
    path = os.path.join(out_dir, "lyapunov.csv")
    write_csv(
        path,
        ["T", "lambda_ratio", "lambda_variational", "lambda_twotraj", "log_stretch"],
        [rat.horizons, rat.lambda_hat, var.lambda_hat, lam_two, var.log_stretch],
    )
    diag = {
        "lambda_ratio_final": float(rat.lambda_hat[-1]),
        "lambda_variational_final": float(var.lambda_hat[-1]),
        "lambda_twotraj_final": float(two.lambda_hat[-1]),
        "log_stretch_sup": float(np.max(np.abs(var.log_stretch))),
    }
    return info, [path], diag


def cmd_spectrum(cfg, out_dir):
    state, x0, info = build_scenario(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else 2000.0
    dt = cfg.sample_dt if cfg.sample_dt is not None else 0.05
    t = np.arange(0.0, t_max, dt)
    traj = evolve_ode(state, x0, t, cfg.ode_rtol, cfg.ode_atol, drift_samples=0)
    report = analyze_trajectory(traj.positions, dt, state.frequencies)
    n = max(state.n, 1)
    rows = [[] for _ in range(4 + n)]
    for p in report.peaks:
        rows[0].append(p.frequency)
        rows[1].append(p.amplitude)
        combo = p.combo if p.matched else (0,) * state.n
        for i in range(n):
            rows[2 + i].append(combo[i] if i < len(combo) else 0)
        rows[2 + n].append(p.residual)
        rows[3 + n].append(int(p.matched))
    path = os.path.join(out_dir, "spectrum.csv")
    write_csv(
        path,
        ["frequency", "amplitude"] + [f"k_{i+1}" for i in range(n)] + ["residual", "matched"],
        rows,
    )
    diag = {
        "resolution": report.resolution,
        "n_peaks": len(report.peaks),
        "n_unmatched": len(report.unmatched),
        "max_unmatched_amplitude": float(
            max((p.amplitude for p in report.unmatched), default=0.0)
        ),
    }
    return info, [path], diag


def cmd_ensemble(cfg, out_dir):
    state, _, info = build_scenario(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else 100.0
    dt = cfg.sample_dt if cfg.sample_dt is not None else 10.0
    t = np.arange(0.0, t_max + 0.5 * dt, dt)
    n = cfg.ensemble_n
    if cfg.ensemble_kind == "quantile":
        x0s = equilibrium_quantiles(state, n, t[0])
    else:
        span = state.basis.x_hi - state.basis.x_lo
        x0s = stratified_uniform(n, state.basis.x_lo + 1e-4 * span,
                                 state.basis.x_hi - 1e-4 * span)
    run = evolve_ensemble(state, x0s, t, cfg.method, cfg.ode_rtol, cfg.ode_atol)
    dist = equilibrium_distance(run, state)
    path = os.path.join(out_dir, "ensemble.csv")
    write_csv(path, ["t", "ks_distance"], [t, dist])
    outputs = [path]
    if cfg.dump_positions:
        ppath = os.path.join(out_dir, "ensemble_positions.csv")
        write_csv(
            ppath,
            ["t"] + [f"x_{j}" for j in range(n)],
            [t] + [run.positions[:, j] for j in range(n)],
        )
        outputs.append(ppath)
    diag = {
        "ks_initial": float(dist[0]),
        "ks_final": float(dist[-1]),
        "order_inversions": run.diagnostics["order_inversions"],
    }
    return info, outputs, diag


def cmd_audit(cfg, out_dir):
    """Chain evolve -> lyapunov -> spectrum on doublewell-five; print a verdict."""
    cfg.scenario = cfg.scenario or "doublewell-five"
    state, x0, info = build_scenario(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else 1000.0

    t_cross = np.arange(0.0, 100.0 + 0.05, 0.1)
    ode = evolve_ode(state, x0, t_cross, cfg.ode_rtol, cfg.ode_atol, drift_samples=101)
    drift = ode.diagnostics["cdf_drift"]

    t_lyap = np.arange(0.0, t_max + 0.5, 1.0)
    var = lyapunov_variational(state, x0, t_lyap, cfg.ode_rtol, cfg.ode_atol)
    lam = float(var.lambda_hat[-1])

    dt = cfg.sample_dt if cfg.sample_dt is not None else 0.05
    t_spec = np.arange(0.0, 2000.0, dt)
    traj = evolve_ode(state, x0, t_spec, cfg.ode_rtol, cfg.ode_atol, drift_samples=0)
    report = analyze_trajectory(traj.positions, dt, state.frequencies)
    max_unmatched = float(max((p.amplitude for p in report.unmatched), default=0.0))

    ok = abs(lam) < 1e-2 and not report.unmatched and drift < 1e-6
    verdict = "no chaos: lambda ≈ 0, spectrum quasiperiodic" if ok else "ANOMALY"
    line = (
        f"{verdict} | lambda_hat(T={t_max:g}) = {lam:.3e} | "
        f"max unmatched-peak amplitude = {max_unmatched:.3e} | "
        f"max CDF drift = {drift:.3e}"
    )
    print(line)
    path = os.path.join(out_dir, "audit.txt")
    with open(path, "w") as fh:
        fh.write(line + "\n")
    diag = {
        "lambda_hat": lam,
        "max_unmatched_amplitude": max_unmatched,
        "max_cdf_drift": float(drift),
        "verdict": verdict,
    }
    if not ok:
        raise NumericError("audit verdict ANOMALY", diag)
    return info, [path], diag


COMMANDS = {
    "basis": cmd_basis,
    "evolve": cmd_evolve,
    "lyapunov": cmd_lyapunov,
    "spectrum": cmd_spectrum,
    "ensemble": cmd_ensemble,
    "audit": cmd_audit,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quasibohm",
        description="1D pilot-wave trajectory simulator and no-chaos audit",
    )
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("scenario", nargs="?", default=None,
                        help=f"preset name ({', '.join(PRESET_NAMES)})")
    parser.add_argument("--scenario", dest="scenario_flag", default=None)
    parser.add_argument("--config", default=None, help="key=value file or manifest JSON")
    parser.add_argument("--t-max", type=float, default=None)
    parser.add_argument("--sample-dt", type=float, default=None)
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--ode-rtol", type=float, default=None)
    parser.add_argument("--cdf-tol", type=float, default=None)
    parser.add_argument("--x0", type=float, default=None)
    parser.add_argument("--ensemble-n", type=int, default=None)
    parser.add_argument("--ensemble-kind", choices=["uniform", "quantile"], default=None)
    parser.add_argument("--method", choices=["CDF", "ODE"], default=None)
    parser.add_argument("--dump-positions", action="store_true", default=None)
    return parser


def resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "scenario": args.scenario_flag or args.scenario,
        "t_max": args.t_max,
        "sample_dt": args.sample_dt,
        "out_dir": args.out_dir,
        "threads": args.threads,
        "ode_rtol": args.ode_rtol,
        "cdf_tol": args.cdf_tol,
        "x0": args.x0,
        "ensemble_n": args.ensemble_n,
        "ensemble_kind": args.ensemble_kind,
        "method": args.method,
        "dump_positions": args.dump_positions,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if not cfg.threads:
        cfg.threads = int(os.environ.get("QUASIBOHM_THREADS", "0") or 0)
    cfg.validate()
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.threads:
            kernels.set_threads(cfg.threads)
        os.makedirs(cfg.out_dir, exist_ok=True)
        start = time.perf_counter()
        info, outputs, diagnostics = COMMANDS[args.subcommand](cfg, cfg.out_dir)
        wall = time.perf_counter() - start
        mpath = os.path.join(cfg.out_dir, f"{args.subcommand}_manifest.json")
        write_manifest(mpath, args.subcommand, cfg, info, outputs, wall, diagnostics)
        for out in outputs + [mpath]:
            print(f"wrote {out}")
        return EXIT_OK
    except (InvalidParameterError, DomainError, CapabilityError) as exc:
        _emit_error(exc)
        return EXIT_CONFIG
    except (NodeProximityError, TrajectorySingularityError) as exc:
        _emit_error(exc)
        return EXIT_NODE
    except (NumericError, QuasibohmError) as exc:
        _emit_error(exc)
        return EXIT_NUMERIC


def _emit_error(exc):
    obj = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NumericError):
        obj["diagnostics"] = exc.diagnostics
    print(json.dumps(obj, default=float), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
