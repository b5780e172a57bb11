"""Command-line experiment runner.

Subcommands generate input-state files, exact canonical variance
curves and distributions, Monte Carlo variance tables, exact
record-enumeration variances, and the combined variance-versus-photon-
number sweep data.  Every command is a deterministic function of its
configuration and seed: rerunning with the same arguments reproduces
output files byte for byte.

Options may come from flags or from a JSON file passed with --config;
explicit flags win on conflict.  All floating-point output carries 12
significant digits.  Exit codes: 0 success, 2 invalid configuration,
3 numerical degeneracy.

The worker thread count is taken from the MZPHASE_THREADS environment
variable (default: available parallelism); it never affects numerical
results, only wall time.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import canonical, states, su2, trajectory
from .circular import TWO_PI, evaluate
from .errors import NumericalDegeneracyError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

DIST_GRID = 4096

_MEASURE_TO_ESTIMATION = {"holevo": trajectory.MOD_2PI, "modpi": trajectory.MOD_PI}


class ConfigError(ValueError):
    """Invalid or inconsistent command configuration."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.12g}"
    return str(x)


def _write_lines(path: str | None, lines) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _parse_photon_list(value) -> list[int]:
    if value is None:
        raise ConfigError("a photon-number list is required (--photons-list)")
    if isinstance(value, str):
        items = [v for v in value.replace(",", " ").split() if v]
    else:
        items = list(value)
    try:
        ns = [int(v) for v in items]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad photon list: {exc}") from exc
    if not ns or any(n < 1 for n in ns):
        raise ConfigError("photon numbers must be positive integers")
    return ns


def _policy_from(cfg) -> trajectory.FeedbackPolicy:
    measure = cfg.get("measure", "holevo")
    if measure not in _MEASURE_TO_ESTIMATION:
        raise ConfigError(f"unknown measure {measure!r}; choose holevo or modpi")
    estimation = _MEASURE_TO_ESTIMATION[measure]
    variant = cfg.get("policy", "adaptive")
    if variant == "fixed":
        return trajectory.FeedbackPolicy.fixed(float(cfg.get("fixed_phase", 0.0)), estimation)
    if variant in (trajectory.ADAPTIVE, trajectory.NONADAPTIVE):
        return trajectory.FeedbackPolicy(variant, estimation)
    raise ConfigError(f"unknown policy {variant!r}")


def _child_seed(seed: int, photons: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(photons)]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_state(cfg) -> int:
    kind = cfg.get("kind", "optimal")
    photons = cfg.get("photons")
    if photons is None:
        raise ConfigError("--photons is required")
    state = canonical.make_state(kind, int(photons))
    basis = cfg.get("basis")
    if basis is not None and basis != state.basis:
        if basis == states.JZ:
            state = su2.y_to_z(state)
        elif basis == states.JY:
            state = su2.z_to_y(state)
        else:
            raise ConfigError(f"unknown basis {basis!r}; choose jy or jz")
    payload = states.state_to_dict(state)
    out = cfg.get("out")
    text = json.dumps(payload, indent=2)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def _cmd_canonical_distribution(cfg) -> int:
    kind = cfg.get("kind", "equal")
    photons = int(cfg["photons"])
    state = canonical.make_state(kind, photons)
    dist = canonical.canonical_distribution(state)
    grid = np.linspace(0.0, TWO_PI, DIST_GRID, endpoint=False)
    density = evaluate(dist, grid).real
    header = "phi,density"
    if cfg.get("multiply_sin2"):
        density = density * np.sin(grid) ** 2
        header = "phi,density_sin2"
    lines = [header]
    for phi, d in zip(grid, density):
        lines.append(f"{_fmt(float(phi))},{_fmt(float(d))}")
    _write_lines(cfg.get("out"), lines)
    return EXIT_OK


def cmd_canonical(cfg) -> int:
    if cfg.get("dist"):
        if cfg.get("photons") is None:
            raise ConfigError("--photons is required in distribution mode")
        return _cmd_canonical_distribution(cfg)
    kind = cfg.get("kind", "optimal")
    measure = cfg.get("measure", "holevo")
    if cfg.get("photons") is not None and cfg.get("photons_list") is None:
        ns = [int(cfg["photons"])]
    else:
        ns = _parse_photon_list(cfg.get("photons_list"))
    rows = canonical.canonical_sweep(kind, sorted(set(ns)), measure)
    lines = ["N,variance"]
    for n, v in rows:
        lines.append(f"{n},{_fmt(v)}")
    _write_lines(cfg.get("out"), lines)
    return EXIT_OK


def cmd_simulate(cfg) -> int:
    kind = cfg.get("kind", "optimal")
    policy = _policy_from(cfg)
    trials = int(cfg.get("trials", 1000))
    seed = int(cfg.get("seed", 0))
    ns = _parse_photon_list(cfg.get("photons_list") or cfg.get("photons"))
    lines = ["N,variance,std_error,sharpness,trials,seed"]
    for n in sorted(set(ns)):
        state = canonical.make_state(kind, n)
        report = trajectory.monte_carlo_variance(state, policy, trials, _child_seed(seed, n))
        lines.append(
            f"{n},{_fmt(report.variance)},{_fmt(report.std_error)},"
            f"{_fmt(report.sharpness)},{report.trials},{seed}"
        )
    _write_lines(cfg.get("out"), lines)
    return EXIT_OK


def cmd_enumerate(cfg) -> int:
    kind = cfg.get("kind", "optimal")
    policy = _policy_from(cfg)
    if cfg.get("photons") is None:
        raise ConfigError("--photons is required")
    photons = int(cfg["photons"])
    grid = int(cfg.get("phi1_grid", 64))
    state = canonical.make_state(kind, photons)
    result = trajectory.exact_variance_enumeration(state, policy, grid_size=grid)
    line = (
        f"N={photons} policy={policy.variant} measure={cfg.get('measure', 'holevo')} "
        f"K={result.grid_size} variance={_fmt(result.variance)}"
    )
    print(line)
    out = cfg.get("out")
    if out is not None:
        _write_lines(out, ["N,policy,measure,K,variance",
                           f"{photons},{policy.variant},{cfg.get('measure', 'holevo')},"
                           f"{result.grid_size},{_fmt(result.variance)}"])
    return EXIT_OK


def cmd_sweep_fig3(cfg) -> int:
    """Regenerate the variance-versus-photon-number summary data.

    Exact canonical curves for the optimal, one-port, and equal-split
    (mod-pi) inputs, plus Monte Carlo points for the adaptive and
    nonadaptive policies, in one long-format CSV.
    """
    seed = int(cfg.get("seed", 0))
    trials = int(cfg.get("trials", 2000))
    mc_ns = _parse_photon_list(cfg.get("photons_list") or [4, 8, 16, 32, 64, 128])
    line_ns = _parse_photon_list(cfg.get("canonical_list") or [2 ** k for k in range(1, 14)])

    lines = ["series,N,variance,std_error"]

    def add_exact(series, kind, measure, ns):
        for n, v in canonical.canonical_sweep(kind, ns, measure):
            lines.append(f"{series},{n},{_fmt(v)},")

    add_exact("canonical-optimal", "optimal", "holevo", line_ns)
    add_exact("canonical-one-port", "one-port", "holevo", line_ns)
    add_exact("canonical-equal-modpi", "equal", "modpi", [n for n in line_ns if n % 2 == 0])

    series_specs = [
        ("mc-adaptive-optimal", "optimal", trajectory.FeedbackPolicy.adaptive(), mc_ns),
        ("mc-nonadaptive-optimal", "optimal", trajectory.FeedbackPolicy.nonadaptive(), mc_ns),
        ("mc-adaptive-equal-modpi", "equal",
         trajectory.FeedbackPolicy.adaptive(trajectory.MOD_PI), [n for n in mc_ns if n % 2 == 0]),
    ]
    for series, kind, policy, ns in series_specs:
        for n in sorted(set(ns)):
            state = canonical.make_state(kind, n)
            report = trajectory.monte_carlo_variance(state, policy, trials, _child_seed(seed, n))
            lines.append(f"{series},{n},{_fmt(report.variance)},{_fmt(report.std_error)}")

    _write_lines(cfg.get("out"), lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags win on conflict")
    p.add_argument("--kind", choices=canonical.STATE_KINDS, default=None,
                   help="input state family")
    p.add_argument("--photons", type=int, default=None, help="photon number N")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mzphase",
        description="Interferometric phase-estimation experiments: exact "
                    "canonical statistics and simulated photon-counting "
                    "measurements with feedback.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="write an input state as JSON")
    _add_common(p)
    p.add_argument("--basis", choices=[states.JY, states.JZ], default=None,
                   help="output basis (default: the constructor's native basis)")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("canonical", help="exact canonical variance curve or distribution")
    _add_common(p)
    p.add_argument("--photons-list", default=None,
                   help="comma-separated photon numbers for the sweep")
    p.add_argument("--measure", choices=["holevo", "modpi"], default=None)
    p.add_argument("--dist", action="store_true", default=None,
                   help=f"emit the {DIST_GRID}-point distribution instead of a sweep")
    p.add_argument("--multiply-sin2", action="store_true", default=None,
                   help="multiply the distribution by sin^2(phi)")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("simulate", help="Monte Carlo variance of a feedback policy")
    _add_common(p)
    p.add_argument("--photons-list", default=None)
    p.add_argument("--policy", choices=["adaptive", "nonadaptive", "fixed"], default=None)
    p.add_argument("--fixed-phase", type=float, default=None,
                   help="controllable phase for --policy fixed")
    p.add_argument("--measure", choices=["holevo", "modpi"], default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", help="exact variance over all detection records")
    _add_common(p)
    p.add_argument("--policy", choices=["adaptive", "nonadaptive", "fixed"], default=None)
    p.add_argument("--fixed-phase", type=float, default=None)
    p.add_argument("--measure", choices=["holevo", "modpi"], default=None)
    p.add_argument("--phi1-grid", type=int, default=None,
                   help="grid size for averaging the initial phase (default 64)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep-fig3", help="variance-vs-N summary: exact curves + MC points")
    _add_common(p)
    p.add_argument("--photons-list", default=None, help="photon numbers for the MC series")
    p.add_argument("--canonical-list", default=None,
                   help="photon numbers for the exact curves")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_sweep_fig3)

    return ap


def _merge_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "func", "command"):
            continue
        if value is not None:
            cfg[key] = value
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(_merge_config(args))
    except NumericalDegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
