"""Command-line orchestration: experiment configs, reproduction recipes,
CSV/SVG persistence and run manifests.

Configuration is a flat key=value text block (the model-parameter
serialization plus command-specific keys).  Precedence: --params file, then
SIRG_-prefixed environment variables, then explicit flags.  Every command
writes a RunManifest next to its outputs; a manifest is itself a valid
--params file, so re-running the same command with it byte-reproduces all
CSV outputs.

Exit codes: 0 success, 2 invalid parameters, 3 estimation failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, theory
from .clustering import (
    clustering_spectrum,
    finite_size_threshold,
    log_binned_spectrum,
    typical_triangle_stats,
    TRIANGLE_STATS,
)
from .experiments import FIGURES, reproduce_figure
from .graphs import generate_finite_sirg, load_graph, save_graph
from .model import (
    EstimationError,
    InsufficientDataError,
    InvalidParameterError,
    Kernel,
    ModelParams,
    UnsupportedRegimeError,
    classify_regime,
    clustering_limit_constant,
    clustering_scaling,
    triangle_scale,
)

# master seed derived from the ASCII bytes "S1RG"; override with --seed
DEFAULT_SEED = int.from_bytes(b"S1RG", "big")

_MODEL_KEYS = ("d", "alpha", "beta", "a", "kernel")


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".10g")
    return str(x)


def read_config(path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"expected key=value in {path}: {raw!r}")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def resolve_config(args, extra_keys=()) -> dict[str, str]:
    """Merge --params file, SIRG_* environment and CLI flags."""
    cfg: dict[str, str] = {}
    if getattr(args, "params", None):
        cfg.update(read_config(args.params))
    for key in (*_MODEL_KEYS, "seed", "threads", "samples", *extra_keys):
        env = os.environ.get(f"SIRG_{key.upper()}")
        if env is not None:
            cfg[key] = env
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = str(flag)
    cfg.setdefault("seed", str(DEFAULT_SEED))  # manifests record the effective seed
    return cfg


def params_from_config(cfg) -> ModelParams:
    return ModelParams.from_mapping(cfg)


@dataclass
class RunManifest:
    """Record of one CLI run; replaying it byte-reproduces the CSV outputs."""

    command: str
    config: dict[str, str]
    outputs: list[str]

    def to_text(self) -> str:
        lines = [f"command={self.command}", f"version={__version__}",
                 f"timestamp={time.strftime('%Y-%m-%dT%H:%M:%S%z')}"]
        lines += [f"{k}={v}" for k, v in sorted(self.config.items())]
        lines.append("outputs=" + ";".join(self.outputs))
        return "\n".join(lines) + "\n"


def _write_manifest(out_dir, command, cfg, outputs):
    manifest = RunManifest(command, dict(cfg), [os.path.basename(p) for p in outputs])
    path = os.path.join(out_dir, "manifest.txt")
    with open(path, "w") as fh:
        fh.write(manifest.to_text())
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _out_dir(args) -> str:
    out = args.out or "sirg-out"
    os.makedirs(out, exist_ok=True)
    return out


def _seed(cfg) -> int:
    return int(cfg.get("seed", DEFAULT_SEED))


def _threads(cfg) -> int:
    return max(1, int(cfg.get("threads", 1)))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = resolve_config(args, extra_keys=("n", "torus", "binary"))
    params = params_from_config(cfg)
    if "n" not in cfg:
        raise InvalidParameterError("generate needs n (flag --n or config key n)")
    n = int(cfg["n"])
    seed = _seed(cfg)
    out = _out_dir(args)
    graph = generate_finite_sirg(n, params, seed,
                                 torus=cfg.get("torus", "0") in ("1", "true"))
    binary = cfg.get("binary", "0") in ("1", "true")
    graph_path = os.path.join(out, "graph.bin" if binary else "graph.txt")
    save_graph(graph, graph_path, binary=binary)
    cfg.update({"n": str(n), "seed": str(seed)})
    _write_manifest(out, "generate", cfg, [graph_path])
    print(f"wrote {graph_path} ({graph.indptr[-1] // 2} edges)")
    return 0


def _spectrum_artifacts(graph, out, cfg, bins_per_decade, overlay=None):
    from .plots import spectrum_plot

    spectrum = clustering_spectrum(graph)
    threshold = finite_size_threshold(graph.n, graph.params)
    binned = log_binned_spectrum(spectrum, bins_per_decade)
    spec_path = os.path.join(out, "spectrum.csv")
    _write_csv(spec_path, ["k", "n_k", "mean_cc"], spectrum.rows())
    binned_path = os.path.join(out, "binned.csv")
    _write_csv(binned_path, ["k_gmean", "cc", "n_weight"], [tuple(r) for r in binned])
    svg_path = os.path.join(out, "spectrum.svg")
    spectrum_plot(svg_path, spectrum.rows(), binned, threshold.psi,
                  f"n={graph.n} d={graph.d} beta={graph.params.beta} "
                  f"a={graph.params.a} alpha={graph.params.alpha}",
                  theory_overlay=overlay)
    return [spec_path, binned_path, svg_path]


def cmd_spectrum(args) -> int:
    cfg = resolve_config(args, extra_keys=("n", "bins_per_decade", "graph"))
    out = _out_dir(args)
    bins = int(cfg.get("bins_per_decade", 8))
    if cfg.get("graph"):
        graph = load_graph(cfg["graph"])
        cfg["graph"] = os.path.abspath(cfg["graph"])
        cfg.update(line.split("=", 1) for line in graph.params.to_text().splitlines())
    else:
        params = params_from_config(cfg)
        if "n" not in cfg:
            raise InvalidParameterError("spectrum needs --graph or a generation config with n")
        graph = generate_finite_sirg(int(cfg["n"]), params, _seed(cfg))
    outputs = _spectrum_artifacts(graph, out, cfg, bins)
    _write_manifest(out, "spectrum", cfg, outputs)
    print(f"wrote {', '.join(os.path.basename(p) for p in outputs)}")
    return 0


def cmd_theory(args) -> int:
    cfg = resolve_config(args, extra_keys=("k_grid",))
    params = params_from_config(cfg)
    seed = _seed(cfg)
    workers = _threads(cfg)
    n_samples = int(cfg.get("samples", 200_000))
    k_grid = [int(k) for k in cfg.get("k_grid", "16,64,256,1024").split(",")]
    out = _out_dir(args)

    limit = clustering_limit_constant(params, n_samples=max(n_samples, 100_000), seed=seed,
                                      workers=workers)
    rows = []
    for i, k in enumerate(k_grid):
        m_inv = theory.inverse_mean_degree(k, params)
        s_k = clustering_scaling(k, params.a, params.beta) \
            if params.kernel is Kernel.INTERPOLATION else 1.0 / k
        sigma = triangle_scale(m_inv, params.a, params.beta) \
            if params.kernel is Kernel.INTERPOLATION else float("nan")
        if params.kernel is Kernel.INTERPOLATION:
            t_lo = theory.triangle_lower_bound(m_inv, params) if m_inv > 2 else float("nan")
            t_hi = theory.triangle_upper_bound(m_inv, params)
        else:
            t_lo = t_hi = float("nan")
        t_hat = theory.triangle_integral_mc(m_inv, params, n_samples,
                                            seed=seed + 13 * i, workers=workers)
        gamma = theory.clustering_function(k, params, n_samples,
                                           seed=seed + 17 * i, workers=workers)
        rows.append((k, m_inv, s_k, sigma, t_lo, t_hat.value, t_hat.std_error, t_hi,
                     gamma.value, gamma.std_error, gamma.value / s_k,
                     limit.value.value,
                     limit.alt_value.value if limit.alt_value else float("nan")))
    path = os.path.join(out, "theory.csv")
    _write_csv(path, ["k", "m_inverse", "s_k", "sigma", "t_lower", "t_hat", "t_hat_se",
                      "t_upper", "gamma", "gamma_se", "gamma_over_sk",
                      "gamma_limit", "gamma_limit_alt"], rows)
    outputs = [path]
    if params.kernel is Kernel.INTERPOLATION:
        ratio_rows = theory.limit_ratio_report(params, [float(k) for k in k_grid])
        ratio_path = os.path.join(out, "limit_ratios.csv")
        _write_csv(ratio_path,
                   ["k_or_w", "quantity", "value", "std_error", "target", "rel_dev"],
                   [(r.k_or_w, r.quantity, r.value, r.std_error, r.target, r.rel_dev)
                    for r in ratio_rows])
        outputs.append(ratio_path)
    _write_manifest(out, "theory", cfg, outputs)
    print(f"wrote {', '.join(os.path.basename(p) for p in outputs)}")
    return 0


def cmd_phase_diagram(args) -> int:
    cfg = resolve_config(args, extra_keys=("a_min", "a_max", "beta_min", "beta_max",
                                           "resolution"))
    out = _out_dir(args)
    a_lo = float(cfg.get("a_min", 0.0))
    a_hi = float(cfg.get("a_max", 4.0))
    b_lo = float(cfg.get("beta_min", 2.05))
    b_hi = float(cfg.get("beta_max", 6.0))
    res = int(cfg.get("resolution", 40))
    if a_lo < 0 or b_lo <= 2:
        raise InvalidParameterError("phase diagram needs a >= 0 and beta > 2")
    a_values = list(np.linspace(a_lo, a_hi, res))
    b_values = list(np.linspace(b_lo, b_hi, res))
    rows = []
    case_grid = []
    for a in a_values:
        row_cases = []
        for beta in b_values:
            try:
                label = classify_regime(a, beta)
                rows.append((a, beta, label.case.value, label.exponent,
                             int(label.infinite_mean_degree)))
                row_cases.append(label.case)
            except UnsupportedRegimeError:
                rows.append((a, beta, "unclassified", float("nan"), 0))
                row_cases.append(None)
        case_grid.append(row_cases)
    csv_path = os.path.join(out, "phase_diagram.csv")
    _write_csv(csv_path, ["a", "beta", "case", "exponent", "infinite_mean_degree"], rows)
    from .plots import phase_diagram_plot

    svg_path = os.path.join(out, "phase_diagram.svg")
    phase_diagram_plot(svg_path, a_values, b_values, case_grid)
    _write_manifest(out, "phase-diagram", cfg, [csv_path, svg_path])
    print(f"wrote {csv_path}, {svg_path}")
    return 0


def cmd_reproduce(args) -> int:
    cfg = resolve_config(args, extra_keys=("figure", "n_seeds"))
    figure = cfg.get("figure", "fig5a")
    if figure not in FIGURES:
        raise InvalidParameterError(f"figure must be one of {sorted(FIGURES)}")
    seed = _seed(cfg)
    n_seeds = int(cfg.get("n_seeds", 1))
    if n_seeds < 1:
        raise InvalidParameterError("n_seeds must be >= 1")
    workers = _threads(cfg)
    out = _out_dir(args)
    runs = reproduce_figure(figure, seed=seed, n_seeds=n_seeds, workers=workers)
    outputs = []
    slope_rows = []
    for run in runs:
        tag = f"alpha{run.alpha:g}"
        sub = os.path.join(out, tag)
        os.makedirs(sub, exist_ok=True)
        spec_path = os.path.join(sub, "spectrum.csv")
        _write_csv(spec_path, ["k", "n_k", "mean_cc"], run.spectrum.rows())
        binned = log_binned_spectrum(run.spectrum, 8)
        binned_path = os.path.join(sub, "binned.csv")
        _write_csv(binned_path, ["k_gmean", "cc", "n_weight"], [tuple(r) for r in binned])
        from .plots import spectrum_plot

        svg_path = os.path.join(sub, "spectrum.svg")
        spectrum_plot(svg_path, run.spectrum.rows(), binned, run.psi,
                      f"{figure}: beta={run.spec.beta} alpha={run.alpha:g} "
                      f"({n_seeds} seeds pooled)",
                      theory_overlay=run.theory_overlay or None)
        outputs += [spec_path, binned_path, svg_path]
        if run.theory_overlay:
            overlay_path = os.path.join(sub, "theory_overlay.csv")
            _write_csv(overlay_path, ["k", "gamma"], run.theory_overlay)
            outputs.append(overlay_path)
        if run.fit is not None:
            slope_rows.append((figure, run.alpha, run.fit.k_lo, run.fit.k_hi,
                               run.fit.slope, run.fit.r_squared, run.fit.n_points))
        else:
            nan = float("nan")
            slope_rows.append((figure, run.alpha, 10.0, run.psi / 2.0, nan, nan, 0))
    slopes_path = os.path.join(out, "slopes.csv")
    _write_csv(slopes_path, ["figure", "alpha", "k_lo", "k_hi", "slope", "r_squared",
                             "n_points"], slope_rows)
    outputs.append(slopes_path)
    cfg.update({"figure": figure, "seed": str(seed), "n_seeds": str(n_seeds)})
    _write_manifest(out, "reproduce", cfg, outputs)
    for row in slope_rows:
        print(f"{row[0]} alpha={row[1]:g}: slope {row[4]:+.3f} over [{row[2]:g}, {row[3]:.1f}]")
    return 0


def cmd_sandwich(args) -> int:
    cfg = resolve_config(args, extra_keys=("w_grid",))
    params = params_from_config(cfg)
    seed = _seed(cfg)
    workers = _threads(cfg)
    n_samples = int(cfg.get("samples", 100_000))
    w_grid = [float(w) for w in cfg.get("w_grid", "8,32,128,512,2048").split(",")]
    out = _out_dir(args)
    rows = []
    bad = 0
    for i, w in enumerate(w_grid):
        s = theory.triangle_sandwich(w, params, n_samples,
                                     seed=seed + 29 * i, workers=workers)
        bad += not s.inside
        t_hat = s.mc_estimate
        # long format against the Monte Carlo target, so the bound rows carry
        # their relative slack
        rows.append((w, "triangle_lower", s.lower, 0.0, t_hat.value,
                     s.lower / t_hat.value - 1.0))
        rows.append((w, "triangle_mc", t_hat.value, t_hat.std_error, t_hat.value, 0.0))
        rows.append((w, "triangle_upper", s.upper, 0.0, t_hat.value,
                     s.upper / t_hat.value - 1.0))
    path = os.path.join(out, "sandwich.csv")
    _write_csv(path, ["k_or_w", "quantity", "value", "std_error", "target", "rel_dev"],
               rows)
    _write_manifest(out, "sandwich", cfg, [path])
    print(f"wrote {path} ({'all inside' if not bad else f'{bad} outside'})")
    return 0 if not bad else 3


def cmd_triangle_geometry(args) -> int:
    cfg = resolve_config(args, extra_keys=("w_grid",))
    params = params_from_config(cfg)
    seed = _seed(cfg)
    n_samples = int(cfg.get("samples", 200_000))
    w_grid = [float(w) for w in cfg.get("w_grid", "16,32,64,128,256").split(",")]
    out = _out_dir(args)
    geometry = typical_triangle_stats(params, w_grid, n_samples, seed=seed)
    stat_cols = [c for s in TRIANGLE_STATS for c in (f"mean_log_{s}", f"se_log_{s}")]
    rows = [tuple(r[c] for c in ("w", "k", "n_triangles", *stat_cols))
            for r in geometry.rows]
    table_path = os.path.join(out, "triangle_geometry.csv")
    _write_csv(table_path, ["w", "k", "n_triangles", *stat_cols], rows)
    exp_path = os.path.join(out, "triangle_exponents.csv")
    _write_csv(exp_path, ["statistic", "exponent", "std_error"],
               [(s, *geometry.exponents[s]) for s in TRIANGLE_STATS])
    _write_manifest(out, "triangle-geometry", cfg, [table_path, exp_path])
    print(f"wrote {table_path}, {exp_path}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirg",
        description="Spatial inhomogeneous random graphs: simulation and "
                    "clustering-spectrum theory engine.")
    parser.add_argument("--version", action="version", version=f"sirg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_model=True):
        p.add_argument("--params", help="flat key=value config file")
        p.add_argument("--seed", type=int, help="64-bit master seed")
        p.add_argument("--out", help="output directory (default sirg-out)")
        p.add_argument("--threads", type=int, help="worker thread cap")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        if with_model:
            p.add_argument("--d", type=int)
            p.add_argument("--alpha", type=float)
            p.add_argument("--beta", type=float)
            p.add_argument("--a", type=float)
            p.add_argument("--kernel", choices=[k.value for k in Kernel])

    p = sub.add_parser("generate", help="sample a finite graph and write it")
    common(p)
    p.add_argument("--n", type=int, help="vertex count")
    p.add_argument("--torus", action="store_const", const=1, default=None)
    p.add_argument("--binary", action="store_const", const=1, default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectrum", help="clustering spectrum of a graph")
    common(p)
    p.add_argument("--graph", help="existing graph file (else generate from config)")
    p.add_argument("--n", type=int)
    p.add_argument("--bins-per-decade", dest="bins_per_decade", type=int)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("theory", help="theory table along a degree grid")
    common(p)
    p.add_argument("--k-grid", dest="k_grid", help="comma-separated degrees")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("phase-diagram", help="regime map over (a, beta)")
    common(p, with_model=False)
    p.add_argument("--a-min", dest="a_min", type=float)
    p.add_argument("--a-max", dest="a_max", type=float)
    p.add_argument("--beta-min", dest="beta_min", type=float)
    p.add_argument("--beta-max", dest="beta_max", type=float)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("reproduce", help="canonical clustering-spectrum runs")
    common(p, with_model=False)
    p.add_argument("--figure", choices=sorted(FIGURES))
    p.add_argument("--n-seeds", dest="n_seeds", type=int)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sandwich", help="triangle bounds vs Monte Carlo")
    common(p)
    p.add_argument("--w-grid", dest="w_grid", help="comma-separated root weights")
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("triangle-geometry", help="typical-triangle exponents")
    common(p)
    p.add_argument("--w-grid", dest="w_grid", help="comma-separated root weights")
    p.set_defaults(func=cmd_triangle_geometry)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except (EstimationError, InsufficientDataError) as exc:
        print(f"estimation failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
