"""Static SVG renders: log-log clustering spectra and the regime phase
diagram."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import RegimeCase  # noqa: E402

plt.rcParams["svg.hashsalt"] = "sirg"

_CASE_COLORS = {
    RegimeCase.INVERSE_LINEAR: "#f7b6c2",
    RegimeCase.CRITICAL_LOG: "#8e4585",
    RegimeCase.POLYNOMIAL: "#f5e663",
    RegimeCase.CRITICAL_LOGSQ_INV: "#52b788",
    RegimeCase.CONSTANT: "#7fd4e8",
}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def spectrum_plot(path, spectrum_rows, binned_rows, psi: float, title: str,
                  theory_overlay=None):
    """Log-log clustering spectrum with the finite-size threshold marker.

    spectrum_rows: (k, n_k, cc) triples; binned_rows: (k_gmean, cc, weight);
    theory_overlay: optional (k, gamma) pairs drawn as a line.
    """
    fig, ax = plt.subplots(figsize=(7, 5))
    ks = [r[0] for r in spectrum_rows if r[2] > 0]
    cc = [r[2] for r in spectrum_rows if r[2] > 0]
    ax.scatter(ks, cc, s=6, color="#9aa2ab", alpha=0.5, label="per-degree mean")
    if len(binned_rows):
        ax.plot([r[0] for r in binned_rows if r[1] > 0],
                [r[1] for r in binned_rows if r[1] > 0],
                "o-", color="#1f4e79", ms=4, lw=1.2, label="log-binned")
    if theory_overlay is not None:
        ax.plot([p[0] for p in theory_overlay], [p[1] for p in theory_overlay],
                "--", color="#c1121f", lw=1.4, label="infinite-model clustering")
    ax.axvline(psi, color="green", ls="--", lw=1.2, label="finite-size threshold")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("degree k")
    ax.set_ylabel("mean local clustering")
    ax.set_title(title)
    ax.legend(loc="lower left", fontsize=8)
    _save(fig, path)


def phase_diagram_plot(path, a_values, beta_values, case_grid, title="clustering decay regimes"):
    """Colored (a, beta) regime map with the four boundary lines."""
    fig, ax = plt.subplots(figsize=(7, 5))
    a_lo, a_hi = min(a_values), max(a_values)
    b_lo, b_hi = min(beta_values), max(beta_values)
    for i, a in enumerate(a_values):
        for j, b in enumerate(beta_values):
            case = case_grid[i][j]
            if case is None:
                continue
            ax.scatter([a], [b], s=14, marker="s",
                       color=_CASE_COLORS[case], linewidths=0)
    xs = [a_lo, a_hi]
    for fn, color, label in [
        (lambda a: a + 1.5, "#8e4585", "beta = a + 3/2"),
        (lambda a: a + 1.0, "#2d6a4f", "beta = a + 1"),
        (lambda a: (a + 3.0) / 2.0, "#e76f51", "beta = (a + 3)/2"),
        (lambda a: a + 2.0, "#222222", "beta = a + 2"),
    ]:
        ax.plot(xs, [fn(x) for x in xs], color=color, lw=1.3, label=label)
    handles, labels = ax.get_legend_handles_labels()
    for case, color in _CASE_COLORS.items():
        handles.append(plt.Line2D([], [], marker="s", ls="", color=color))
        labels.append(case.value)
    ax.set_xlim(a_lo - 0.05, a_hi + 0.05)
    ax.set_ylim(b_lo - 0.05, b_hi + 0.05)
    ax.set_xlabel("interpolation exponent a")
    ax.set_ylabel("weight tail beta")
    ax.set_title(title)
    ax.legend(handles, labels, fontsize=7, loc="upper left")
    _save(fig, path)
