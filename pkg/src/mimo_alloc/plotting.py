"""Figure rendering for harness results.

Only the CLI report path imports this module; the numerical core does not
depend on matplotlib.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import IOFailure  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.2),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.5,
    "legend.fontsize": 9,
    "legend.frameon": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    # keep PNG bytes stable between runs
    "svg.hashsalt": "mimo-alloc",
}


def _save(fig, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, metadata={"Software": None})
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _by_n(rows):
    out = {}
    for r in rows:
        out.setdefault(r.N, []).append(r)
    return out


def plot_fig1(rows, path: Path) -> Path:
    """Bit energy (dB) against sum spectral efficiency; circles mark minima."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for n, (N, group) in enumerate(sorted(_by_n(rows).items())):
            color = f"C{n}"
            s_o = np.array([r.s_opt for r in group])
            e_o = 10 * np.log10([r.eta_opt for r in group])
            s_b = np.array([r.s_baseline for r in group])
            e_b = 10 * np.log10([r.eta_baseline for r in group])
            ax.plot(e_o, s_o, "-", color=color, label=f"optimal, N={N}")
            ax.plot(e_b, s_b, "--", color=color, label=f"p_p = p_u, N={N}")
            i = int(np.argmin(e_o))
            ax.plot(e_o[i], s_o[i], "o", mfc="none", color=color, ms=8)
            i = int(np.argmin(e_b))
            ax.plot(e_b[i], s_b[i], "o", mfc="none", color=color, ms=8)
        ax.set_xlabel("bit energy (dB)")
        ax.set_ylabel("sum spectral efficiency (bits/s/Hz)")
        ax.legend()
        return _save(fig, path)


def plot_fig2(rows, path: Path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for N, group in sorted(_by_n(rows).items()):
            ax.plot([r.snr_db for r in group], [r.pilot_data_ratio for r in group], "-o", ms=3, label=f"N={N}")
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("p_p* / p_u*")
        ax.legend()
        return _save(fig, path)


def plot_fig3(rows, path: Path) -> Path:
    """Empirical CDFs of sum spectral efficiency, one colour per SNR."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        keys = sorted({(r.N, r.snr_db) for r in rows})
        for n, (N, snr) in enumerate(keys):
            sel = [r for r in rows if r.N == N and r.snr_db == snr]
            p = np.arange(1, len(sel) + 1) / len(sel)
            label = f"{snr:g} dB" + (f", N={N}" if len({k[0] for k in keys}) > 1 else "")
            ax.plot(np.sort([r.s_opt for r in sel]), p, "-", color=f"C{n}", label=f"optimal, {label}")
            ax.plot(np.sort([r.s_baseline for r in sel]), p, "--", color=f"C{n}", label=f"p_p = p_u, {label}")
        ax.axhline(0.05, color="0.5", lw=0.8)
        ax.set_xlabel("sum spectral efficiency (bits/s/Hz)")
        ax.set_ylabel("CDF")
        ax.legend()
        return _save(fig, path)


def plot_validate(rows, path: Path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        closed = np.array([r.closed_form for r in rows])
        emp = np.array([r.empirical for r in rows])
        err = np.array([2 * r.std_error for r in rows])
        ax.errorbar(closed, emp, yerr=err, fmt=".", ms=4, lw=0.8)
        hi = max(closed.max(), emp.max()) * 1.05
        ax.plot([0, hi], [0, hi], "k-", lw=0.8)
        ax.set_xlabel("closed-form rate (bits/s/Hz)")
        ax.set_ylabel("simulated ergodic rate (bits/s/Hz)")
        return _save(fig, path)


PLOTTERS = {"fig1": plot_fig1, "fig2": plot_fig2, "fig3": plot_fig3, "validate": plot_validate}


def render(figure_id: str, rows, output_dir: Path) -> Path:
    return PLOTTERS[figure_id](rows, Path(output_dir) / f"{figure_id}.png")
