"""Figure rendering for sweep results and workload comparisons.

Figures are written next to the delimited output; the CSV stays the
canonical data product and the plots are a convenience view of it.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["plot_bler", "plot_complexity_bars"]


def plot_bler(stats, path, label=None, title=None):
    """Semilog BLER-vs-SNR curve with 95% interval whiskers.

    Zero-error points cannot sit on a log axis; they are drawn as
    downward markers at their upper confidence bound instead.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    pos = [s for s in stats if s.block_errors > 0]
    zer = [s for s in stats if s.block_errors == 0]
    if pos:
        xs = [s.snr_db for s in pos]
        ys = [s.bler for s in pos]
        lo = [max(s.bler - s.ci_low, 0.0) for s in pos]
        hi = [max(s.ci_high - s.bler, 0.0) for s in pos]
        ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=3,
                    label=label)
    if zer:
        ax.plot([s.snr_db for s in zer], [s.ci_high for s in zer],
                linestyle="none", marker="v",
                label="upper bound (0 errors)")
    ax.set_yscale("log")
    ax.set_xlabel("Eb/N0 [dB]")
    ax.set_ylabel("BLER")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    if label or zer:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def plot_complexity_bars(bars, path, title=None):
    """Horizontal log-scale bars of weighted operation counts."""
    items = sorted(bars.items(), key=lambda kv: kv[1])
    labels = [k for k, _ in items]
    values = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(6.5, 0.4 * len(items) + 1.2))
    ax.barh(range(len(items)), values, color="tab:blue")
    ax.set_yticks(range(len(items)), labels=labels, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("weighted operations per frame")
    ax.grid(True, axis="x", which="both", alpha=0.3)
    for i, v in enumerate(values):
        ax.text(v, i, f" {v:.3g}", va="center", fontsize=7)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
