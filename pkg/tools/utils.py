import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import psutil


def make_rng(seed=0):
    """Counter-based generator; every randomized path takes one of these."""
    return np.random.Generator(np.random.Philox(seed))


def spawn_rng(seed, key):
    # independent child stream of `seed`, stable under reordering of the callers
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(key)])))


def reports_to_df(reports, names=None):
    """One row per report (anything with `as_dict()`), optionally indexed by name."""
    rows = [report.as_dict() for report in reports]
    df = pd.DataFrame(rows)
    if names is not None:
        df.insert(0, "name", list(names))
    return df


def plot_tracking_history(history, out_path_name):
    # volume drift and mesh size over time
    fig, (ax_volume, ax_size) = plt.subplots(1, 2, figsize=(12, 5))
    ax_volume.plot(history["time"], history["volume"], marker="o", label="volume")
    if len(history):
        ax_volume.axhline(history["volume"].iloc[0], color="gray", linestyle="--", label="initial")
    ax_volume.set_xlabel("time")
    ax_volume.set_ylabel("volume")
    ax_volume.legend()

    ax_size.plot(history["time"], history["triangles"], marker="o", color="#e74c3c")
    ax_size.set_xlabel("time")
    ax_size.set_ylabel("triangles")

    plt.tight_layout()
    plt.savefig(out_path_name, dpi=150)
    plt.close(fig)


def memory_usage():
    rss = psutil.Process().memory_info().rss
    return f"CPU Memory Used (MB): {rss / (1024 * 1024):.1f}"
