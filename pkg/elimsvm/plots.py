# Plotting functions:
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import seaborn as sns
import numpy as np

__all__ = ['plot_curves']

def plot_curves(table, fname, title = None):
    """
    Writes the mean test-error curves of ``table`` (a ``curve_table``) to ``fname`` as a static SVG, one line per
    method. As in the usual elimination plots, the x axis shows the number of retained features decreasing from
    left to right. The file is byte-identical for identical tables.
    """
    sns.set_context("paper")
    sns.set_style("ticks")
    matplotlib.rcParams['svg.hashsalt'] = 'elimsvm'
    matplotlib.rcParams['svg.fonttype'] = 'none'
    matplotlib.rcParams['axes.linewidth'] = 1.2
    matplotlib.rcParams['xtick.direction'] = 'out'
    matplotlib.rcParams['ytick.direction'] = 'out'
    fig, ax = plt.subplots(1, 1, figsize = (7, 4))
    counts = []
    for method in table.methods():
        rows = table.rows_for(method)
        x = np.array([r[1] for r in rows])
        y = np.array([r[2] for r in rows])
        counts += list(x)
        ax.plot(x, y, '-', lw = 1.5, label = method)
    if len(counts) > 0:
        ax.set_xlim([np.max(counts), np.min(counts)])
        if np.min(counts) > 0 and np.max(counts)/float(np.min(counts)) > 50.:
            ax.set_xscale('log')
            ax.set_xlim([np.max(counts), np.min(counts)])
    ax.set_xlabel('Number of retained features')
    ax.set_ylabel('Mean test error')
    if title is not None:
        ax.set_title(title)
    ax.legend(loc = 'best', fontsize = 8)
    plt.tight_layout()
    plt.savefig(fname, format = 'svg', metadata = {'Date':None})
    plt.close(fig)
