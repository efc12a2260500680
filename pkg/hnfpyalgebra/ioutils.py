import csv
import glob
import logging
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import xarray
from dask.diagnostics import ProgressBar
from sympy import Rational

from hnfpyalgebra.dsl import format_fn
from hnfpyalgebra.intervals import is_infinite, NEG_INF, POS_INF
from hnfpyalgebra.piecewise import PiecewiseFn, pw_eval
from hnfpyalgebra.rationals import rf_eval, rf_limit

logger = logging.getLogger(__name__)

SVG_WIDTH = 800
SVG_HEIGHT = 600
SVG_DPI = 72


def read_operand(operand: str) -> str:
    """
    Reads a function operand. Existing file paths are read, everything else is taken as an inline literal.
    """
    if os.path.isfile(operand):
        with open(operand, "r") as f:
            return f.read()
    return operand


def discover_function_files(data_dir: str, pattern: str = "*.fn") -> list:
    """
    Discovers all function files inside a directory. Files are sorted by name, so sequences can be stored as
    f01.fn, f02.fn, ...

    Parameters
    ----------
    data_dir: str
        Directory that contains the function files
    pattern: str
        Glob pattern of the file names

    Returns
    -------
    list
        Sorted list of file paths

    """
    files = sorted(glob.glob(os.path.join(data_dir, pattern)))
    if not files:
        logger.warning(f"No files matching '{pattern}' found in {data_dir}")
    return files


def sample_grid(f: PiecewiseFn, samples: int) -> list:
    """
    Samples a function on a uniform exact grid of the domain merged with all breakpoints.

    Parameters
    ----------
    f: PiecewiseFn
        Total function
    samples: int
        Number of uniform grid points, at least 2

    Returns
    -------
    list
        Sorted list of (x, XInterval) pairs

    """
    if samples < 2:
        raise ValueError(f"At least 2 samples are required, got {samples}")
    a, b = f.domain
    xs = {a + (b - a) * Rational(k, samples - 1) for k in range(samples)}
    xs.update(f.breakpoints)
    return [(x, pw_eval(f, x)) for x in sorted(xs)]


def _csv_number(value) -> str:
    if is_infinite(value):
        return "inf" if value == POS_INF else "-inf"
    value = Rational(value)
    if value.q == 1:
        return str(value.p)
    return repr(float(value))


def write_csv(f: PiecewiseFn, samples: int, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "lo", "hi"])
    for x, value in sample_grid(f, samples):
        writer.writerow([_csv_number(x), _csv_number(value.lo), _csv_number(value.hi)])


def _float(value) -> float:
    if is_infinite(value):
        return float("inf") if value == POS_INF else float("-inf")
    return float(value)


def to_dataset(f: PiecewiseFn, samples: int) -> xarray.Dataset:
    """
    Labelled sample grid of a function with coordinate x and data variables lo and hi
    """
    rows = sample_grid(f, samples)
    x = np.array([_float(x) for x, _ in rows])
    lo = np.array([_float(v.lo) for _, v in rows])
    hi = np.array([_float(v.hi) for _, v in rows])
    xds = xarray.Dataset(
        {"lo": (("x",), lo), "hi": (("x",), hi)},
        coords={"x": x},
        attrs={"function": format_fn(f), "samples": samples},
    )
    return xds


def save(xds: xarray.Dataset, path: str, outformat: str):
    if outformat == "netcdf":
        save_as_netcdf(xds, path)
    elif outformat == "zarr":
        save_as_zarr(xds, path)
    else:
        logger.warning(f"Unsupported output format '{outformat}'. Sample grid will be stored as NetCDF.")
        save_as_netcdf(xds, path)


def save_as_netcdf(xds: xarray.Dataset, path: str):
    """
    Save a xarray.Dataset as NetCDF and prints the progress

    Parameters
    ----------
    xds: xarray.Dataset
        Dataset
    path: str
        Path, which will be used to store the dataset as NetCDF file

    """
    with ProgressBar(out=sys.stderr):
        xds.to_netcdf(path, engine="h5netcdf")


def save_as_zarr(xds: xarray.Dataset, path: str):
    """
    Save a xarray.Dataset as Zarr and prints the progress

    Parameters
    ----------
    xds: xarray.Dataset
        Dataset
    path: str
        Path, which will be used to store the dataset as Zarr file

    """
    with ProgressBar(out=sys.stderr):
        xds.to_zarr(path, mode="w")


def _segment_curves(f: PiecewiseFn, i: int, samples: int) -> tuple:
    """
    Polylines of the lower and upper segment expressions on a closed segment. Endpoints at poles are replaced by the
    one-sided limits, infinite ones are dropped.
    """
    left, right = f.segment_bounds(i)
    lo_fn, hi_fn = f.segments[i]
    count = max(samples * (right - left) / (f.domain[1] - f.domain[0]), 2)
    xs = [left + (right - left) * Rational(k, int(count)) for k in range(int(count) + 1)]
    curves = []
    for fn in (lo_fn, hi_fn):
        px, py = [], []
        for x in xs:
            if fn.den_vanishes_at(x):
                y = rf_limit(fn, x, side="right" if x == left else "left")
            else:
                y = rf_eval(fn, x)
            if is_infinite(y):
                continue
            px.append(float(x))
            py.append(float(y))
        curves.append((np.array(px), np.array(py)))
    return curves


def _y_limits(finite: np.ndarray) -> tuple:
    if finite.size == 0:
        return -1.0, 1.0
    q_lo, q_hi = np.percentile(finite, [5, 95])
    pad = max((q_hi - q_lo) * 0.25, 1.0)
    return max(finite.min(), q_lo - pad) - 0.05 * pad, min(finite.max(), q_hi + pad) + 0.05 * pad


def _draw(ax, f: PiecewiseFn, samples: int, color: str, label: str) -> list:
    finite = []
    for i in range(len(f.segments)):
        (lx, ly), (hx, hy) = _segment_curves(f, i, samples)
        ax.plot(lx, ly, color=color, linewidth=1.2, label=label if i == 0 else None)
        if not f.segments[i][0] == f.segments[i][1]:
            ax.plot(hx, hy, color=color, linewidth=1.2)
            if lx.size == hx.size and np.array_equal(lx, hx):
                ax.fill_between(lx, ly, hy, color=color, alpha=0.2)
        finite.extend(ly.tolist())
        finite.extend(hy.tolist())
    for x, value in zip(f.breakpoints, f.values):
        finite.extend(_float(v) for v in (value.lo, value.hi) if not is_infinite(v))
    return finite


def _draw_breakpoints(ax, f: PiecewiseFn, color: str, ylim: tuple):
    for x, value in zip(f.breakpoints, f.values):
        lo = max(_float(value.lo), ylim[0])
        hi = min(_float(value.hi), ylim[1])
        if value.is_proper:
            ax.vlines(float(x), lo, hi, colors=color, linewidth=2.5)
        if value.hi == POS_INF:
            ax.plot([float(x)], [ylim[1]], marker="^", color=color, linestyle="none")
        if value.lo == NEG_INF:
            ax.plot([float(x)], [ylim[0]], marker="v", color=color, linestyle="none")


def render_svg(fs: list, path: str, samples: int, labels: list = None):
    """
    Renders one function, or an overlay of two, as SVG with a fixed 800x600 view box. Proper breakpoint values are
    drawn as vertical bars, infinite values as markers on the clipped y range.

    Parameters
    ----------
    fs: list of PiecewiseFn
        Functions to draw
    path: str
        Output file
    samples: int
        Number of sampling points across the domain
    labels: list of str
        Legend labels

    """
    if samples < 2:
        raise ValueError(f"At least 2 samples are required, got {samples}")
    matplotlib.rcParams["svg.hashsalt"] = "hnfpyalgebra"
    colors = ["tab:blue", "tab:red"]
    labels = labels or [None] * len(fs)
    fig, ax = plt.subplots(figsize=(SVG_WIDTH / SVG_DPI, SVG_HEIGHT / SVG_DPI), dpi=SVG_DPI)
    try:
        finite = []
        for k, f in enumerate(fs):
            finite.extend(_draw(ax, f, samples, colors[k % len(colors)], labels[k]))
        ylim = _y_limits(np.array(finite, dtype=float))
        for k, f in enumerate(fs):
            _draw_breakpoints(ax, f, colors[k % len(colors)], ylim)
        ax.set_ylim(*ylim)
        ax.set_xlim(float(fs[0].domain[0]), float(fs[0].domain[1]))
        ax.set_xlabel("x")
        ax.grid(True, linewidth=0.3)
        if any(labels):
            ax.legend(loc="best")
        fig.savefig(path, format="svg", dpi=SVG_DPI, metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.info(f"Rendered {len(fs)} function(s) to {path}")


def compare_plot(f: PiecewiseFn, g: PiecewiseFn, path: str, samples: int):
    render_svg([f, g], path, samples, labels=["f", "g"])


def emit_plot(f: PiecewiseFn, path: str, samples: int, outformat: str = "csv", stream=None):
    """
    Writes the sample grid of a function.

    Parameters
    ----------
    f: PiecewiseFn
        Total function
    path: str
        Output path. If None, CSV is written to stream.
    samples: int
        Number of uniform grid points, at least 2
    outformat: str
        One of 'csv', 'svg', 'netcdf', 'zarr'
    stream:
        Text stream for CSV output without a path

    """
    if outformat == "csv":
        if path is None:
            write_csv(f, samples, stream or sys.stdout)
        else:
            with open(path, "w", newline="") as out:
                write_csv(f, samples, out)
    elif outformat == "svg":
        render_svg([f], path, samples)
    elif outformat in ("netcdf", "zarr"):
        save(to_dataset(f, samples), path, outformat)
    else:
        raise ValueError(f"Unsupported plot format '{outformat}'. Supported: 'csv', 'svg', 'netcdf', 'zarr'.")
