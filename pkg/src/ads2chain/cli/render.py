"""Deterministic SVG rendering of result CSVs."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .output import read_csv

RENDER_KINDS = ("heatmap", "line")
_DEFAULTS = {
    "heatmap": {"x": "m", "y": "mu", "z": "E0"},
    "line": {"x": "t", "y": "value", "group": None},
}


class SchemaError(ValueError):
    pass


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "ads2chain"
    matplotlib.rcParams["svg.fonttype"] = "path"
    matplotlib.rcParams["path.simplify"] = False
    return plt


def _col(header, data, name):
    if name not in header:
        raise SchemaError(f"column {name!r} not found; available: {', '.join(header)}")
    return data[:, header.index(name)]


def _heatmap(ax, fig, header, data, x, y, z):
    xs, ys, zs = _col(header, data, x), _col(header, data, y), _col(header, data, z)
    ux, uy = np.unique(xs), np.unique(ys)
    if len(ux) * len(uy) != len(zs):
        raise SchemaError("heatmap data is not a full rectangular grid")
    grid = np.full((len(uy), len(ux)), np.nan)
    grid[np.searchsorted(uy, ys), np.searchsorted(ux, xs)] = zs

    def edges(u):
        if len(u) == 1:
            return np.array([u[0] - 0.5, u[0] + 0.5])
        mid = (u[1:] + u[:-1]) / 2
        return np.concatenate([[2 * u[0] - mid[0]], mid, [2 * u[-1] - mid[-1]]])

    finite = grid[np.isfinite(grid)]
    signed = finite.size and finite.min() < 0 < finite.max()
    if signed:
        lim = float(np.abs(finite).max())
        mesh = ax.pcolormesh(edges(ux), edges(uy), grid, cmap="RdBu_r", vmin=-lim, vmax=lim)
    else:
        mesh = ax.pcolormesh(edges(ux), edges(uy), grid, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=z)
    ax.set_xlabel(x)
    ax.set_ylabel(y)


def _lines(ax, header, data, x, y, group):
    xs, ys = _col(header, data, x), _col(header, data, y)
    if group:
        keys = np.column_stack([_col(header, data, g) for g in group])
        uniq = np.unique(keys, axis=0)
        for key in uniq:
            sel = np.all(keys == key, axis=1)
            label = ", ".join(f"{g}={v:g}" for g, v in zip(group, key))
            ax.plot(xs[sel], ys[sel], lw=1.2, label=label)
        ax.legend(fontsize=7)
    else:
        ax.plot(xs, ys, lw=1.2)
    ax.set_xlabel(x)
    ax.set_ylabel(y)


def render(csv_path, kind: str, out=None, x=None, y=None, z=None, group=None) -> Path:
    """Render ``csv_path`` as SVG and return the written path.

    Identical inputs give byte-identical files (fixed hash salt, no date).
    Nothing is written when the CSV is empty or does not match ``kind``.
    """
    if kind not in RENDER_KINDS:
        raise SchemaError(f"unknown render kind {kind!r}; choose from {RENDER_KINDS}")
    header, data = read_csv(csv_path)
    if data.shape[0] == 0:
        raise SchemaError(f"{csv_path} has no data rows")
    d = _DEFAULTS[kind]
    x = x or d["x"]
    y = y or d["y"]
    if kind == "line" and group is None:
        group = [c for c in ("W", "horizon_radius", "m", "num_sites") if c in header and c != x]
        group = [g for g in group if len(np.unique(_col(header, data, g))) > 1] or None
    # validate before touching matplotlib so errors never leave files behind
    for c in [x, y] + ([z or d.get("z")] if kind == "heatmap" else []) + list(group or []):
        _col(header, data, c)

    plt = _mpl()
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    try:
        if kind == "heatmap":
            _heatmap(ax, fig, header, data, x, y, z or d["z"])
        else:
            _lines(ax, header, data, x, y, group)
        ax.set_title(Path(csv_path).stem, fontsize=9)
        fig.tight_layout()
        out = Path(out) if out else Path(csv_path).with_suffix(".svg")
        fig.savefig(out, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return out
