"""CSV / JSON / SVG emission for row dataclasses.

Every row type is a dataclass; its field order is the column order. Floats
are written with 12 significant digits, so parsing a file and writing it
again reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import typing
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigError, EmptyInput


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _parse(text: str, kind):
    if kind is bool:
        return bool(int(text))
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


def columns(row_type) -> list[str]:
    return [f.name for f in dataclasses.fields(row_type)]


def rows_to_csv(rows, row_type=None) -> str:
    """CSV text; an empty table needs ``row_type`` to produce its header."""
    if not rows and row_type is None:
        raise EmptyInput("no rows to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = columns(row_type or type(rows[0]))
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(getattr(row, c)) for c in cols])
    return buf.getvalue()


def read_csv_rows(path, row_type) -> list:
    hints = typing.get_type_hints(row_type)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != columns(row_type):
            raise ConfigError(f"unexpected CSV header {header}")
        return [row_type(**{c: _parse(v, hints[c]) for c, v in zip(header, rec)}) for rec in reader]


def rows_to_json(rows, summary: dict | None = None, row_type=None) -> str:
    cols = columns(row_type or type(rows[0])) if rows or row_type else []

    def clean(v):
        if isinstance(v, (float, np.floating)):
            v = float(_fmt(v))
            return None if not math.isfinite(v) else v
        if isinstance(v, (bool, np.bool_)):
            return int(v)
        if isinstance(v, (int, np.integer)):
            return int(v)
        return v

    doc = {"columns": cols, "rows": [{c: clean(getattr(r, c)) for c in cols} for r in rows]}
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def emit_report(rows, fmt: str, out_dir, stem: str, summary: dict | None = None,
                row_type=None) -> list[Path]:
    """Write ``rows`` as ``<stem>.csv``, ``<stem>.json`` or SVG plots; returns the files."""
    out_dir = Path(out_dir)
    if fmt == "csv":
        return [_write(out_dir / f"{stem}.csv", rows_to_csv(rows, row_type))]
    if fmt == "json":
        return [_write(out_dir / f"{stem}.json", rows_to_json(rows, summary, row_type))]
    if fmt == "svg":
        if not rows:
            raise EmptyInput("svg output needs at least one row")
        plots = svg_plots(rows)
        return [_write(out_dir / f"{stem}_{name}.svg", text) for name, text in plots.items()]
    raise ConfigError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------- svg

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def svg_plot(series, title: str, xlabel: str, ylabel: str, logx=False, logy=False,
             width=640, height=420) -> str:
    """Line plot with one ``<polyline>`` per series.

    ``series`` is a list of ``(label, xs, ys, dashed, markers)``.
    """
    if not series:
        raise EmptyInput("nothing to plot")
    tx = np.log10 if logx else (lambda v: np.asarray(v, dtype=float))
    ty = np.log10 if logy else (lambda v: np.asarray(v, dtype=float))
    allx = np.concatenate([tx(np.asarray(s[1], dtype=float)) for s in series])
    ally = np.concatenate([ty(np.asarray(s[2], dtype=float)) for s in series])
    allx, ally = allx[np.isfinite(allx)], ally[np.isfinite(ally)]
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    ml, mr, mt, mb = 70, 150, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    def px(v):
        return ml + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (ty(v) - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">'
        f"{escape(xlabel)}</text>",
        f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {mt + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for i, (label, xs, ys, dashed, markers) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        ok = np.isfinite(tx(xs)) & np.isfinite(ty(ys))
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs[ok], ys[ok]))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        if markers:
            parts.extend(
                f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>'
                for a, b in zip(xs[ok], ys[ok])
            )
        ly = mt + 14 + 16 * i
        parts.append(f'<text x="{ml + pw + 8}" y="{ly}" font-size="11" fill="{color}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _group(rows, keys):
    groups: dict = {}
    for r in rows:
        groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(r)
    return groups


def svg_plots(rows) -> dict[str, str]:
    """Plots appropriate to the row type, keyed by file suffix."""
    names = set(columns(type(rows[0])))
    if {"h1", "avg_growth"} <= names:
        return _sandwich_plots(rows)
    if "max_beta_over_sqrt_lambda" in names:
        series = []
        for (surf, q, a), grp in sorted(_group(rows, ("surface", "q", "alpha")).items()):
            grp = sorted(grp, key=lambda r: r.lam)
            series.append((f"{surf} q={q:g} a={a:g}", [r.lam for r in grp],
                           [r.max_beta_over_sqrt_lambda for r in grp], False, True))
        return {"plot": svg_plot(series, "max growth exponent / sqrt(lambda)", "lambda",
                                 "max beta / sqrt(lambda)", logx=True, logy=True)}
    raise ConfigError("svg output is only available for sandwich and dfscan tables")


def _sandwich_plots(rows) -> dict[str, str]:
    groups = sorted(_group(rows, ("surface", "q", "alpha")).items())
    scatter, h1 = [], []
    a_all = [r.avg_growth for r in rows if math.isfinite(r.avg_growth)]
    a_lo, a_hi = min(a_all), max(a_all)
    a_grid = np.linspace(min(0.0, a_lo), a_hi * 1.1, 32)
    for (surf, q, a), grp in groups:
        grp = sorted(grp, key=lambda r: r.avg_growth)
        label = f"{surf} q={q:g} a={a:g}"
        scatter.append((label, [r.avg_growth for r in grp],
                        [r.h1 / math.sqrt(r.lam) for r in grp], False, True))
    c1 = min(r.lower_ratio for r in rows)
    c2 = max(r.upper_ratio for r in rows)
    scatter.append((f"c1*A (c1={c1:.3g})", a_grid, c1 * a_grid, True, False))
    scatter.append((f"c2*(A+1) (c2={c2:.3g})", a_grid, c2 * (a_grid + 1.0), True, False))

    by_surface = sorted(_group(rows, ("surface",)).items())
    lam_all = np.array([r.lam for r in rows])
    lam_grid = np.geomspace(lam_all.min(), lam_all.max(), 48)
    for (surf,), grp in by_surface:
        seen = {}
        for r in grp:
            seen.setdefault(r.lam, r.h1)
        lam = sorted(seen)
        h1.append((f"{surf} H1", lam, [seen[v] for v in lam], False, True))
    ref = rows[int(np.argmin(lam_all))]
    c = ref.h1 / math.sqrt(ref.lam)
    h1.append(("sqrt(lambda)", lam_grid, c * np.sqrt(lam_grid), True, False))
    h1.append(("lambda^(3/4)", lam_grid, c * ref.lam**-0.25 * lam_grid**0.75, True, False))
    return {
        "scatter": svg_plot(scatter, "nodal length vs average growth", "A (average growth)",
                            "H1 / sqrt(lambda)"),
        "h1": svg_plot(h1, "nodal length vs eigenvalue", "lambda", "H1", logx=True, logy=True),
    }
