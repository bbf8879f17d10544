"""Small hand-written SVG charts for the CSV tables the CLI produces.

Kinds:

* ``ratio``: mean ratio against p (log axis), one polyline per n.
* ``epsi``: ``sqrt(p) E psi`` against p (log axis), one polyline per n.
* ``terms``: the four bound terms stacked, one bar per (p, n) cell.

Output is byte-for-byte deterministic for a given CSV.
"""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from xml.sax.saxutils import escape

KINDS = {
    "ratio": ("p", "n", "ratio"),
    "epsi": ("p", "n", "sqrt_p_epsi"),
    "terms": ("p", "n", "term1", "term2", "term3", "term4"),
}
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 130, 40, 50
PALETTE = ("#1b6ca8", "#d1495b", "#00798c", "#edae49", "#6a4c93", "#3d5a40", "#8d6a9f", "#555555")


class SchemaError(ValueError):
    pass


def read_table(path, kind):
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {sorted(KINDS)}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in KINDS[kind]:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r} required for kind {kind!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: CSV has a header but no data rows")
    return rows


def _num(s):
    try:
        return float(s)
    except (TypeError, ValueError):
        return math.nan


def _fmt(x):
    return f"{x:.2f}"


def _series(rows, ycol):
    """Mean of ``ycol`` per (n, p), skipping NaN cells."""
    acc = defaultdict(list)
    for r in rows:
        p, n, y = _num(r["p"]), _num(r["n"]), _num(r[ycol])
        if math.isfinite(p) and math.isfinite(y) and p > 0:
            acc[(n, p)].append(y)
    series = defaultdict(list)
    for (n, p), ys in sorted(acc.items()):
        series[n].append((p, sum(ys) / len(ys)))
    return dict(sorted(series.items()))


class _Canvas:
    def __init__(self, title):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        ]

    def add(self, s):
        self.parts.append(s)

    def text(self, x, y, s, anchor="middle", **kw):
        extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in kw.items())
        self.add(f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}"{extra}>{escape(s)}</text>')

    def render(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / count))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= count:
            step *= m
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def _frame(cv, xlab, ylab, xticks, yticks, xmap, ymap):
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    cv.add(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#333"/>')
    for v, label in xticks:
        x = xmap(v)
        cv.add(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="#333"/>')
        cv.text(x, y0 + 18, label)
    for v in yticks:
        y = ymap(v)
        cv.add(f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="#333"/>')
        cv.add(f'<line x1="{x0}" y1="{_fmt(y)}" x2="{x1}" y2="{_fmt(y)}" stroke="#ddd"/>')
        cv.text(x0 - 8, y + 4, f"{v:g}", anchor="end")
    cv.text((x0 + x1) / 2, HEIGHT - 12, xlab)
    cv.text(18, (y0 + y1) / 2, ylab, transform=f"rotate(-90 18 {_fmt((y0 + y1) / 2)})")


def _line_chart(series, title, ylab):
    pts = [pt for s in series.values() for pt in s]
    if not pts:
        raise SchemaError("no finite values to plot")
    lx = [math.log10(p) for p, _ in pts]
    ys = [y for _, y in pts]
    xlo, xhi = min(lx), max(lx)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    ylo, yhi = min(0.0, min(ys)), max(ys)
    if yhi == ylo:
        yhi = ylo + 1.0
    yhi *= 1.05
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP

    def xmap(v):
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def ymap(v):
        return y0 - (v - ylo) / (yhi - ylo) * (y0 - y1)

    cv = _Canvas(title)
    xticks = sorted({(math.log10(p), f"{p:g}") for p, _ in pts})
    _frame(cv, "p (log scale)", ylab, xticks, _ticks(ylo, yhi), xmap, ymap)
    for i, (n, s) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(xmap(math.log10(p)))},{_fmt(ymap(y))}" for p, y in s)
        cv.add(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for p, y in s:
            cv.add(f'<circle cx="{_fmt(xmap(math.log10(p)))}" cy="{_fmt(ymap(y))}" r="3" fill="{color}"/>')
        ly = TOP + 16 + 18 * i
        cv.add(f'<line x1="{x1 + 12}" y1="{ly - 4}" x2="{x1 + 32}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        cv.text(x1 + 38, ly, f"n = {n:g}", anchor="start")
    return cv.render()


def _terms_chart(rows):
    cells = defaultdict(lambda: [[], [], [], []])
    for r in rows:
        key = (_num(r["n"]), _num(r["p"]))
        for j in range(4):
            v = _num(r[f"term{j + 1}"])
            if math.isfinite(v):
                cells[key][j].append(v)
    bars = [(k, [sum(v) / len(v) if v else 0.0 for v in vals]) for k, vals in sorted(cells.items())]
    if not bars:
        raise SchemaError("no finite values to plot")
    tops = [sum(max(t, 0.0) for t in b) for _, b in bars]
    yhi = max(tops) * 1.05 or 1.0
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP
    slot = (x1 - x0) / len(bars)

    def ymap(v):
        return y0 - v / yhi * (y0 - y1)

    cv = _Canvas("Bound terms per cell")
    _frame(cv, "cell (n, p)", "term value", [], _ticks(0.0, yhi), lambda v: v, ymap)
    for i, ((n, p), vals) in enumerate(bars):
        base = 0.0
        bx = x0 + i * slot + 0.15 * slot
        for j, v in enumerate(vals):
            v = max(v, 0.0)
            cv.add(f'<rect x="{_fmt(bx)}" y="{_fmt(ymap(base + v))}" width="{_fmt(0.7 * slot)}" '
                   f'height="{_fmt(ymap(base) - ymap(base + v))}" fill="{PALETTE[j]}"/>')
            base += v
        if len(bars) <= 24:
            cv.text(bx + 0.35 * slot, y0 + 18, f"{n:g},{p:g}", font_size="9")
    for j in range(4):
        ly = TOP + 16 + 18 * j
        cv.add(f'<rect x="{x1 + 12}" y="{ly - 10}" width="14" height="10" fill="{PALETTE[j]}"/>')
        cv.text(x1 + 32, ly, f"term{j + 1}", anchor="start")
    return cv.render()


def render(rows, kind) -> str:
    if kind == "ratio":
        return _line_chart(_series(rows, "ratio"), "Variance ratio against p", "Var / (lambda^2 E)")
    if kind == "epsi":
        return _line_chart(_series(rows, "sqrt_p_epsi"), "Normalized E psi against p", "sqrt(p) E psi")
    if kind == "terms":
        return _terms_chart(rows)
    raise ValueError(f"unknown plot kind {kind!r}")


def plot_csv(csv_path, kind, out_path) -> str:
    """Render ``csv_path`` and write ``out_path``; nothing is written on error."""
    svg = render(read_table(csv_path, kind), kind)
    with open(out_path, "w", newline="\n") as fh:
        fh.write(svg)
    return svg
