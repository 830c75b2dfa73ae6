"""Deterministic static SVG rendering of the CSV artifact kinds.

Hand-rolled SVG with fixed 960x540 viewport and fixed decimal formatting:
byte-identical output for identical inputs is part of the contract, so no
plotting library (whose ids/metadata vary run to run) is involved.
"""

from __future__ import annotations

import math

from .errors import ValidationError

__all__ = ["plot_emit", "PLOT_KINDS"]

WIDTH, HEIGHT = 960, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45

PLOT_KINDS = {
    "spectrum": ("xi", "re", "im"),
    "spacetime-heat": ("t", "xi", "re", "im"),
    "exponent-profile": ("x0", "s_est", "fit_quality"),
    "ray": ("t", "x_sing"),
}


def _read_csv(path, expected_header):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty CSV")
    header = tuple(lines[0].split(","))
    if header != expected_header:
        raise ValidationError(
            f"{path}: header {','.join(header)} does not match expected {','.join(expected_header)}"
        )
    rows = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        rows.append([float(tok) for tok in ln.split(",")])
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return rows


def _f(v: float) -> str:
    return f"{v:.3f}"


class _Canvas:
    def __init__(self, kind: str, config_hash: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f"<!-- conewave kind={kind} config={config_hash} -->",
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="black", width=1.0, dash=""):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{color}" stroke-width="{_f(width)}"{d}/>'
        )

    def polyline(self, pts, color="steelblue", width=1.5):
        body = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{body}" fill="none" stroke="{color}" stroke-width="{_f(width)}"/>'
        )

    def circle(self, x, y, r=3.0, color="crimson"):
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{color}"/>')

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" fill="{color}"/>'
        )

    def text(self, x, y, s, size=12, anchor="start"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" font-size="{size}" '
            f'text-anchor="{anchor}">{s}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Axes:
    def __init__(self, canvas, xmin, xmax, ymin, ymax, xlabel, ylabel):
        if xmax <= xmin:
            xmax = xmin + 1.0
        if ymax <= ymin:
            ymax = ymin + 1.0
        self.c = canvas
        self.xmin, self.xmax, self.ymin, self.ymax = xmin, xmax, ymin, ymax
        self.c.line(MARGIN_L, HEIGHT - MARGIN_B, WIDTH - MARGIN_R, HEIGHT - MARGIN_B)
        self.c.line(MARGIN_L, MARGIN_T, MARGIN_L, HEIGHT - MARGIN_B)
        for i in range(6):
            fx = i / 5.0
            xv = xmin + fx * (xmax - xmin)
            px = self.px(xv)
            self.c.line(px, HEIGHT - MARGIN_B, px, HEIGHT - MARGIN_B + 5)
            self.c.text(px, HEIGHT - MARGIN_B + 18, f"{xv:.4g}", size=10, anchor="middle")
            yv = ymin + fx * (ymax - ymin)
            py = self.py(yv)
            self.c.line(MARGIN_L - 5, py, MARGIN_L, py)
            self.c.text(MARGIN_L - 8, py + 4, f"{yv:.4g}", size=10, anchor="end")
        self.c.text((MARGIN_L + WIDTH - MARGIN_R) / 2, HEIGHT - 8, xlabel, anchor="middle")
        self.c.text(16, MARGIN_T - 8, ylabel)

    def px(self, x):
        return MARGIN_L + (x - self.xmin) / (self.xmax - self.xmin) * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y):
        return HEIGHT - MARGIN_B - (y - self.ymin) / (self.ymax - self.ymin) * (
            HEIGHT - MARGIN_T - MARGIN_B
        )


def _fit_line(xs, ys):
    n = len(xs)
    xm = sum(xs) / n
    ym = sum(ys) / n
    den = sum((x - xm) ** 2 for x in xs)
    if den == 0:
        return 0.0, ym
    slope = sum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / den
    return slope, ym - slope * xm


def _plot_spectrum(rows, canvas):
    pts = []
    for xi, re, im in rows:
        mag = math.hypot(re, im)
        if xi > 0 and mag > 0:
            pts.append((math.log10(xi), math.log10(mag)))
    if not pts:
        raise ValidationError("spectrum plot: no positive-magnitude rows")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    ax = _Axes(canvas, min(xs), max(xs), min(ys), max(ys), "log10 xi", "log10 |spectrum|")
    canvas.polyline([(ax.px(x), ax.py(y)) for x, y in pts])
    slope, icpt = _fit_line(xs, ys)
    canvas.polyline(
        [(ax.px(min(xs)), ax.py(icpt + slope * min(xs))), (ax.px(max(xs)), ax.py(icpt + slope * max(xs)))],
        color="gray",
    )
    canvas.text(WIDTH - MARGIN_R - 10, MARGIN_T + 14, f"slope={slope:.4f}", anchor="end")


def _plot_heat(rows, canvas):
    ts = sorted({r[0] for r in rows})
    xis = sorted({r[1] for r in rows})
    mags = {(r[0], r[1]): math.hypot(r[2], r[3]) for r in rows}
    vmax = max(mags.values()) or 1.0
    ax = _Axes(canvas, min(ts), max(ts), min(xis), max(xis), "t", "xi")
    cw = (WIDTH - MARGIN_L - MARGIN_R) / max(1, len(ts))
    ch = (HEIGHT - MARGIN_T - MARGIN_B) / max(1, len(xis))
    for i, t in enumerate(ts):
        for j, xi in enumerate(xis):
            v = mags.get((t, xi), 0.0) / vmax
            level = int(round(255 * (1.0 - v)))
            color = f"rgb({level},{level},255)"
            canvas.rect(MARGIN_L + i * cw, HEIGHT - MARGIN_B - (j + 1) * ch, cw, ch, color)


def _plot_exponent(rows, canvas):
    xs = [r[0] for r in rows]
    finite = [r[1] for r in rows if math.isfinite(r[1])]
    top = (max(finite) + 1.0) if finite else 1.0
    ys = [r[1] if math.isfinite(r[1]) else top for r in rows]
    ax = _Axes(canvas, min(xs), max(xs), min(ys), max(ys), "x0", "s_est")
    canvas.polyline([(ax.px(x), ax.py(y)) for x, y in zip(xs, ys)])
    for x, y, raw in zip(xs, ys, (r[1] for r in rows)):
        canvas.circle(ax.px(x), ax.py(y), 2.0, "crimson" if math.isfinite(raw) else "lightgray")


def _plot_ray(rows, canvas):
    ts = [r[0] for r in rows]
    xs = [r[1] for r in rows]
    span = max(max(map(abs, ts)), max(map(abs, xs)), 0.5)
    ax = _Axes(canvas, min(ts), max(ts), -span, span, "t", "x_sing")
    for sgn in (1.0, -1.0):  # light-cone reference lines x = +-t
        canvas.polyline(
            [(ax.px(min(ts)), ax.py(sgn * min(ts))), (ax.px(max(ts)), ax.py(sgn * max(ts)))],
            color="lightgray",
        )
    slope, icpt = _fit_line(ts, xs)
    canvas.polyline(
        [(ax.px(min(ts)), ax.py(icpt + slope * min(ts))), (ax.px(max(ts)), ax.py(icpt + slope * max(ts)))],
        color="gray",
    )
    for t, x in zip(ts, xs):
        canvas.circle(ax.px(t), ax.py(x))
    canvas.text(WIDTH - MARGIN_R - 10, MARGIN_T + 14, f"c_est={-slope:.4f}", anchor="end")


_RENDERERS = {
    "spectrum": _plot_spectrum,
    "spacetime-heat": _plot_heat,
    "exponent-profile": _plot_exponent,
    "ray": _plot_ray,
}


def plot_emit(csv_path, kind: str, out_path, config_hash: str = "") -> None:
    """Render one CSV artifact to a deterministic SVG file."""
    if kind not in PLOT_KINDS:
        raise ValidationError(f"unknown plot kind {kind!r}; expected one of {sorted(PLOT_KINDS)}")
    rows = _read_csv(csv_path, PLOT_KINDS[kind])
    canvas = _Canvas(kind, config_hash)
    _RENDERERS[kind](rows, canvas)
    with open(out_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(canvas.render())
