"""Minimal deterministic SVG line charts.

No plotting dependency: the writer emits a fixed-layout chart with one
polyline per series. Output bytes depend only on the input values.
"""

from __future__ import annotations

from .errors import ArgumentError

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 78
MARGIN_RIGHT = 24
MARGIN_TOP = 42
MARGIN_BOTTOM = 58

PALETTE = ["#1f6fb2", "#c4452c", "#3a8f4d", "#8e4fa8", "#b28619", "#3b3b3b"]


def _fmt(v: float) -> str:
    return format(float(v), ".2f")


def _sci(v: float) -> str:
    return format(float(v), ".3g")


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def write_line_chart(path, title: str, x_label: str, y_label: str, series):
    """Write a line chart; series is a list of (name, xs, ys) triples."""
    if not series:
        raise ArgumentError("chart needs at least one series")
    for name, xs, ys in series:
        if len(xs) != len(ys) or not len(xs):
            raise ArgumentError(f"series {name!r} needs matching nonempty x and y")
    all_x = [float(x) for _, xs, _ in series for x in xs]
    all_y = [float(y) for _, _, ys in series for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    out.append(
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{_esc(title)}</text>'
    )
    axis_y = HEIGHT - MARGIN_BOTTOM
    out.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{axis_y}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{WIDTH - MARGIN_RIGHT}" y2="{axis_y}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{axis_y}" x2="{_fmt(x)}" y2="{axis_y + 5}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{axis_y + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_esc(_sci(t))}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        out.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{_fmt(y)}" x2="{MARGIN_LEFT}" y2="{_fmt(y)}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_esc(_sci(t))}</text>'
        )
    out.append(
        f'<text x="{MARGIN_LEFT + plot_w // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {MARGIN_TOP + plot_h // 2})">{_esc(y_label)}</text>'
    )
    for si, (name, xs, ys) in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(float(x)))},{_fmt(py(float(y)))}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>'
        )
        for x, y in zip(xs, ys):
            out.append(
                f'<circle cx="{_fmt(px(float(x)))}" cy="{_fmt(py(float(y)))}" r="3" '
                f'fill="{color}"/>'
            )
        ly = MARGIN_TOP + 14 + 16 * si
        lx = WIDTH - MARGIN_RIGHT - 150
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{_esc(name)}</text>'
        )
    out.append("</svg>")
    data = "\n".join(out) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(data)
