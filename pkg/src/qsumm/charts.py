"""Self-contained SVG charts for experiment comparisons."""

from xml.sax.saxutils import escape

_PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1"]


def _fmt(x):
    return f"{x:.2f}"


def bar_chart(names, means, stds, title="F1 ROUGE-SU4 (mean over folds)",
              width=640, height=400):
    """One bar per run, with +/- one std error bars.

    Each bar is a ``<rect class="bar">`` carrying ``data-mean`` and
    ``data-std`` attributes so the chart can be checked against the CSV.
    """
    left, right, top, bottom = 60, 20, 40, 80
    plot_w = width - left - right
    plot_h = height - top - bottom
    ymax = max([m + s for m, s in zip(means, stds)] + [1e-9])
    ymax = min(1.0, ymax * 1.15) if ymax <= 1.0 else ymax * 1.15

    def y(v):
        return top + plot_h * (1.0 - v / ymax)

    n = len(names)
    slot = plot_w / max(n, 1)
    bw = slot * 0.6
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line class="axis" x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black"/>',
    ]
    for k in range(6):
        v = ymax * k / 5
        out.append(
            f'<text x="{left - 6}" y="{_fmt(y(v) + 4)}" text-anchor="end">{v:.2f}</text>'
        )
    for i, (name, m, s) in enumerate(zip(names, means, stds)):
        cx = left + slot * (i + 0.5)
        x0 = cx - bw / 2
        color = _PALETTE[i % len(_PALETTE)]
        out.append(
            f'<rect class="bar" data-name="{escape(name)}" data-mean="{m:.6f}" data-std="{s:.6f}" '
            f'x="{_fmt(x0)}" y="{_fmt(y(m))}" width="{_fmt(bw)}" '
            f'height="{_fmt(y(0) - y(m))}" fill="{color}"/>'
        )
        lo, hi = max(0.0, m - s), m + s
        out.append(
            f'<g class="errorbar" stroke="black">'
            f'<line x1="{_fmt(cx)}" y1="{_fmt(y(lo))}" x2="{_fmt(cx)}" y2="{_fmt(y(hi))}"/>'
            f'<line x1="{_fmt(cx - 6)}" y1="{_fmt(y(hi))}" x2="{_fmt(cx + 6)}" y2="{_fmt(y(hi))}"/>'
            f'<line x1="{_fmt(cx - 6)}" y1="{_fmt(y(lo))}" x2="{_fmt(cx + 6)}" y2="{_fmt(y(lo))}"/>'
            f"</g>"
        )
        out.append(
            f'<text x="{_fmt(cx)}" y="{top + plot_h + 16}" text-anchor="middle">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def fold_lines(names, fold_means, title="F1 ROUGE-SU4 per fold", width=640, height=400):
    """Per-fold line chart, one polyline per run."""
    left, right, top, bottom = 60, 140, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    n_folds = len(fold_means)
    vals = [v for row in fold_means for v in row] or [0.0]
    lo, hi = min(vals), max(vals)
    pad = (hi - lo) * 0.1 or 0.05
    lo, hi = max(0.0, lo - pad), hi + pad

    def px(i):
        return left + (plot_w * i / max(n_folds - 1, 1))

    def py(v):
        return top + plot_h * (1.0 - (v - lo) / (hi - lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<text x="{(left + plot_w / 2):.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for i in range(n_folds):
        out.append(f'<text x="{_fmt(px(i))}" y="{top + plot_h + 16}" text-anchor="middle">{i + 1}</text>')
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        out.append(f'<text x="{left - 6}" y="{_fmt(py(v) + 4)}" text-anchor="end">{v:.3f}</text>')
    for j, name in enumerate(names):
        color = _PALETTE[j % len(_PALETTE)]
        pts = " ".join(f"{_fmt(px(i))},{_fmt(py(row[j]))}" for i, row in enumerate(fold_means))
        out.append(f'<polyline class="run" data-name="{escape(name)}" points="{pts}" '
                   f'fill="none" stroke="{color}" stroke-width="2"/>')
        ly = top + 16 * j
        out.append(f'<rect x="{left + plot_w + 10}" y="{ly}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{left + plot_w + 26}" y="{ly + 9}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
