"""CSV and standalone SVG rendering for reports, ROC curves and sweep tables."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from ..errors import EmptyInput, UnsupportedFormat
from .geometry import SeparabilityReport
from .metrics import RocCurve
from .protocol import EvalReport, SweepRow

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
SWEEP_HEADER = "horizon_d,n_trees,sample_size,oob_error"
EVAL_HEADER = "model,horizon_d,split,seed,train_rows,test_rows,accuracy,auc,oob_error"
ROC_HEADER = "curve,fpr,tpr,threshold"


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def _csv(obj) -> str:
    if isinstance(obj, EvalReport):
        lines = [EVAL_HEADER]
        for m in obj.metrics:
            lines.append(",".join([m.model, str(obj.horizon_d), obj.split, str(obj.seed),
                                   str(obj.train_rows), str(obj.test_rows), _num(m.accuracy),
                                   _num(m.auc), _num(m.oob_error)]))
        return "\n".join(lines) + "\n"
    if isinstance(obj, SeparabilityReport):
        return ("hull_area_0,hull_area_1,intersection_area,hull_overlap_ratio,verdict\n"
                f"{_num(obj.hull_areas[0])},{_num(obj.hull_areas[1])},{_num(obj.intersection_area)},"
                f"{_num(obj.hull_overlap_ratio)},{obj.verdict}\n")
    items = list(obj)
    if all(isinstance(r, SweepRow) for r in items):
        lines = [SWEEP_HEADER]
        lines += [f"{r.horizon_d},{r.n_trees},{r.sample_size},{_num(r.oob_error)}" for r in items]
        return "\n".join(lines) + "\n"
    if all(isinstance(c, RocCurve) for c in items):
        lines = [ROC_HEADER]
        for i, c in enumerate(items):
            name = c.label or f"curve{i}"
            for f, t, th in zip(c.fpr, c.tpr, c.thresholds):
                lines.append(f"{name},{_num(f)},{_num(t)},{'inf' if math.isinf(th) else _num(th)}")
        return "\n".join(lines) + "\n"
    raise UnsupportedFormat(f"cannot render {type(obj).__name__} as csv")


# SVG

W, H = 480, 400
LEFT, TOP, PLOT = 60, 30, 300


def _f(v: float) -> str:
    return f"{v:.2f}"


def _frame(x_label, y_label, x_ticks, y_ticks, title):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" style="fill:#ffffff"/>',
        f'<text x="{W // 2}" y="18" style="font:14px sans-serif;text-anchor:middle">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" style="fill:none;stroke:#000000"/>',
    ]
    for pos, text in x_ticks:
        x = LEFT + pos * PLOT
        out.append(f'<text x="{_f(x)}" y="{TOP + PLOT + 16}" '
                   f'style="font:10px sans-serif;text-anchor:middle">{escape(text)}</text>')
    for pos, text in y_ticks:
        y = TOP + PLOT - pos * PLOT
        out.append(f'<text x="{LEFT - 6}" y="{_f(y + 3)}" '
                   f'style="font:10px sans-serif;text-anchor:end">{escape(text)}</text>')
    out.append(f'<text x="{LEFT + PLOT // 2}" y="{TOP + PLOT + 34}" '
               f'style="font:12px sans-serif;text-anchor:middle">{escape(x_label)}</text>')
    out.append(f'<text x="16" y="{TOP + PLOT // 2}" transform="rotate(-90 16 {TOP + PLOT // 2})" '
               f'style="font:12px sans-serif;text-anchor:middle">{escape(y_label)}</text>')
    return out


def _polyline(xs, ys, color):
    pts = " ".join(f"{_f(LEFT + x * PLOT)},{_f(TOP + PLOT - y * PLOT)}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" style="fill:none;stroke:{color};stroke-width:2"/>'


def _legend(entries):
    out = []
    for i, (text, color) in enumerate(entries):
        y = TOP + 12 + 18 * i
        x = LEFT + PLOT + 12
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 16}" y2="{y}" style="stroke:{color};stroke-width:2"/>')
        out.append(f'<text x="{x + 20}" y="{y + 4}" style="font:11px sans-serif">{escape(text)}</text>')
    return out


def _ticks01():
    return [(v / 4, f"{v / 4:.2f}") for v in range(5)]


def _roc_svg(curves, title="ROC"):
    out = _frame("False positive rate", "True positive rate", _ticks01(), _ticks01(), title)
    out.append(f'<line x1="{LEFT}" y1="{TOP + PLOT}" x2="{LEFT + PLOT}" y2="{TOP}" '
               'style="stroke:#999999;stroke-dasharray:4 4"/>')
    legend = []
    for i, c in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        out.append(_polyline(c.fpr, c.tpr, color))
        legend.append((f"{c.label or f'curve{i}'} (AUC {c.auc:.3f})", color))
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _sweep_svg(rows):
    counts = sorted({r.n_trees for r in rows})
    lo, hi = min(counts), max(counts)
    span = (hi - lo) or 1
    top = max(r.oob_error for r in rows)
    y_max = max(0.05, math.ceil(top * 20) / 20)
    x_ticks = [((c - lo) / span, str(c)) for c in counts]
    y_ticks = [(v / 4, f"{y_max * v / 4:.3f}") for v in range(5)]
    out = _frame("Number of trees", "OOB error", x_ticks, y_ticks, "OOB error by forest size")
    legend = []
    for i, d in enumerate(sorted({r.horizon_d for r in rows})):
        color = PALETTE[i % len(PALETTE)]
        sel = sorted((r for r in rows if r.horizon_d == d), key=lambda r: r.n_trees)
        out.append(_polyline([(r.n_trees - lo) / span for r in sel],
                             [r.oob_error / y_max for r in sel], color))
        legend.append((f"d = {d}", color))
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _separability_svg(rep: SeparabilityReport):
    pts = [p for h in rep.hulls for p in h]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (x1 - x0) or 1.0
    sy = (y1 - y0) or 1.0
    out = _frame("PC1", "PC2", [(0, f"{x0:.2f}"), (1, f"{x1:.2f}")],
                 [(0, f"{y0:.2f}"), (1, f"{y1:.2f}")],
                 f"Class hulls, overlap {rep.hull_overlap_ratio:.3f}")
    legend = []
    for k, hull in enumerate(rep.hulls):
        color = PALETTE[k]
        ring = list(hull) + list(hull[:1])
        out.append(_polyline([(p[0] - x0) / sx for p in ring], [(p[1] - y0) / sy for p in ring], color))
        legend.append((f"class {k}", color))
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _svg(obj) -> str:
    if isinstance(obj, RocCurve):
        return _roc_svg([obj])
    if isinstance(obj, EvalReport):
        if not obj.curves:
            raise UnsupportedFormat("report carries no ROC curves to plot")
        return _roc_svg(list(obj.curves), f"ROC, horizon {obj.horizon_d}")
    if isinstance(obj, SeparabilityReport):
        return _separability_svg(obj)
    items = list(obj)
    if all(isinstance(r, SweepRow) for r in items):
        return _sweep_svg(items)
    if all(isinstance(c, RocCurve) for c in items):
        return _roc_svg(items)
    raise UnsupportedFormat(f"cannot render {type(obj).__name__} as svg")


def render_report(obj, fmt: str = "csv") -> str:
    """Render an EvalReport, RocCurve(s), sweep rows or SeparabilityReport."""
    if fmt not in ("csv", "svg"):
        raise UnsupportedFormat(f"unsupported format {fmt!r}")
    if isinstance(obj, (list, tuple)) and not obj:
        raise EmptyInput("nothing to render")
    if isinstance(obj, RocCurve):
        return _svg(obj) if fmt == "svg" else _csv([obj])
    return _svg(obj) if fmt == "svg" else _csv(obj)
