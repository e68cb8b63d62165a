"""Training-history chart as a self-contained two-panel SVG.

No display server and no imaging dependency: the file is built with the
stdlib XML tree, which also guarantees well-formed output.  Each panel
``<g>`` carries ``data-*`` attributes describing the linear axis mapping

    x_px = plot_x + (iter - x_min) / (x_max - x_min) * plot_w
    y_px = plot_y + (1 - (value - y_min) / (y_max - y_min)) * plot_h

so tests (or downstream tools) can invert pixel coordinates back into
data values without guessing.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .errors import InvalidInput

SVG_NS = "http://www.w3.org/2000/svg"

_WIDTH = 960
_HEIGHT = 380
_PLOT_W = 360.0
_PLOT_H = 260.0
_PLOT_Y = 60.0
_PANEL_X = {"accuracy": 70.0, "loss": 550.0}
_STROKE = {"accuracy": "#1f77b4", "loss": "#d62728"}


def _fmt(v):
    return f"{v:.9f}"


def _panel(svg, name, title, iterations, values, y_min, y_max):
    x_min = 1.0
    x_max = float(iterations[-1]) if iterations[-1] > 1 else 2.0
    plot_x = _PANEL_X[name]
    group = ET.SubElement(svg, "g", {
        "data-panel": name,
        "data-x-min": repr(x_min),
        "data-x-max": repr(x_max),
        "data-y-min": repr(y_min),
        "data-y-max": repr(y_max),
        "data-plot-x": repr(plot_x),
        "data-plot-y": repr(_PLOT_Y),
        "data-plot-w": repr(_PLOT_W),
        "data-plot-h": repr(_PLOT_H),
    })
    ET.SubElement(group, "rect", {
        "x": _fmt(plot_x), "y": _fmt(_PLOT_Y),
        "width": _fmt(_PLOT_W), "height": _fmt(_PLOT_H),
        "fill": "none", "stroke": "#444444",
    })
    title_el = ET.SubElement(group, "text", {
        "x": _fmt(plot_x + _PLOT_W / 2), "y": _fmt(_PLOT_Y - 20),
        "text-anchor": "middle", "font-size": "16",
    })
    title_el.text = title
    for value, frac in ((y_min, 0.0), (y_max, 1.0)):
        tick = ET.SubElement(group, "text", {
            "x": _fmt(plot_x - 8),
            "y": _fmt(_PLOT_Y + (1 - frac) * _PLOT_H + 4),
            "text-anchor": "end", "font-size": "11",
        })
        tick.text = f"{value:.4g}"
    for value, frac in ((x_min, 0.0), (x_max, 1.0)):
        tick = ET.SubElement(group, "text", {
            "x": _fmt(plot_x + frac * _PLOT_W),
            "y": _fmt(_PLOT_Y + _PLOT_H + 16),
            "text-anchor": "middle", "font-size": "11",
        })
        tick.text = f"{value:g}"
    xlabel = ET.SubElement(group, "text", {
        "x": _fmt(plot_x + _PLOT_W / 2), "y": _fmt(_PLOT_Y + _PLOT_H + 36),
        "text-anchor": "middle", "font-size": "12",
    })
    xlabel.text = "objective evaluation"

    def to_px(it, value):
        x = plot_x + (it - x_min) / (x_max - x_min) * _PLOT_W
        y = _PLOT_Y + (1.0 - (value - y_min) / (y_max - y_min)) * _PLOT_H
        return x, y

    points = [to_px(it, v) for it, v in zip(iterations, values)]
    ET.SubElement(group, "polyline", {
        "data-series": name,
        "points": " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points),
        "fill": "none", "stroke": _STROKE[name], "stroke-width": "1.5",
    })
    for x, y in points:
        ET.SubElement(group, "circle", {
            "cx": _fmt(x), "cy": _fmt(y), "r": "2.0",
            "fill": _STROKE[name],
        })


def render_history_svg(history, path):
    """Write the accuracy / loss chart for a list of history records."""
    history = list(history)
    if not history:
        raise InvalidInput("history has no records to plot")
    iterations = [rec.iteration for rec in history]
    accuracy = [rec.train_acc for rec in history]
    losses = [rec.loss for rec in history]

    svg = ET.Element("svg", {
        "xmlns": SVG_NS,
        "width": str(_WIDTH),
        "height": str(_HEIGHT),
        "viewBox": f"0 0 {_WIDTH} {_HEIGHT}",
    })
    loss_top = max(losses)
    loss_top = 1.05 * loss_top if loss_top > 0 else 1.0
    _panel(svg, "accuracy", "train accuracy", iterations, accuracy, 0.0, 1.0)
    _panel(svg, "loss", "best loss", iterations, losses, 0.0, loss_top)

    tree = ET.ElementTree(svg)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)
