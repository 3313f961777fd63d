"""Chart export: TSV, JSON and a plain SVG drawing (x = t - s, y = s)."""
from __future__ import annotations

import json
from typing import List, Optional

import numpy as np

from .koszul import ExtChart

TSV_HEADER = "s\tt\tdim\tgenerators"


def chart_tsv(chart: ExtChart) -> str:
    lines = [TSV_HEADER]
    for (s, t), d in sorted(chart.nonzero().items()):
        lines.append(f"{s}\t{t}\t{d}\t{';'.join(chart.generators.get((s, t), []))}")
    return "\n".join(lines) + "\n"


def _targets(chart: ExtChart, i: int, s: int, t: int) -> Optional[List[str]]:
    if i not in chart.v_mult:
        return None
    mat = chart.v_image(i, s, t)
    if mat is None:
        return None
    e = 2 * chart.p ** i - 1
    return [chart.format_class(s + 1, t + e, row) for row in mat]


def chart_json(chart: ExtChart) -> str:
    cells = []
    for (s, t), d in sorted(chart.nonzero().items()):
        cell = {"s": s, "t": t, "dim": d, "gens": chart.generators.get((s, t), [])}
        for i in range(3):
            cell[f"v{i}"] = _targets(chart, i, s, t) if i <= chart.n else None
        cells.append(cell)
    doc = {"prime": chart.p, "module": chart.module,
           "window": {"s_max": chart.window[0], "t_max": chart.window[1]}, "cells": cells}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


STYLE = {0: 'stroke="black"', 1: 'stroke="blue" stroke-dasharray="4,2"', 2: 'stroke="red" stroke-dasharray="1,2"'}


def chart_svg(chart: ExtChart, scale: int = 12) -> str:
    cells = chart.nonzero()
    stems = [t - s for s, t in cells] or [0]
    x0, x1 = min(stems), max(stems)
    s1 = max([s for s, _ in cells] or [0])
    w = (x1 - x0 + 2) * scale + 40
    h = (s1 + 2) * scale + 40

    def pos(s, t):
        return 30 + (t - s - x0) * scale, h - 30 - s * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-size="8" font-family="monospace">',
           f'<title>Ext {chart.module} p={chart.p}</title>',
           f'<line x1="20" y1="{h - 20}" x2="{w - 5}" y2="{h - 20}" stroke="gray"/>',
           f'<line x1="20" y1="{h - 20}" x2="20" y2="5" stroke="gray"/>']
    for x in range(x0, x1 + 1):
        if x % 4 == 0:
            px = 30 + (x - x0) * scale
            out.append(f'<text x="{px}" y="{h - 8}" text-anchor="middle">{x}</text>')
    for i in sorted(chart.v_mult):
        e = 2 * chart.p ** i - 1
        for (s, t), mat in sorted(chart.v_mult[i].items()):
            if mat.size and np.any(mat % chart.p):
                ax, ay = pos(s, t)
                bx, by = pos(s + 1, t + e)
                out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" {STYLE[i]}/>')
    for (s, t), d in sorted(cells.items()):
        x, y = pos(s, t)
        out.append(f'<circle cx="{x}" cy="{y}" r="2.5" fill="black"/>')
        if d > 1:
            out.append(f'<text x="{x + 3}" y="{y - 3}">{d}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
