"""Deterministic SVG drawings of polygons, guards and their sight lines."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .geom import Polygon

CANVAS = 480
MARGIN = 24


def _fmt(v: Fraction) -> str:
    return f"{float(v):.3f}".rstrip("0").rstrip(".")


def render(P: Polygon, guards: Sequence[int] = (), sight_lines: bool = True) -> str:
    xs = [p.x for p in P.points]
    ys = [p.y for p in P.points]
    minx, miny = min(xs), min(ys)
    span = max(max(xs) - minx, max(ys) - miny) or Fraction(1)
    scale = Fraction(CANVAS - 2 * MARGIN) / span

    def at(i: int) -> tuple[str, str]:
        p = P.point(i)
        # flip y so the drawing matches the usual orientation
        return _fmt(MARGIN + (p.x - minx) * scale), _fmt(CANVAS - MARGIN - (p.y - miny) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        '<polygon points="' + " ".join(",".join(at(i)) for i in P.vertices)
        + '" fill="#eef3fb" stroke="#1f3a68" stroke-width="2"/>',
    ]
    guards = sorted(set(guards))
    if sight_lines:
        from .geom import vertex_visibility

        vis = vertex_visibility(P)
        for g in guards:
            gx, gy = at(g)
            for v in P.vertices:
                if v != g and vis[g, v]:
                    vx, vy = at(v)
                    out.append(
                        f'<line class="sight" x1="{gx}" y1="{gy}" x2="{vx}" y2="{vy}" '
                        'stroke="#e0a030" stroke-width="1" stroke-dasharray="4 3"/>'
                    )
    for i in P.vertices:
        x, y = at(i)
        if P.is_reflex(i):
            out.append(f'<circle class="reflex" cx="{x}" cy="{y}" r="6" fill="none" stroke="#c0392b" stroke-width="2"/>')
        out.append(f'<circle class="vertex" cx="{x}" cy="{y}" r="3" fill="#1f3a68"/>')
        out.append(f'<text x="{x}" y="{y}" dx="6" dy="-6" font-size="11" font-family="monospace">{i}</text>')
    for g in guards:
        x, y = at(g)
        out.append(f'<rect class="guard" x="{_fmt(Fraction(x) - 5)}" y="{_fmt(Fraction(y) - 5)}" '
                   'width="10" height="10" fill="#27ae60"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
