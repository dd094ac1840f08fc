"""Deterministic SVG rendering of shapes and their annuli.

The y-axis is flipped on output (SVG grows downward), so a cluster vertex on
the negative y-axis appears at the bottom of the figure.
"""

from dataclasses import dataclass, field

from .geometry import AnnulusReport, ReuleauxPolygon


@dataclass(frozen=True)
class RenderSpec:
    view_box: tuple = (-1.1, -1.1, 2.2, 2.2)
    size: int = 640
    stroke_width: float = 0.008
    guide_stroke_width: float = 0.004
    show_incircle: bool = True
    show_outercircle: bool = True
    show_vertices: bool = True
    highlight_arcs: tuple = ()    # arc indices drawn in the accent color
    precision: int = 9

    def fmt(self, x: float) -> str:
        return f"{x:.{self.precision}g}"


def _arc_path(poly: ReuleauxPolygon, arcs, spec: RenderSpec, close: bool) -> str:
    """SVG path along the given boundary-ordered arcs.  Unit radius, small
    arcs only (every arc is shorter than pi); flipping y turns the
    counterclockwise trace into sweep flag 1."""
    f = spec.fmt
    m = poly.n_arcs
    parts = []
    prev_end = None
    for k in arcs:
        start = (k + 1) % m
        end = (k - 1) % m
        sx, sy = poly.vertices[start]
        ex, ey = poly.vertices[end]
        if prev_end != start:
            parts.append(f"M {f(sx)} {f(-sy)}")
        parts.append(f"A 1 1 0 0 1 {f(ex)} {f(-ey)}")
        prev_end = end
    if close:
        parts.append("Z")
    return " ".join(parts)


def render_svg(poly: ReuleauxPolygon, annulus: AnnulusReport | None = None,
               spec: RenderSpec | None = None) -> str:
    """Standalone SVG 1.1 document for the shape; byte-stable for fixed
    inputs."""
    spec = spec or RenderSpec()
    f = spec.fmt
    x0, y0, w, h = spec.view_box
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.size}" height="{spec.size}" '
        f'viewBox="{f(x0)} {f(y0)} {f(w)} {f(h)}">',
    ]
    if annulus is not None:
        cx, cy = annulus.center
        dash = f(0.03)
        if spec.show_outercircle:
            lines.append(
                f'<circle cx="{f(cx)}" cy="{f(-cy)}" r="{f(annulus.circumradius)}" '
                f'fill="none" stroke="#888888" stroke-width="{f(spec.guide_stroke_width)}" '
                f'stroke-dasharray="{dash}"/>')
        if spec.show_incircle:
            lines.append(
                f'<circle cx="{f(cx)}" cy="{f(-cy)}" r="{f(annulus.inradius)}" '
                f'fill="none" stroke="#888888" stroke-width="{f(spec.guide_stroke_width)}" '
                f'stroke-dasharray="{dash}"/>')
    boundary = poly.boundary_arc_order()
    lines.append(
        f'<path d="{_arc_path(poly, boundary, spec, close=True)}" '
        f'fill="#dce8f5" stroke="#1f4e79" stroke-width="{f(spec.stroke_width)}"/>')
    if spec.highlight_arcs:
        marked = [k for k in boundary if k in set(spec.highlight_arcs)]
        lines.append(
            f'<path d="{_arc_path(poly, marked, spec, close=False)}" '
            f'fill="none" stroke="#c23b22" stroke-width="{f(1.5 * spec.stroke_width)}"/>')
    if spec.show_vertices:
        for x, y in poly.vertices:
            lines.append(
                f'<circle cx="{f(x)}" cy="{f(-y)}" r="{f(0.015)}" fill="#1f4e79"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
