"""Static SVG of a genus-2 Abel-Jacobi image over a fundamental domain."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .bergman import TorusPolyline, orthonormal_frame

_COLORS = ["#c0392b", "#8e44ad", "#d35400", "#16a085", "#2c3e50", "#7f8c8d"]


def _path(points: np.ndarray, to_px) -> str:
    xy = [to_px(p) for p in points]
    return "M " + " L ".join(f"{x:.2f},{y:.2f}" for x, y in xy)


def _pieces(poly: TorusPolyline) -> list[np.ndarray]:
    """Split the torus-reduced samples wherever they wrap around."""
    pts = poly.points
    if poly.closed:
        pts = np.vstack([pts, pts[:1]])
    jumps = np.nonzero(np.any(np.abs(np.diff(pts, axis=0)) > 0.5, axis=1))[0]
    return [p for p in np.split(pts, jumps + 1) if len(p) > 1]


def polylines_svg(polylines: list[TorusPolyline], T, title: str = "",
                  size: int = 480, margin: int = 24) -> str:
    """Image of the real ovals (red shades) over the fundamental domain (blue).

    Drawn in orthonormal coordinates theta = C^T omega, so the domain is the
    parallelogram spanned by the images of the lattice generators and
    lengths on the page are Bergman lengths.  Output is deterministic.
    """
    if not polylines or polylines[0].g != 2:
        raise ValueError("SVG output is available for genus 2 only")
    C = orthonormal_frame(T)
    # a closed loop with zero advance is drawn unbroken inside a shifted domain
    whole = all(not any(p.advance) for p in polylines)
    if whole:
        pts = np.vstack([p.lifted for p in polylines])
        origin = 0.5 * (pts.min(axis=0) + pts.max(axis=0)) - 0.5
    else:
        origin = np.zeros(2)
    square = origin + np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    corners = square @ C
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    scale = (size - 2 * margin) / float(np.max(hi - lo))
    height = int(round(2 * margin + scale * (hi[1] - lo[1])))
    width = int(round(2 * margin + scale * (hi[0] - lo[0])))

    def to_px(omega):
        q = np.asarray(omega) @ C
        return margin + scale * (q[0] - lo[0]), height - margin - scale * (q[1] - lo[1])

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<path d="{_path(square, to_px)} Z" fill="#eaf2fb" stroke="#1f4e9c" stroke-width="1.5"/>',
    ]
    for i, poly in enumerate(polylines):
        color = _COLORS[i % len(_COLORS)]
        pieces = [np.vstack([poly.lifted, poly.lifted[:1]])] if whole else _pieces(poly)
        for piece in pieces:
            out.append(f'<path d="{_path(piece, to_px)}" fill="none" stroke="{color}" '
                       'stroke-width="1.5" stroke-linejoin="round"/>')
    if title:
        out.append(f'<text x="{margin}" y="{margin - 8}" font-family="sans-serif" '
                   f'font-size="12">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
