"""Top-down orthographic SVG previews of scenes.

Plane-local axes plus one labeled rectangle per object (its footprint on
the plane) and callouts for dialog text. Output is a deterministic byte
string for a given story, scene, and bounds source.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .layout import BoundsFn, object_footprint, unit_cube_bounds
from .model import Scene, Story

_AXIS_LEN = 1.0
_MARGIN = 0.6


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _attr(text: str) -> str:
    return escape(text, {'"': "&quot;"})


def render_scene_svg(story: Story, scene_index: int, bounds: BoundsFn = unit_cube_bounds) -> str:
    if not 0 <= scene_index < len(story.scenes):
        raise IndexError(f"scene index {scene_index} out of range 0..{len(story.scenes) - 1}")
    scene = story.scenes[scene_index]
    return _render(scene, bounds, f"{story.metadata.title or 'untitled'} - scene {scene_index}")


def _render(scene: Scene, bounds: BoundsFn, title: str) -> str:
    rects = []
    for obj in scene.objects:
        fp = object_footprint(obj, bounds)
        rects.append((obj, fp))

    min_u = min([fp.min_u for _, fp in rects] + [-_AXIS_LEN])
    max_u = max([fp.max_u for _, fp in rects] + [_AXIS_LEN])
    min_v = min([fp.min_v for _, fp in rects] + [-_AXIS_LEN])
    max_v = max([fp.max_v for _, fp in rects] + [_AXIS_LEN])

    # SVG y points down; map v (forward) to -y so forward is up on screen.
    x0 = min_u - _MARGIN
    y0 = -max_v - _MARGIN
    width = (max_u - min_u) + 2 * _MARGIN
    height = (max_v - min_v) + 2 * _MARGIN

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(width)} {_fmt(height)}" '
        f'font-family="sans-serif" font-size="0.12">',
        f"<title>{escape(title)}</title>",
        # plane-local axes: +u right, +v up
        f'<line x1="0" y1="0" x2="{_fmt(_AXIS_LEN)}" y2="0" stroke="#c0392b" stroke-width="0.02"/>',
        f'<text x="{_fmt(_AXIS_LEN + 0.05)}" y="0.04" fill="#c0392b">u</text>',
        f'<line x1="0" y1="0" x2="0" y2="{_fmt(-_AXIS_LEN)}" stroke="#2980b9" stroke-width="0.02"/>',
        f'<text x="0.05" y="{_fmt(-_AXIS_LEN - 0.05)}" fill="#2980b9">v</text>',
    ]

    for obj, fp in rects:
        cx = (fp.min_u + fp.max_u) / 2.0
        cy = -(fp.min_v + fp.max_v) / 2.0
        parts.append(
            f'<rect x="{_fmt(fp.min_u)}" y="{_fmt(-fp.max_v)}" width="{_fmt(fp.width)}" '
            f'height="{_fmt(fp.depth)}" fill="#ecf0f1" stroke="#2c3e50" stroke-width="0.02"/>'
        )
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" fill="#2c3e50">'
            f"{escape(obj.asset.display_name)}</text>"
        )
        if obj.dialog is not None:
            du = obj.transform.position[0] + obj.dialog.offset[0]
            dv = obj.transform.position[2] + obj.dialog.offset[2]
            parts.append(
                f'<line x1="{_fmt(cx)}" y1="{_fmt(cy)}" x2="{_fmt(du)}" y2="{_fmt(-dv - 0.25)}" '
                f'stroke="#7f8c8d" stroke-width="0.01"/>'
            )
            parts.append(
                f'<text x="{_fmt(du)}" y="{_fmt(-dv - 0.3)}" text-anchor="middle" font-style="italic" '
                f'fill="#7f8c8d">{escape(obj.dialog.text)}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
