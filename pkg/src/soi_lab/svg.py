"""Minimal deterministic SVG writer for the plots this package emits.

Hand-rolled on purpose: the outputs must be byte-identical across runs and
platforms, which rules out plotting libraries with version-dependent output.
Only the handful of shapes the cartography and heatmap figures need is
supported. All coordinates are formatted through one canonical number
formatter so a given figure has exactly one serialization.
"""
from __future__ import annotations

from pathlib import Path

from .errors import IoFailure

FONT_FAMILY = "sans-serif"


def fmt_num(value: float) -> str:
    """Canonical coordinate formatting: 2 decimals, trailing zeros dropped."""
    out = f"{value:.2f}"
    if "." in out:
        out = out.rstrip("0").rstrip(".")
    # avoid the negative-zero spelling so equal geometry serializes equally
    return "0" if out == "-0" else out


def escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(text: str) -> str:
    return escape_text(text).replace('"', "&quot;")


class SvgDoc:
    """Accumulates SVG elements in draw order and serializes them.

    Attribute order is fixed per element type, so two documents built from
    the same calls are byte-identical.
    """

    def __init__(self, width: float, height: float) -> None:
        self.width = width
        self.height = height
        self._parts: list[str] = []

    def _attr_str(self, attrs: list[tuple[str, str]]) -> str:
        return " ".join(f'{name}="{_escape_attr(value)}"' for name, value in attrs)

    def rect(
        self,
        x: float,
        y: float,
        width: float,
        height: float,
        fill: str,
        stroke: str | None = None,
        stroke_width: float | None = None,
        css_class: str | None = None,
    ) -> None:
        attrs = [
            ("x", fmt_num(x)),
            ("y", fmt_num(y)),
            ("width", fmt_num(width)),
            ("height", fmt_num(height)),
            ("fill", fill),
        ]
        if stroke is not None:
            attrs.append(("stroke", stroke))
            attrs.append(("stroke-width", fmt_num(stroke_width if stroke_width is not None else 1.0)))
        if css_class is not None:
            attrs.append(("class", css_class))
        self._parts.append(f"<rect {self._attr_str(attrs)}/>")

    def circle(
        self,
        cx: float,
        cy: float,
        r: float,
        fill: str,
        opacity: float | None = None,
        css_class: str | None = None,
    ) -> None:
        attrs = [
            ("cx", fmt_num(cx)),
            ("cy", fmt_num(cy)),
            ("r", fmt_num(r)),
            ("fill", fill),
        ]
        if opacity is not None:
            attrs.append(("fill-opacity", fmt_num(opacity)))
        if css_class is not None:
            attrs.append(("class", css_class))
        self._parts.append(f"<circle {self._attr_str(attrs)}/>")

    def line(
        self,
        x1: float,
        y1: float,
        x2: float,
        y2: float,
        stroke: str,
        stroke_width: float = 1.0,
        dashed: bool = False,
        css_class: str | None = None,
    ) -> None:
        attrs = [
            ("x1", fmt_num(x1)),
            ("y1", fmt_num(y1)),
            ("x2", fmt_num(x2)),
            ("y2", fmt_num(y2)),
            ("stroke", stroke),
            ("stroke-width", fmt_num(stroke_width)),
        ]
        if dashed:
            attrs.append(("stroke-dasharray", "4 3"))
        if css_class is not None:
            attrs.append(("class", css_class))
        self._parts.append(f"<line {self._attr_str(attrs)}/>")

    def polygon(
        self,
        points: list[tuple[float, float]],
        fill: str,
        css_class: str | None = None,
    ) -> None:
        coords = " ".join(f"{fmt_num(x)},{fmt_num(y)}" for x, y in points)
        attrs = [("points", coords), ("fill", fill)]
        if css_class is not None:
            attrs.append(("class", css_class))
        self._parts.append(f"<polygon {self._attr_str(attrs)}/>")

    def text(
        self,
        x: float,
        y: float,
        content: str,
        size: float = 12.0,
        anchor: str = "start",
        fill: str = "#222222",
        bold: bool = False,
        rotate: float | None = None,
        css_class: str | None = None,
    ) -> None:
        attrs = [
            ("x", fmt_num(x)),
            ("y", fmt_num(y)),
            ("font-family", FONT_FAMILY),
            ("font-size", fmt_num(size)),
            ("text-anchor", anchor),
            ("fill", fill),
        ]
        if bold:
            attrs.append(("font-weight", "bold"))
        if rotate is not None:
            attrs.append(("transform", f"rotate({fmt_num(rotate)} {fmt_num(x)} {fmt_num(y)})"))
        if css_class is not None:
            attrs.append(("class", css_class))
        self._parts.append(f"<text {self._attr_str(attrs)}>{escape_text(content)}</text>")

    def render(self) -> str:
        header = (
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{fmt_num(self.width)}" height="{fmt_num(self.height)}" '
            f'viewBox="0 0 {fmt_num(self.width)} {fmt_num(self.height)}">'
        )
        body = "\n".join(self._parts)
        return f"{header}\n{body}\n</svg>\n"

    def write(self, path: str | Path) -> None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.render(), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc


def lerp_color(low: tuple[int, int, int], high: tuple[int, int, int], t: float) -> str:
    """Linear blend between two RGB colors, t clamped to [0, 1]."""
    t = min(1.0, max(0.0, t))
    channels = (round(l + (h - l) * t) for l, h in zip(low, high))
    return "#" + "".join(f"{c:02x}" for c in channels)
